#pragma once

#include <string>
#include <vector>

#include "kpi/experiments.hpp"

namespace kpi {

struct RunConfig {
  std::string experiment;
  ExperimentContext ctx;
  GronwallOptions gronwall;
  SobolevOptions sobolev;
  ConservationOptions conserve;
  double divergence_solver_lambda = 0.0;

  // solve subcommand
  double solve_lambda = 4.0;
  double solve_t_end = 0.25;
  double solve_dt = 0.0;  // 0: policy
  double ppw_y = 3.5;
  std::string snapshot_out;

  // moments subcommand
  std::vector<double> gammas = {0.0, M_PI / 3.0, 1.0};

  // stable storage for the optional exponent overrides
  double alpha_flag = 0.0;
  double beta_flag = 0.0;

  std::string echo;  // resolved configuration, for the manifest
};

// Parses argv-style tokens (no program name); throws ConstraintError with the
// violated inequality named, or CLI usage errors.
RunConfig parse_config(const std::vector<std::string>& args);

// Runs the named experiment; writes CSV/JSON under ctx.outdir; prints one
// verdict line per estimate. Exit: 0 all pass, 1 fail, 2 instability,
// 3 constraint violation, 4 inconclusive, 64 usage.
int dispatch(const RunConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace kpi
