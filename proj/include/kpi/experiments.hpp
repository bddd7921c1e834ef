#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kpi/approx.hpp"
#include "kpi/fit.hpp"
#include "kpi/solver.hpp"

namespace kpi {

struct ScanPoint {
  double x = 0.0;      // abscissa (lambda, resolution, ...)
  double value = 0.0;  // measured quantity
  std::string tag;     // series label (t value, estimate name, ...)
};

struct ScanResult {
  std::string id;
  std::vector<ScanPoint> points;
  double slope = 0.0;         // worst fitted slope across series
  double intercept = 0.0;
  double fit_residual = 0.0;  // worst rms residual (ln units)
  double expected = 0.0;      // exponent bound the verdict tests against
  double tol = 0.0;
  bool upper_bound = true;    // verdict: slope <= expected + tol (else >=)
  std::string verdict;        // pass | fail | inconclusive
  std::string notes;

  std::string csv() const;
};

// Re-fit the stored points and re-derive the verdict; bit-identical by construction.
ScanResult refit(const ScanResult& r, double inconclusive_rms = 1.0);

struct ExperimentContext {
  double epsilon = 0.1;   // beta = 2 alpha = 4/3 - epsilon
  std::optional<double> alpha;
  std::optional<double> beta;
  double omega = 1.0;
  double omega_prime = -1.0;
  std::vector<double> lambdas = {8, 16, 32, 64, 128, 256};
  std::vector<double> t_samples = {-1.0, 0.0, 1.0};
  std::uint64_t seed = 20080227;
  int workers = 1;
  std::string outdir = "results";

  ApproxParams params(double lambda) const;
};

// Lemma 2 sweep: residual (I), estimates (II)/(III), X-boundedness, F-growth,
// the velocity-cancellation check, the proof-term ledger, and both negative
// controls (omega pairing removed; KP-II sign).
std::vector<ScanResult> run_residual_scan(const ExperimentContext& ctx);

std::vector<ScanResult> run_initial_closeness(const ExperimentContext& ctx);

// Separable divergence lower bound (IV); `solver_lambda` > 0 adds the
// pseudospectral cross-check at that lambda and t = 0.5.
std::vector<ScanResult> run_divergence(const ExperimentContext& ctx, double solver_lambda = 0.0);

struct GronwallOptions {
  std::vector<double> lambdas = {3, 4, 6, 8};
  double t_end = 1.0;
  double dt = 2e-3;
  double ppw_y = 3.5;
  bool dealias = true;
};
std::vector<ScanResult> run_gronwall(const ExperimentContext& ctx, const GronwallOptions& opt);

struct SobolevOptions {
  std::size_t draws = 100;
  std::vector<std::size_t> resolutions = {64, 128, 256, 512};
};
std::vector<ScanResult> run_sobolev_audit(const ExperimentContext& ctx, const SobolevOptions& opt);

struct ConservationOptions {
  double lambda = 4.0;
  double t_end = 1.0;
  double dt = 1e-3;
  double ppw_y = 3.5;
  // dt-halving self-convergence study
  double conv_t_end = 0.1;
  double conv_dt = 8e-3;
};
std::vector<ScanResult> run_conservation(const ExperimentContext& ctx,
                                         const ConservationOptions& opt);

// Seeded random smooth zero-x-mean field on an n x n grid (sobolev audit).
Field2D random_smooth_field(std::size_t n, double box, double k0, std::uint64_t seed);

// Writes one CSV per scan plus a JSON manifest mapping every numbered estimate
// to a passing experiment id; returns the manifest path.
std::string write_results(const std::string& outdir, const std::vector<ScanResult>& results,
                          const std::string& config_echo, const std::string& group = "");

// Coverage check over all manifests in a directory: every key present & passing.
std::vector<std::string> coverage_gaps(const std::string& outdir);
const std::vector<std::string>& coverage_keys();

}  // namespace kpi
