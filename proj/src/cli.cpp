#include "kpi/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "CLI11.hpp"
#include "kpi/io.hpp"

namespace kpi {

namespace {

std::unique_ptr<CLI::App> build_app(RunConfig& cfg) {
  auto app = std::make_unique<CLI::App>("kpilab: KP-I approximate-solution laboratory");
  app->require_subcommand(1);
  app->set_config("--config", "", "key=value configuration file; flags take precedence");
  app->fallthrough();

  const char* env_out = std::getenv("KPILAB_OUTDIR");
  if (env_out) cfg.ctx.outdir = env_out;

  app->add_option("--outdir", cfg.ctx.outdir, "results directory");
  app->add_option("--seed", cfg.ctx.seed, "random seed");
  app->add_option("--workers", cfg.ctx.workers, "worker pool size");
  app->add_option("--epsilon", cfg.ctx.epsilon, "exponent scheme: beta = 2 alpha = 4/3 - epsilon");
  auto* oa = app->add_option("--alpha", cfg.alpha_flag, "override alpha");
  auto* ob = app->add_option("--beta", cfg.beta_flag, "override beta");
  app->add_option("--omega", cfg.ctx.omega, "omega of the first family");
  app->add_option("--omega-prime", cfg.ctx.omega_prime, "omega of the second family");
  app->add_option("--lambdas", cfg.ctx.lambdas, "lambda sweep");
  app->add_option("--t", cfg.ctx.t_samples, "time samples");

  app->add_subcommand("residual-scan", "Lemma 2 sweep: (I)-(III), F-growth, negative controls");
  auto* div = app->add_subcommand("divergence", "estimate (IV) lower bound");
  div->add_option("--solver-lambda", cfg.divergence_solver_lambda,
                  "add the pseudospectral cross-check at this lambda");
  app->add_subcommand("initial-closeness", "X-norm of the initial difference");
  auto* gr = app->add_subcommand("gronwall", "difference runs v = u - u_ap over lambda");
  gr->add_option("--gronwall-lambdas", cfg.gronwall.lambdas, "solver lambda sweep");
  gr->add_option("--t-end", cfg.gronwall.t_end, "horizon");
  gr->add_option("--dt", cfg.gronwall.dt, "time step");
  gr->add_option("--ppw-y", cfg.gronwall.ppw_y, "points per carrier wavelength in y");
  gr->add_flag_callback("--no-dealias", [&cfg] { cfg.gronwall.dealias = false; },
                        "negative control: disable the 2/3 rule");
  auto* so = app->add_subcommand("sobolev-audit", "anisotropic Sobolev ratio audit");
  so->add_option("--draws", cfg.sobolev.draws, "random fields per resolution");
  so->add_option("--resolutions", cfg.sobolev.resolutions, "grid sizes");
  auto* co = app->add_subcommand("conserve", "conservation + convergence at reference resolution");
  co->add_option("--lambda", cfg.conserve.lambda, "lambda");
  co->add_option("--t-end", cfg.conserve.t_end, "horizon");
  co->add_option("--dt", cfg.conserve.dt, "time step cap");
  co->add_option("--conserve-ppw-y", cfg.conserve.ppw_y, "points per carrier wavelength in y");
  auto* sv = app->add_subcommand("solve", "integrate u_ap(0) data and dump diagnostics");
  sv->add_option("--lambda", cfg.solve_lambda, "lambda");
  sv->add_option("--t-end", cfg.solve_t_end, "horizon");
  sv->add_option("--dt", cfg.solve_dt, "time step (0: policy)");
  sv->add_option("--ppw-y", cfg.ppw_y, "points per carrier wavelength in y");
  sv->add_option("--out", cfg.snapshot_out, "final snapshot path (binary)");
  auto* mo = app->add_subcommand("moments", "oscillatory moments and the absorption threshold");
  mo->add_option("--gammas", cfg.gammas, "phases gamma");

  app->parse_complete_callback([&cfg, oa, ob, app_ptr = app.get()] {
    if (oa->count()) cfg.ctx.alpha = cfg.alpha_flag;
    if (ob->count()) cfg.ctx.beta = cfg.beta_flag;
    cfg.experiment = app_ptr->get_subcommands().front()->get_name();
  });
  return app;
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream s;
  const ApproxParams p = cfg.ctx.params(cfg.ctx.lambdas.empty() ? 8.0 : cfg.ctx.lambdas.front());
  s << "experiment=" << cfg.experiment << " alpha=" << CsvWriter::format(p.alpha)
    << " beta=" << CsvWriter::format(p.beta) << " omega=" << CsvWriter::format(cfg.ctx.omega)
    << " omega_prime=" << CsvWriter::format(cfg.ctx.omega_prime) << " seed=" << cfg.ctx.seed
    << " lambdas=";
  for (double l : cfg.ctx.lambdas) s << CsvWriter::format(l) << ",";
  s << " t=";
  for (double t : cfg.ctx.t_samples) s << CsvWriter::format(t) << ",";
  return s.str();
}

void print_verdicts(const std::vector<ScanResult>& results) {
  for (const auto& r : results) {
    std::printf("[%s] %-36s %s=%.6g %s %.6g (tol %.3g)%s\n", r.verdict.c_str(), r.id.c_str(),
                r.notes.substr(0, r.notes.find(';')) == "slope" ? "slope" : "value", r.slope,
                r.upper_bound ? "<=" : ">=", r.expected + (r.upper_bound ? r.tol : -r.tol), r.tol,
                r.fit_residual > 0 ? (" fit-rms=" + CsvWriter::format(r.fit_residual)).c_str()
                                   : "");
  }
}

int verdict_exit(const std::vector<ScanResult>& results) {
  bool inconclusive = false;
  for (const auto& r : results) {
    if (r.verdict == "fail") return 1;
    if (r.verdict == "inconclusive") inconclusive = true;
  }
  return inconclusive ? 4 : 0;
}

int run_solve(const RunConfig& cfg) {
  const ApproxParams p = cfg.ctx.params(cfg.solve_lambda);
  SolverConfig sc = make_solver_config(p, cfg.solve_t_end, cfg.ppw_y);
  if (cfg.solve_dt > 0.0) sc.dt = cfg.solve_dt;
  sc.monitor_stride = std::max<std::size_t>(1, static_cast<std::size_t>(0.05 / sc.dt));
  std::printf("grid %zux%zu box %.6g x %.6g dt %.3g steps %.0f\n", sc.grid.gx.n, sc.grid.gy.n,
              sc.grid.gx.length, sc.grid.gy.length, sc.dt, std::ceil(cfg.solve_t_end / sc.dt));
  const Field2D u0 = render(build_u_ap(p, 0.0).full(), sc.grid);
  const Trajectory traj = solve(u0, sc);
  CsvWriter w({"t", "N", "E", "F", "x_norm", "z_norm"});
  for (const auto& d : traj.diagnostics)
    w.add_row_values({d.t, d.n_mass, d.energy, d.f_value, d.x_norm, d.z_norm});
  make_directories(cfg.ctx.outdir);
  w.write(cfg.ctx.outdir + "/solve-diagnostics.csv");
  const auto& d0 = traj.diagnostics.front();
  const auto& dN = traj.diagnostics.back();
  std::printf("N drift %.3e  E drift %.3e  F drift %.3e\n",
              std::fabs(dN.n_mass / d0.n_mass - 1.0), std::fabs(dN.energy / d0.energy - 1.0),
              std::fabs(dN.f_value / d0.f_value - 1.0));
  if (!cfg.snapshot_out.empty())
    write_snapshot(cfg.snapshot_out, traj.snapshots.back().second, traj.snapshots.back().first);
  return 0;
}

int run_moments(const RunConfig& cfg) {
  CsvWriter w({"lambda", "gamma", "moment0", "moment1", "peak"});
  std::vector<ScanResult> results;
  ScanResult r{.id = "moments/oscillatory", .expected = 0.0, .tol = 1e-9};
  for (double L : cfg.ctx.lambdas) {
    const ApproxParams p = cfg.ctx.params(L);
    const Profile1D psi = make_psi_lambda(p);
    const double peak = sampled_sup(*psi.p, 0);
    for (double g : cfg.gammas) {
      auto [m0, m1] = check_moments(psi, L, g);
      w.add_row_values({L, g, m0, m1, peak});
      r.points.push_back({L, std::max(std::fabs(m0), std::fabs(m1)) / peak,
                          "gamma=" + CsvWriter::format(g)});
    }
  }
  std::vector<double> ls = cfg.ctx.lambdas;
  const ApproxParams p0 = cfg.ctx.params(ls.empty() ? 8.0 : ls.front());
  const double lambda0 = absorption_threshold(ls, p0.alpha);
  std::printf("absorption threshold lambda0 = %g (psi psi~ == psi for every scanned lambda >= "
              "lambda0)\n",
              lambda0);
  make_directories(cfg.ctx.outdir);
  w.write(cfg.ctx.outdir + "/moments.csv");
  ScanResult rr = r;
  rr.notes = "max-value";
  results.push_back(refit(rr));
  print_verdicts(results);
  write_results(cfg.ctx.outdir, results, config_echo(cfg));
  return verdict_exit(results);
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  auto app = build_app(cfg);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  app->parse(rev);
  cfg.echo = config_echo(cfg);
  // validate the (alpha, beta) constraints before dispatch
  for (double l : cfg.ctx.lambdas) cfg.ctx.params(l);
  return cfg;
}

int dispatch(const RunConfig& cfg) {
  std::vector<ScanResult> results;
  if (cfg.experiment == "residual-scan") {
    results = run_residual_scan(cfg.ctx);
  } else if (cfg.experiment == "initial-closeness") {
    results = run_initial_closeness(cfg.ctx);
  } else if (cfg.experiment == "divergence") {
    results = run_divergence(cfg.ctx, cfg.divergence_solver_lambda);
  } else if (cfg.experiment == "gronwall") {
    results = run_gronwall(cfg.ctx, cfg.gronwall);
  } else if (cfg.experiment == "sobolev-audit") {
    results = run_sobolev_audit(cfg.ctx, cfg.sobolev);
  } else if (cfg.experiment == "conserve") {
    results = run_conservation(cfg.ctx, cfg.conserve);
  } else if (cfg.experiment == "solve") {
    return run_solve(cfg);
  } else if (cfg.experiment == "moments") {
    return run_moments(cfg);
  } else {
    throw ConstraintError("unknown experiment " + cfg.experiment);
  }
  print_verdicts(results);
  write_results(cfg.ctx.outdir, results, cfg.echo, cfg.experiment);
  return verdict_exit(results);
}

int run_cli(int argc, char** argv) {
  RunConfig cfg;
  auto app = build_app(cfg);
  try {
    app->parse(argc, argv);
    cfg.echo = config_echo(cfg);
    for (double l : cfg.ctx.lambdas) cfg.ctx.params(l);
  } catch (const CLI::ParseError& e) {
    const int rc = app->exit(e);
    return rc == 0 ? 0 : 64;
  } catch (const ConstraintError& e) {
    std::fprintf(stderr, "constraint violation: %s\n", e.what());
    return 3;
  }
  try {
    return dispatch(cfg);
  } catch (const InstabilityError& e) {
    std::fprintf(stderr, "instability: %s\n", e.what());
    return 2;
  } catch (const ConstraintError& e) {
    std::fprintf(stderr, "constraint violation: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace kpi
