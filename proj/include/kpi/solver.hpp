#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kpi/approx.hpp"
#include "kpi/functionals.hpp"
#include "kpi/spectral.hpp"

namespace kpi {

struct SolverConfig {
  Grid2D grid;
  double dt = 1e-3;
  double t_end = 1.0;  // negative for backward runs
  bool dealias = true;
  bool nonlinear = true;
  std::size_t monitor_stride = 50;
  bool monitor_f = true;
  double blowup_factor = 1e6;
  std::size_t snapshot_stride = 0;  // 0: first and last only
};

struct Trajectory {
  std::vector<std::pair<double, Field2D>> snapshots;
  std::vector<Diagnostics> diagnostics;
};

// Integrating-factor RK4 stepper with persistent FFTW plans; the linear flow
// exp(i t p) is applied exactly, the nonlinearity -u u_x = -(u^2/2)_x is
// evaluated pseudospectrally with 2/3-rule dealiasing.
class KpiStepper {
 public:
  KpiStepper(const Grid2D& grid, bool dealias, bool nonlinear, double blowup_abs);
  ~KpiStepper();
  KpiStepper(const KpiStepper&) = delete;
  KpiStepper& operator=(const KpiStepper&) = delete;

  void step(SpectralField& u, double dt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One step on a plain field (convenience / spec surface).
Field2D step(const Field2D& u, double dt, const SolverConfig& cfg);

Trajectory solve(const Field2D& u0, const SolverConfig& cfg,
                 const std::function<void(double, const SpectralField&)>& observer = nullptr);

struct DifferenceRow {
  double t = 0.0;
  double v_l2 = 0.0;     // ||u - u_ap||_L2
  double dxv_l2 = 0.0;   // ||dx(u - u_ap)||_L2
  double u_l2 = 0.0;
  double uap_l2 = 0.0;
};

struct DifferenceResult {
  Trajectory trajectory;  // of v = u - u_ap
  std::vector<DifferenceRow> rows;
};

// Integrates the exact solution from u_ap(0) data and subtracts the rendered
// u_ap(t) at monitor times.
DifferenceResult difference_run(const ApproxParams& p, const SolverConfig& cfg);

// Box/grid policy: supports plus transport allowance plus margin, grid sized so
// the carrier and the envelope band stay inside the dealiased third.
SolverConfig make_solver_config(const ApproxParams& p, double t_end,
                                double points_per_wavelength_y = 3.5, double margin = 0.05);

// spec dt policy: min(0.2 / (lambda max|u| nx / Lx), 1e-3)
double policy_dt(const ApproxParams& p, const Grid2D& grid, double u_max);

void write_snapshot(const std::string& path, const Field2D& f, double t);
Field2D read_snapshot(const std::string& path, double& t);

}  // namespace kpi
