#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "forge/expr.hpp"
#include "forge/metric.hpp"

namespace forge {

// Fixed-step classical RK4 trajectory with per-step first-integral
// monitoring. The step count is round((t1-t0)/step) with the step width
// adjusted to land exactly on t1, so identical inputs give identical rows.
struct OdeTrajectory {
  std::vector<std::string> state_names;
  std::vector<std::string> invariant_names;
  std::vector<double> param;
  std::vector<std::vector<double>> states;      // [row][component]
  std::vector<std::vector<double>> invariants;  // [row][monitor]
  std::vector<double> drift;  // max |I_j - I_j(t0)| over the run, per monitor
  std::string tag;            // closed-form family name, empty when untagged
  bool truncated = false;
  std::string truncation_reason;
  // Parameter values where a monitored component crossed zero (chart
  // degeneracies for the exported coordinates, not integration failures).
  std::vector<double> events;
};

// Columns: parameter, state components, monitored integrals.
void write_csv(const OdeTrajectory& tr, std::ostream& os);

// phi''' + eps k phi' = 0, monitored integral (phi'')^2 + eps k (phi')^2.
// That integral equals eps * kstar, which names the induced curvature.
struct BrinkmannProblem {
  double eps = 1.0;  // +1 or -1
  double k = 0.0;
  double phi0 = 1.0, dphi0 = 0.0, ddphi0 = 0.0;
};
struct BrinkmannResult {
  OdeTrajectory traj;
  double kstar = 0.0;
};
BrinkmannResult solve_brinkmann(const BrinkmannProblem& p, double t0,
                                double t1, double step);

// f'' = eps kstar f, with kstar f^2 - eps f'^2 = kbar conserved. kbar is
// part of the problem statement and the initial data must reproduce it to
// 1e-12. Recognized closed forms (eps = +1) get a tag:
//   (f0,f0')=(1,0): cosh | cos | const      (kstar = 1 | -1 | 0)
//   (f0,f0')=(1,1): exp | linear | mixed-exp(sqrt2)   (kstar = 1 | 0 | 2)
//   (f0,f0')=(0,1): sinh | sin | t          (kstar = 1 | -1 | 0)
struct FtProblem {
  double eps = 1.0;
  double kstar = 0.0;
  double kbar = 0.0;
  double f0 = 1.0, df0 = 0.0;
};
OdeTrajectory solve_ft(const FtProblem& p, double t0, double t1, double step);

// K''' + K K' = 0 with 2K'' + K^2 = c and (K')^2 = cK - K^3/3 + d. K'' is
// seeded from c; the d identity must hold at t0 to 1e-12. Zero crossings of
// K' land in events (the revolution chart dt^2 + K'^2 dx^2 degenerates
// there).
struct ExtremalSurfaceParams {
  double c = 0.0, d = 0.0;
  double K0 = 0.0, dK0 = 0.0;
};
OdeTrajectory solve_extremal(const ExtremalSurfaceParams& p, double t0,
                             double t1, double step);

// dt^2 + K'(t)^2 dx^2 for a closed-form K(t); its Gaussian curvature is K.
MetricSpec extremal_metric(const ExprPtr& K);
// K''' + K K' at t, via symbolic derivatives of K.
double extremal_ode_residual(const ExprPtr& K, double t);

// Warp profile u(x) for the family
//   u'' = [ k(n-2)/2 - d u^2 - (n-2)/2 u'^2 ] / u
// with the two conserved integrals
//   first:      u^(n-2) (u'^2 + (2d/n) u^2 - k) = c
//   oscillator: ((u^(n/2))')^2 + (dn/2) (u^(n/2))^2 - k(n^2/4) u^(n-2) = e
// and e = n^2 c / 4 identically. The ambient Einstein constant is 2d and
// kbar = 2d/n. Declared c/e are validated against the initial data (1e-10);
// omitted ones are derived. u' zero crossings land in events; u <= 0
// truncates the run.
struct IteratedWarpProblem {
  int n = 3;       // fiber dimension + 1
  double k = 0.0;  // fiber curvature normalized so Ric_fiber = k(n-2) g
  double d = 0.0;
  double u0 = 1.0, du0 = 0.0;
  std::optional<double> c, e;
};
struct IteratedWarpResult {
  OdeTrajectory traj;
  double c = 0.0, e = 0.0;
  double kbar = 0.0;  // 2d/n
};
IteratedWarpResult solve_iterated_warp(const IteratedWarpProblem& p,
                                       double x0, double x1, double step);

// (n-1)-dimensional Einstein fiber with Ric = k(n-2)g: a rescaled round
// sphere (k > 0), flat chart (k = 0), or rescaled hyperbolic chart (k < 0).
MetricNodePtr fiber_for(int n, double k);

// eps_t u'(x)^2 dt^2 + dx^2 + u(x)^2 g_fiber for a closed-form u over the
// coordinate x, with the fiber from fiber_for.
MetricSpec iterated_warp_metric(const ExprPtr& u, int n, double k,
                                int eps_t = 1);
// Third-order form u^2 u''' + (n-3) u u' u'' - (n-2) u'^3 + k(n-2) u' at x.
double iterated_warp_residual(const ExprPtr& u, int n, double k, double x);

// Residuals of the two conditions for phi^-2 (dt^2 + g*) to be Einstein with
// normalized curvature kbar, where n = dim(g*):
//   eq1: phi Ric* + (n-1) Hess*(phi) = 0
//   eq2: |grad phi|^2_* + phi^2 kstar + kbar = 0
// kstar is estimated per grid point from the scalar curvature of g*.
struct ConfProductReport {
  bool eq1_pass = false, eq2_pass = false;
  double eq1_residual = 0.0;
  double eq2_residual = 0.0;
  double kstar = 0.0;
  double kstar_spread = 0.0;
  int grid_size = 0;
  double tol = 0.0;
};
ConfProductReport conf_product_residual(
    const ExprPtr& phi, const MetricSpec& g_star, int n, double kbar,
    const std::vector<std::vector<double>>& grid, double tol);

// Static-potential identity f Ric* - Hess*(f) + Lap*(f) g* = 0 together with
// its trace f S* + (n-1) Lap*(f) = 0.
struct CorvinoReport {
  bool pass = false;
  double max_residual = 0.0;
  double trace_residual = 0.0;
  int grid_size = 0;
  double tol = 0.0;
};
CorvinoReport corvino_residual(const ExprPtr& f, const MetricSpec& g_star,
                               const std::vector<std::vector<double>>& grid,
                               double tol);

// Chart length x(u) = int_{u0}^{u} sqrt(v^(n-2) / P(v)) dv for
// P(v) = c - kbar v^n + k v^(n-2), where u0 is a positive root of P.
// A simple root is handled by the substitution v = u0 + s^2 (and P is
// shifted by its roundoff value at u0 so the radicand vanishes exactly).
// A double root makes the integral infinite for every u > u0; the result
// then carries diverges = true plus the large-u growth coefficient of
// x(u) ~ log(u)/sqrt(-kbar).
struct QuadratureXU {
  double x = 0.0;
  bool diverges = false;
  double log_coefficient = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};
QuadratureXU quadrature_x_of_u(const IteratedWarpProblem& p, double u0,
                               double u);

}  // namespace forge
