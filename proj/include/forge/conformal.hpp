#pragma once

#include <vector>

#include "forge/curvature.hpp"
#include "forge/expr.hpp"
#include "forge/metric.hpp"

namespace forge {

// A metric g together with a positive factor phi, and the rescaled metric
// gbar = phi^-2 g materialized as its own MetricSpec (so the generic curvature
// path can be run on both sides independently).
struct ConformalPair {
  MetricSpec inner;
  ExprPtr phi;
  MetricSpec outer;
  int n = 0;
};

ConformalPair make_conformal_pair(const MetricSpec& inner, const ExprPtr& phi);

// Ricci(gbar) - Ricci(g) for gbar = phi^-2 g, assembled from jets of phi in
// the inner metric only:
//   delta = phi^-2 [ (n-2) phi Hess(phi) + (phi Lap(phi)
//                    - (n-1) |grad phi|^2) g ]
// Returns a d*d row-major matrix. Throws DomainError when phi <= 0.
std::vector<double> conformal_ricci_delta(const ConformalPair& pair,
                                          const std::vector<double>& point);

struct ConformalEinsteinReport {
  bool pass = false;
  double max_residual = 0.0;  // max entry of phi*(Ric)^o + (n-2)(Hess phi)^o
  int grid_size = 0;
  double tol = 0.0;
};

// gbar is Einstein exactly when the traceless parts satisfy
//   phi * (Ric)^o + (n-2) (Hess phi)^o = 0,
// all pieces computed in the inner metric. The report carries the max entry
// of that matrix over the grid.
ConformalEinsteinReport conformally_einstein_residual(
    const ConformalPair& pair, const std::vector<std::vector<double>>& grid,
    double tol);

// Entrywise max residual of the power rule
//   Hess(phi^c) = c phi^(c-1) Hess(phi) + c(c-1) phi^(c-2) dphi (x) dphi
// with both sides evaluated independently. Throws when phi <= 0.
double power_hessian_check(const ExprPtr& phi, double c,
                           const MetricSpec& spec,
                           const std::vector<double>& point);

struct QuasiEinsteinReport {
  bool precondition_pass = false;
  double precondition_residual = 0.0;  // max |phi Ric + (n-1) Hess phi|
  bool pass = false;
  double max_residual = 0.0;    // max |T - phibar gbar|, see below
  double trace_residual = 0.0;  // two phibar recovery paths compared
  double c = 0.0;               // exponent (n-1)/(n-2)
  std::vector<double> phibar;   // per grid point, from the trace
  int grid_size = 0;
  double tol = 0.0;
};

// For (g, phi) with phi Ric + (n-1) Hess(phi) = 0, the metric
// gbar = phi^(-2c) g with c = (n-1)/(n-2) satisfies
//   (n-2)/(n-1) Ric(gbar) = phibar gbar + phi^-2 dphi (x) dphi
// for a function phibar. The check recovers phibar per point from the trace
// of T = (n-2)/(n-1) Ric(gbar) - phi^-2 dphi(x)dphi and requires
// max |T - phibar gbar| < tol; trace_residual compares that recovery against
// the scalar-curvature form of the same trace.
QuasiEinsteinReport quasi_einstein_check(
    int n, const ExprPtr& phi, const MetricSpec& base,
    const std::vector<std::vector<double>>& grid, double tol);

// Constant bookkeeping for one-dimensional factor pairs (a(t), b(s))
// satisfying a'' + eps1*ktilde*a = eps1*c and b'' + eps2*kstar*b = eps2*c
// with kstar = -ktilde and a shared c. All constants are extracted by
// sampling, never symbolically.
struct MainTheoremConstants {
  int n = 0, nstar = 0;
  double ktilde = 0.0, kstar = 0.0;
  double eps1 = 1.0, eps2 = 1.0;
  double c = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double d1 = 0.0, d2 = 0.0;
  int N = 0;  // n + nstar - 1
  double kbar = 0.0;        // -(d1 + d2)
  double lambda_bar = 0.0;  // N * (-d1 - d2)
  double constancy_residual = 0.0;  // max spread of any sampled constant
  double coupling_residual = 0.0;   // c1 - (ktilde d1 + c^2), c2 analogue
};

MainTheoremConstants main_theorem_constants(const ExprPtr& a, const ExprPtr& b,
                                            double ktilde, double eps1,
                                            double eps2, int n, int nstar);

struct BlockStructureReport {
  bool pass = false;
  double max_mixed = 0.0;  // largest |Hess(f)_ij| across the two factors
  int split = 0;           // width of the left factor
  int grid_size = 0;
  double tol = 0.0;
};

// On a product metric, Hess(f) has vanishing mixed block exactly when f
// splits as a(left coords) + b(right coords). Requires the root of spec to
// be product(...).
BlockStructureReport block_structure_check(
    const MetricSpec& spec, const ExprPtr& f,
    const std::vector<std::vector<double>>& grid, double tol);

}  // namespace forge
