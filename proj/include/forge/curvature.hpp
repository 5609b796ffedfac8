#pragma once

#include <vector>

#include "forge/expr.hpp"
#include "forge/metric.hpp"

namespace forge {

// Curvature convention used throughout:
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//   R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
//             + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
//   Ric(X,Y) = tr(V -> R(V,X)Y),  Ric_jk = R^i_ijk
// With this orientation the unit sphere has Ric = +(n-1) g.
//
// Christoffel values come from the metric's 1-jets and their derivatives from
// the 2-jets, so the Riemann tensor is exact to rounding (no finite
// differencing anywhere in this path).
struct CurvatureReport {
  int dim = 0;
  std::vector<double> point;
  std::vector<double> g;       // d*d row-major
  std::vector<double> ginv;    // d*d
  std::vector<double> gamma;   // Gamma^k_ij at [(k*d+i)*d+j]
  std::vector<double> dgamma;  // d_m Gamma^k_ij at [((m*d+k)*d+i)*d+j]
  std::vector<double> riemann; // R^l_ijk at [((l*d+i)*d+j)*d+k]
  std::vector<double> ricci;   // d*d
  double scalar = 0.0;
  std::vector<double> traceless_ricci;  // Ric - (S/d) g
  double bianchi_residual = 0.0;        // max |R^l_ijk + R^l_jki + R^l_kij|

  double rm(int l, int i, int j, int k) const {
    return riemann[static_cast<size_t>(
        ((l * dim + i) * dim + j) * dim + k)];
  }
  double ric(int i, int j) const {
    return ricci[static_cast<size_t>(i * dim + j)];
  }
};

CurvatureReport curvature_at(const MetricSpec& spec,
                             const std::vector<double>& point);

// Covariant Hessian data of a scalar field at a point.
struct HessianReport {
  double value = 0.0;
  std::vector<double> grad;     // d_i f
  std::vector<double> hessian;  // (nabla^2 f)_ij, d*d
  double laplacian = 0.0;       // g^ij (nabla^2 f)_ij
  double grad_norm2 = 0.0;      // g^ij d_i f d_j f (signed)
};

HessianReport hessian_at(const ExprPtr& f, const MetricSpec& spec,
                         const std::vector<double>& point);

struct EinsteinReport {
  bool pass = false;
  double lambda_hat = 0.0;     // mean of S/d over the grid
  double lambda_stddev = 0.0;  // spread of S/d
  double max_residual = 0.0;   // max |Ric_ij - lambda_hat g_ij|
  int grid_size = 0;
  double tol = 0.0;
};

EinsteinReport einstein_residual(const MetricSpec& spec,
                                 const std::vector<std::vector<double>>& grid,
                                 double tol);

// Deterministic low-discrepancy (Halton) points inside the box, inset by a
// relative margin of 1e-3 per side. Coordinates missing from the box get
// [0.35, 1.25], which keeps every shipped chart inside its domain of
// definition.
inline constexpr double kDefaultBoxLo = 0.35;
inline constexpr double kDefaultBoxHi = 1.25;
inline constexpr double kDefaultTol = 1e-7;
inline constexpr int kDefaultGridSize = 64;

std::vector<std::vector<double>> grid_points(const MetricSpec& spec,
                                             const DomainBox& box, int n);

// Max |R^l_ijk - kappa (g_jk delta^l_i - g_ik delta^l_j)|; zero for a
// constant-curvature metric in this convention.
double constant_curvature_residual(const CurvatureReport& rep, double kappa);
double max_abs_riemann(const CurvatureReport& rep);
double max_abs_ricci(const CurvatureReport& rep);

// EINSTEIN_FORGE_TOL when set to a positive number, else 1e-7.
double default_tol();

}  // namespace forge
