#include "forge/curvature.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "forge/errors.hpp"
#include "forge/linalg.hpp"

namespace forge {

namespace {

// Flat index helpers for rank-3/4 arrays of extent d.
inline size_t i3(int a, int b, int c, int d) {
  return static_cast<size_t>((a * d + b) * d + c);
}
inline size_t i4(int a, int b, int c, int e, int d) {
  return static_cast<size_t>(((a * d + b) * d + c) * d + e);
}

struct FirstOrderData {
  int d;
  std::vector<double> g, ginv;
  std::vector<double> dg;     // dg[m][i][j] = d_m g_ij
  std::vector<double> gamma;  // Gamma^k_ij
};

void invert_or_throw(const std::vector<double>& g, int d,
                     std::vector<double>& ginv,
                     const std::vector<double>& point) {
  if (!la::invert(g, d, ginv))
    throw SingularMetricError("metric not invertible at evaluation point",
                              point);
}

FirstOrderData first_order(const MetricJets& G,
                           const std::vector<double>& point) {
  FirstOrderData out;
  const int d = out.d = G.dim;
  out.g.resize(static_cast<size_t>(d) * d);
  out.dg.resize(static_cast<size_t>(d) * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Jet2& gij = G.at(i, j);
      out.g[static_cast<size_t>(i) * d + j] = gij.value();
      for (int m = 0; m < d; ++m) out.dg[i3(m, i, j, d)] = gij.grad(m);
    }
  invert_or_throw(out.g, d, out.ginv, point);

  out.gamma.assign(static_cast<size_t>(d) * d * d, 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) {
          s += out.ginv[static_cast<size_t>(k) * d + l] *
               (out.dg[i3(i, l, j, d)] + out.dg[i3(j, l, i, d)] -
                out.dg[i3(l, i, j, d)]);
        }
        s *= 0.5;
        out.gamma[i3(k, i, j, d)] = s;
        out.gamma[i3(k, j, i, d)] = s;
      }
  return out;
}

}  // namespace

CurvatureReport curvature_at(const MetricSpec& spec,
                             const std::vector<double>& point) {
  const MetricJets G = spec.eval_jets(point);
  const int d = G.dim;
  FirstOrderData f = first_order(G, point);

  CurvatureReport rep;
  rep.dim = d;
  rep.point = point;
  rep.g = f.g;
  rep.ginv = f.ginv;
  rep.gamma = f.gamma;

  // ddg[m][i][l][j] = d_m d_i g_lj, straight from the packed Hessians.
  std::vector<double> ddg(static_cast<size_t>(d) * d * d * d);
  for (int l = 0; l < d; ++l)
    for (int j = 0; j < d; ++j) {
      const Jet2& glj = G.at(l, j);
      for (int m = 0; m < d; ++m)
        for (int i = 0; i < d; ++i)
          ddg[i4(m, i, l, j, d)] = glj.hess(m, i);
    }

  // d_m g^kl = -g^ka (d_m g_ab) g^bl
  std::vector<double> dginv(static_cast<size_t>(d) * d * d, 0.0);
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        double s = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            s -= f.ginv[static_cast<size_t>(k) * d + a] *
                 f.dg[i3(m, a, b, d)] *
                 f.ginv[static_cast<size_t>(b) * d + l];
        dginv[i3(m, k, l, d)] = s;
      }

  rep.dgamma.assign(static_cast<size_t>(d) * d * d * d, 0.0);
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          double s = 0.0;
          for (int l = 0; l < d; ++l) {
            const double sym = f.dg[i3(i, l, j, d)] + f.dg[i3(j, l, i, d)] -
                               f.dg[i3(l, i, j, d)];
            const double dsym = ddg[i4(m, i, l, j, d)] +
                                ddg[i4(m, j, l, i, d)] -
                                ddg[i4(m, l, i, j, d)];
            s += dginv[i3(m, k, l, d)] * sym +
                 f.ginv[static_cast<size_t>(k) * d + l] * dsym;
          }
          s *= 0.5;
          rep.dgamma[i4(m, k, i, j, d)] = s;
          rep.dgamma[i4(m, k, j, i, d)] = s;
        }

  rep.riemann.assign(static_cast<size_t>(d) * d * d * d, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double s = rep.dgamma[i4(i, l, j, k, d)] -
                     rep.dgamma[i4(j, l, i, k, d)];
          for (int m = 0; m < d; ++m)
            s += f.gamma[i3(l, i, m, d)] * f.gamma[i3(m, j, k, d)] -
                 f.gamma[i3(l, j, m, d)] * f.gamma[i3(m, i, k, d)];
          rep.riemann[i4(l, i, j, k, d)] = s;
        }

  rep.ricci.assign(static_cast<size_t>(d) * d, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += rep.riemann[i4(i, i, j, k, d)];
      rep.ricci[static_cast<size_t>(j) * d + k] = s;
    }

  rep.scalar = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      rep.scalar += f.ginv[static_cast<size_t>(j) * d + k] *
                    rep.ricci[static_cast<size_t>(j) * d + k];

  rep.traceless_ricci.resize(static_cast<size_t>(d) * d);
  const double mean = rep.scalar / d;
  for (size_t t = 0; t < rep.ricci.size(); ++t)
    rep.traceless_ricci[t] = rep.ricci[t] - mean * rep.g[t];

  rep.bianchi_residual = 0.0;
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          const double c = rep.riemann[i4(l, i, j, k, d)] +
                           rep.riemann[i4(l, j, k, i, d)] +
                           rep.riemann[i4(l, k, i, j, d)];
          rep.bianchi_residual = std::max(rep.bianchi_residual, std::fabs(c));
        }
  return rep;
}

HessianReport hessian_at(const ExprPtr& f, const MetricSpec& spec,
                         const std::vector<double>& point) {
  const int d = spec.dim();
  if (static_cast<int>(point.size()) != d)
    throw std::invalid_argument("hessian_at: point dimension mismatch");
  Scope scope;
  for (int i = 0; i < d; ++i) scope.emplace(spec.coords()[i], i);
  check_symbols(f, scope, "scalar field");

  const MetricJets G = spec.eval_jets(point);
  FirstOrderData fo = first_order(G, point);
  const Jet2 jf = eval_jet(f, point, scope);

  HessianReport rep;
  rep.value = jf.value();
  rep.grad.resize(d);
  for (int i = 0; i < d; ++i) rep.grad[i] = jf.grad(i);

  rep.hessian.resize(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = jf.hess(i, j);
      for (int k = 0; k < d; ++k)
        s -= fo.gamma[i3(k, i, j, d)] * jf.grad(k);
      rep.hessian[static_cast<size_t>(i) * d + j] = s;
    }

  rep.laplacian = 0.0;
  rep.grad_norm2 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double w = fo.ginv[static_cast<size_t>(i) * d + j];
      rep.laplacian += w * rep.hessian[static_cast<size_t>(i) * d + j];
      rep.grad_norm2 += w * jf.grad(i) * jf.grad(j);
    }
  return rep;
}

EinsteinReport einstein_residual(const MetricSpec& spec,
                                 const std::vector<std::vector<double>>& grid,
                                 double tol) {
  EinsteinReport rep;
  rep.tol = tol;
  rep.grid_size = static_cast<int>(grid.size());
  if (grid.empty()) throw std::invalid_argument("einstein_residual: empty grid");

  const int d = spec.dim();
  std::vector<CurvatureReport> curv;
  curv.reserve(grid.size());
  double sum = 0.0;
  for (const auto& p : grid) {
    curv.push_back(curvature_at(spec, p));
    sum += curv.back().scalar / d;
  }
  rep.lambda_hat = sum / static_cast<double>(grid.size());

  double var = 0.0;
  double worst = 0.0;
  for (const auto& c : curv) {
    const double dev = c.scalar / d - rep.lambda_hat;
    var += dev * dev;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double r = c.ric(i, j) -
                         rep.lambda_hat * c.g[static_cast<size_t>(i) * d + j];
        worst = std::max(worst, std::fabs(r));
      }
  }
  rep.lambda_stddev = std::sqrt(var / static_cast<double>(grid.size()));
  rep.max_residual = worst;
  rep.pass = rep.max_residual < tol && rep.lambda_stddev < tol;
  return rep;
}

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

std::vector<std::vector<double>> grid_points(const MetricSpec& spec,
                                             const DomainBox& box, int n) {
  const int d = spec.dim();
  if (d > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
    throw std::invalid_argument("grid_points: dimension above 8 unsupported");
  if (n <= 0) throw std::invalid_argument("grid_points: need n > 0");

  std::vector<double> lo(d, kDefaultBoxLo), hi(d, kDefaultBoxHi);
  for (int i = 0; i < d; ++i) {
    auto it = box.find(spec.coords()[i]);
    if (it != box.end()) {
      lo[i] = it->second.first;
      hi[i] = it->second.second;
    }
  }

  std::vector<std::vector<double>> pts(static_cast<size_t>(n),
                                       std::vector<double>(d));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) {
      const double m = 1e-3 * (hi[i] - lo[i]);
      const double u = halton(j + 1, kPrimes[i]);
      pts[static_cast<size_t>(j)][i] = lo[i] + m + u * (hi[i] - lo[i] - 2 * m);
    }
  return pts;
}

double constant_curvature_residual(const CurvatureReport& rep, double kappa) {
  const int d = rep.dim;
  double worst = 0.0;
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          const double model =
              kappa * (rep.g[static_cast<size_t>(j) * d + k] * (l == i) -
                       rep.g[static_cast<size_t>(i) * d + k] * (l == j));
          worst = std::max(worst, std::fabs(rep.rm(l, i, j, k) - model));
        }
  return worst;
}

double max_abs_riemann(const CurvatureReport& rep) {
  double worst = 0.0;
  for (double v : rep.riemann) worst = std::max(worst, std::fabs(v));
  return worst;
}

double max_abs_ricci(const CurvatureReport& rep) {
  double worst = 0.0;
  for (double v : rep.ricci) worst = std::max(worst, std::fabs(v));
  return worst;
}

double default_tol() {
  if (const char* s = std::getenv("EINSTEIN_FORGE_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end != s && *end == '\0' && v > 0.0 && std::isfinite(v)) return v;
  }
  return kDefaultTol;
}

}  // namespace forge
