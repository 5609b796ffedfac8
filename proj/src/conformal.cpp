#include "forge/conformal.hpp"

#include <cmath>
#include <stdexcept>

#include "forge/errors.hpp"

namespace forge {

namespace {

Scope coord_scope(const MetricSpec& spec) {
  Scope s;
  for (int i = 0; i < spec.dim(); ++i) s.emplace(spec.coords()[i], i);
  return s;
}

void require_positive(double phi, const std::vector<double>& point) {
  if (!(phi > 0.0)) {
    DomainError err("conformal-factor", phi,
                    "conformal factor must be positive on the evaluation "
                    "domain");
    err.point = point;
    throw err;
  }
}

}  // namespace

ConformalPair make_conformal_pair(const MetricSpec& inner,
                                  const ExprPtr& phi) {
  ConformalPair pair;
  pair.inner = inner;
  pair.phi = phi;
  pair.n = inner.dim();
  check_symbols(phi, coord_scope(inner), "conformal factor");
  pair.outer =
      metric_from_ast(mk_conformal(ex_div(ex_num(1.0), phi), inner.ast()));
  return pair;
}

std::vector<double> conformal_ricci_delta(const ConformalPair& pair,
                                          const std::vector<double>& point) {
  const int d = pair.n;
  const HessianReport h = hessian_at(pair.phi, pair.inner, point);
  require_positive(h.value, point);
  const std::vector<double> g = pair.inner.eval_values(point);

  const double phi = h.value;
  const double inv2 = 1.0 / (phi * phi);
  const double trace_part = phi * h.laplacian - (d - 1) * h.grad_norm2;

  std::vector<double> delta(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const size_t t = static_cast<size_t>(i) * d + j;
      delta[t] = inv2 * ((d - 2) * phi * h.hessian[t] + trace_part * g[t]);
    }
  return delta;
}

ConformalEinsteinReport conformally_einstein_residual(
    const ConformalPair& pair, const std::vector<std::vector<double>>& grid,
    double tol) {
  ConformalEinsteinReport rep;
  rep.tol = tol;
  rep.grid_size = static_cast<int>(grid.size());
  if (grid.empty())
    throw std::invalid_argument("conformally_einstein_residual: empty grid");

  const int d = pair.n;
  double worst = 0.0;
  for (const auto& p : grid) {
    const CurvatureReport c = curvature_at(pair.inner, p);
    const HessianReport h = hessian_at(pair.phi, pair.inner, p);
    require_positive(h.value, p);
    const double ric_mean = c.scalar / d;
    const double hess_mean = h.laplacian / d;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const size_t t = static_cast<size_t>(i) * d + j;
        const double ric0 = c.ricci[t] - ric_mean * c.g[t];
        const double hess0 = h.hessian[t] - hess_mean * c.g[t];
        worst = std::max(std::fabs(h.value * ric0 + (d - 2) * hess0), worst);
      }
  }
  rep.max_residual = worst;
  rep.pass = worst < tol;
  return rep;
}

double power_hessian_check(const ExprPtr& phi, double c,
                           const MetricSpec& spec,
                           const std::vector<double>& point) {
  const int d = spec.dim();
  const HessianReport h = hessian_at(phi, spec, point);
  require_positive(h.value, point);
  const HessianReport hc =
      hessian_at(ex_pow(phi, ex_num(c)), spec, point);

  const double phi_c1 = std::pow(h.value, c - 1.0);
  const double phi_c2 = std::pow(h.value, c - 2.0);
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const size_t t = static_cast<size_t>(i) * d + j;
      const double model = c * phi_c1 * h.hessian[t] +
                           c * (c - 1.0) * phi_c2 * h.grad[i] * h.grad[j];
      worst = std::max(std::fabs(hc.hessian[t] - model), worst);
    }
  return worst;
}

QuasiEinsteinReport quasi_einstein_check(
    int n, const ExprPtr& phi, const MetricSpec& base,
    const std::vector<std::vector<double>>& grid, double tol) {
  if (n != base.dim())
    throw std::invalid_argument("quasi_einstein_check: n must equal dim");
  if (n < 3)
    throw std::invalid_argument("quasi_einstein_check: needs dim >= 3");
  if (grid.empty())
    throw std::invalid_argument("quasi_einstein_check: empty grid");

  QuasiEinsteinReport rep;
  rep.tol = tol;
  rep.grid_size = static_cast<int>(grid.size());
  rep.c = static_cast<double>(n - 1) / (n - 2);

  const MetricSpec outer = metric_from_ast(
      mk_conformal(ex_pow(phi, ex_num(-rep.c)), base.ast()));

  double pre_worst = 0.0, main_worst = 0.0, trace_worst = 0.0;
  rep.phibar.reserve(grid.size());
  for (const auto& p : grid) {
    const CurvatureReport cb = curvature_at(base, p);
    const HessianReport h = hessian_at(phi, base, p);
    require_positive(h.value, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const size_t t = static_cast<size_t>(i) * n + j;
        pre_worst = std::max(
            std::fabs(h.value * cb.ricci[t] + (n - 1) * h.hessian[t]),
            pre_worst);
      }

    const CurvatureReport co = curvature_at(outer, p);
    const double w = static_cast<double>(n - 2) / (n - 1);
    const double inv2 = 1.0 / (h.value * h.value);
    std::vector<double> T(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const size_t t = static_cast<size_t>(i) * n + j;
        T[t] = w * co.ricci[t] - inv2 * h.grad[i] * h.grad[j];
      }

    double tr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        tr += co.ginv[static_cast<size_t>(i) * n + j] *
              T[static_cast<size_t>(i) * n + j];
    const double phibar = tr / n;
    rep.phibar.push_back(phibar);

    for (size_t t = 0; t < T.size(); ++t)
      main_worst = std::max(std::fabs(T[t] - phibar * co.g[t]), main_worst);

    // Same trace through scalar curvature and the base-metric gradient norm.
    const double alt = (w * co.scalar -
                        std::pow(h.value, 2.0 * rep.c - 2.0) * h.grad_norm2) /
                       n;
    trace_worst = std::max(std::fabs(phibar - alt), trace_worst);
  }

  rep.precondition_residual = pre_worst;
  rep.precondition_pass = pre_worst < tol;
  rep.max_residual = main_worst;
  rep.trace_residual = trace_worst;
  rep.pass = main_worst < tol;
  return rep;
}

namespace {

struct Samples1D {
  // value, first and second derivative of a univariate expression at the
  // shared sample abscissae.
  std::vector<double> v, dv, ddv;
};

Samples1D sample_univariate(const ExprPtr& e, const char* what) {
  const auto syms = free_symbols(e);
  if (syms.size() > 1)
    throw std::invalid_argument(std::string(what) +
                                ": expected a univariate expression");
  Scope scope;
  if (!syms.empty()) scope.emplace(*syms.begin(), 0);

  Samples1D out;
  for (int i = 0; i < 8; ++i) {
    const double t = 0.27 + 0.31 * i;
    const Jet2 j = eval_jet(e, {t}, scope);
    out.v.push_back(j.value());
    out.dv.push_back(j.grad(0));
    out.ddv.push_back(j.hess(0, 0));
  }
  return out;
}

double spread(const std::vector<double>& xs) {
  double lo = xs[0], hi = xs[0];
  for (double x : xs) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

MainTheoremConstants main_theorem_constants(const ExprPtr& a, const ExprPtr& b,
                                            double ktilde, double eps1,
                                            double eps2, int n, int nstar) {
  if (std::fabs(eps1) != 1.0 || std::fabs(eps2) != 1.0)
    throw std::invalid_argument("main_theorem_constants: eps must be +1/-1");
  constexpr double kConstTol = 1e-8;

  MainTheoremConstants out;
  out.n = n;
  out.nstar = nstar;
  out.ktilde = ktilde;
  out.kstar = -ktilde;
  out.eps1 = eps1;
  out.eps2 = eps2;
  out.N = n + nstar - 1;

  const Samples1D sa = sample_univariate(a, "factor a");
  const Samples1D sb = sample_univariate(b, "factor b");

  std::vector<double> ca(8), cb(8), c1(8), c2(8);
  for (int i = 0; i < 8; ++i) {
    ca[i] = eps1 * sa.ddv[i] + ktilde * sa.v[i];
    cb[i] = eps2 * sb.ddv[i] + out.kstar * sb.v[i];
    c1[i] = sa.ddv[i] * sa.ddv[i] + eps1 * ktilde * sa.dv[i] * sa.dv[i];
    c2[i] = sb.ddv[i] * sb.ddv[i] + eps2 * out.kstar * sb.dv[i] * sb.dv[i];
  }
  double constancy = std::max(spread(ca), spread(cb));
  if (constancy > kConstTol)
    throw std::invalid_argument(
        "main_theorem_constants: a factor does not satisfy its oscillator "
        "equation with a constant right-hand side");
  if (std::fabs(mean(ca) - mean(cb)) > kConstTol)
    throw std::invalid_argument(
        "main_theorem_constants: the two factors disagree on the shared "
        "constant c");
  out.c = 0.5 * (mean(ca) + mean(cb));

  std::vector<double> d1(8), d2(8);
  for (int i = 0; i < 8; ++i) {
    d1[i] = eps1 * sa.dv[i] * sa.dv[i] + ktilde * sa.v[i] * sa.v[i] -
            2.0 * sa.v[i] * out.c;
    d2[i] = eps2 * sb.dv[i] * sb.dv[i] + out.kstar * sb.v[i] * sb.v[i] -
            2.0 * sb.v[i] * out.c;
  }
  constancy = std::max({constancy, spread(d1), spread(d2), spread(c1),
                        spread(c2)});
  if (constancy > kConstTol)
    throw std::invalid_argument(
        "main_theorem_constants: a first integral drifts across samples");

  out.constancy_residual = constancy;
  out.c1 = mean(c1);
  out.c2 = mean(c2);
  out.d1 = mean(d1);
  out.d2 = mean(d2);
  out.kbar = -(out.d1 + out.d2);
  out.lambda_bar = out.N * out.kbar;
  out.coupling_residual =
      std::max(std::fabs(out.c1 - (out.ktilde * out.d1 + out.c * out.c)),
               std::fabs(out.c2 - (out.kstar * out.d2 + out.c * out.c)));
  return out;
}

BlockStructureReport block_structure_check(
    const MetricSpec& spec, const ExprPtr& f,
    const std::vector<std::vector<double>>& grid, double tol) {
  const auto split = spec.left_block_dim();
  if (!split)
    throw std::invalid_argument(
        "block_structure_check: metric root must be product(...)");
  if (grid.empty())
    throw std::invalid_argument("block_structure_check: empty grid");

  BlockStructureReport rep;
  rep.tol = tol;
  rep.split = *split;
  rep.grid_size = static_cast<int>(grid.size());

  const int d = spec.dim();
  double worst = 0.0;
  for (const auto& p : grid) {
    const HessianReport h = hessian_at(f, spec, p);
    for (int i = 0; i < *split; ++i)
      for (int j = *split; j < d; ++j)
        worst = std::max(std::fabs(h.hessian[static_cast<size_t>(i) * d + j]),
                         worst);
  }
  rep.max_mixed = worst;
  rep.pass = worst < tol;
  return rep;
}

}  // namespace forge
