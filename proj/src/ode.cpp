#include "forge/ode.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "forge/curvature.hpp"
#include "forge/quadrature.hpp"

namespace forge {

namespace {

using State = std::vector<double>;
using Rhs = std::function<void(double, const State&, State&)>;
using Monitor = std::function<void(const State&, State&)>;

struct RunConfig {
  Rhs rhs;
  Monitor monitor;
  int state_dim = 0;
  int monitor_dim = 0;
  int event_component = -1;  // zero crossings of this state slot get logged
  std::function<bool(const State&)> stop;
  std::string stop_reason;
};

void rk4_step(const Rhs& f, double t, double h, State& y, State& k1, State& k2,
              State& k3, State& k4, State& tmp) {
  const size_t d = y.size();
  f(t, y, k1);
  for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  f(t + 0.5 * h, tmp, k2);
  for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  f(t + 0.5 * h, tmp, k3);
  for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
  f(t + h, tmp, k4);
  for (size_t i = 0; i < d; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void run(OdeTrajectory& tr, const RunConfig& cfg, double t0, double t1,
         double step, State y) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("need t1 > t0");

  const long long n = std::max(1LL, std::llround((t1 - t0) / step));
  const double h = (t1 - t0) / static_cast<double>(n);

  State inv(static_cast<size_t>(cfg.monitor_dim));
  State inv0(static_cast<size_t>(cfg.monitor_dim));
  cfg.monitor(y, inv0);
  tr.drift.assign(static_cast<size_t>(cfg.monitor_dim), 0.0);

  tr.param.push_back(t0);
  tr.states.push_back(y);
  tr.invariants.push_back(inv0);

  State k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
  double prev_ev = cfg.event_component >= 0
                       ? y[static_cast<size_t>(cfg.event_component)]
                       : 0.0;
  for (long long i = 1; i <= n; ++i) {
    const double t_prev = t0 + static_cast<double>(i - 1) * h;
    rk4_step(cfg.rhs, t_prev, h, y, k1, k2, k3, k4, tmp);
    const double t = t0 + static_cast<double>(i) * h;

    if (cfg.stop && cfg.stop(y)) {
      tr.truncated = true;
      tr.truncation_reason = cfg.stop_reason;
      break;
    }

    cfg.monitor(y, inv);
    for (int j = 0; j < cfg.monitor_dim; ++j) {
      const size_t sj = static_cast<size_t>(j);
      tr.drift[sj] = std::max(tr.drift[sj], std::fabs(inv[sj] - inv0[sj]));
    }

    if (cfg.event_component >= 0) {
      const double cur = y[static_cast<size_t>(cfg.event_component)];
      if ((prev_ev < 0.0 && cur > 0.0) || (prev_ev > 0.0 && cur < 0.0)) {
        // linear interpolation of the crossing parameter
        tr.events.push_back(t_prev + h * prev_ev / (prev_ev - cur));
      } else if (cur == 0.0 && prev_ev != 0.0) {
        tr.events.push_back(t);
      }
      prev_ev = cur;
    }

    tr.param.push_back(t);
    tr.states.push_back(y);
    tr.invariants.push_back(inv);
  }
}

void check_pm1(double eps, const char* what) {
  if (eps != 1.0 && eps != -1.0)
    throw std::invalid_argument(std::string(what) + " must be +1 or -1");
}

Scope univariate_scope(const ExprPtr& e, const std::string& var,
                       const char* what) {
  for (const auto& s : free_symbols(e))
    if (s != var)
      throw std::invalid_argument(std::string(what) +
                                  ": expression must depend only on " + var);
  Scope scope;
  scope.emplace(var, 0);
  return scope;
}

}  // namespace

void write_csv(const OdeTrajectory& tr, std::ostream& os) {
  os << "param";
  for (const auto& s : tr.state_names) os << ',' << s;
  for (const auto& s : tr.invariant_names) os << ',' << s;
  os << '\n';
  for (size_t r = 0; r < tr.param.size(); ++r) {
    os << format_double(tr.param[r]);
    for (double v : tr.states[r]) os << ',' << format_double(v);
    for (double v : tr.invariants[r]) os << ',' << format_double(v);
    os << '\n';
  }
}

BrinkmannResult solve_brinkmann(const BrinkmannProblem& p, double t0,
                                double t1, double step) {
  check_pm1(p.eps, "eps");

  RunConfig cfg;
  const double ek = p.eps * p.k;
  cfg.state_dim = 3;
  cfg.monitor_dim = 1;
  cfg.rhs = [ek](double, const State& y, State& dy) {
    dy[0] = y[1];
    dy[1] = y[2];
    dy[2] = -ek * y[1];
  };
  cfg.monitor = [&p](const State& y, State& inv) {
    inv[0] = y[2] * y[2] + p.eps * p.k * y[1] * y[1];
  };

  BrinkmannResult out;
  out.traj.state_names = {"phi", "dphi", "ddphi"};
  out.traj.invariant_names = {"kstar_integral"};
  run(out.traj, cfg, t0, t1, step, {p.phi0, p.dphi0, p.ddphi0});
  out.kstar = p.eps * out.traj.invariants.front()[0];
  out.traj.tag = ek > 0.0 ? "trig" : (ek < 0.0 ? "hyperbolic" : "linear");
  return out;
}

OdeTrajectory solve_ft(const FtProblem& p, double t0, double t1, double step) {
  check_pm1(p.eps, "eps");
  const double kbar0 = p.kstar * p.f0 * p.f0 - p.eps * p.df0 * p.df0;
  if (std::fabs(kbar0 - p.kbar) > 1e-12)
    throw std::invalid_argument(
        "solve_ft: initial data inconsistent with declared kbar");

  RunConfig cfg;
  cfg.state_dim = 2;
  cfg.monitor_dim = 1;
  cfg.rhs = [&p](double, const State& y, State& dy) {
    dy[0] = y[1];
    dy[1] = p.eps * p.kstar * y[0];
  };
  cfg.monitor = [&p](const State& y, State& inv) {
    inv[0] = p.kstar * y[0] * y[0] - p.eps * y[1] * y[1];
  };

  OdeTrajectory tr;
  tr.state_names = {"f", "df"};
  tr.invariant_names = {"kbar_integral"};
  run(tr, cfg, t0, t1, step, {p.f0, p.df0});

  struct Row {
    double f0, df0, kstar;
    const char* tag;
  };
  static constexpr Row kTable[] = {
      {1, 0, 1, "cosh"},         {1, 0, -1, "cos"}, {1, 0, 0, "const"},
      {1, 1, 1, "exp"},          {1, 1, 0, "linear"},
      {1, 1, 2, "mixed-exp(sqrt2)"},
      {0, 1, 1, "sinh"},         {0, 1, -1, "sin"}, {0, 1, 0, "t"},
  };
  if (p.eps == 1.0)
    for (const Row& r : kTable)
      if (std::fabs(p.f0 - r.f0) <= 1e-12 && std::fabs(p.df0 - r.df0) <= 1e-12 &&
          std::fabs(p.kstar - r.kstar) <= 1e-12) {
        tr.tag = r.tag;
        break;
      }
  return tr;
}

OdeTrajectory solve_extremal(const ExtremalSurfaceParams& p, double t0,
                             double t1, double step) {
  const double d0 =
      p.dK0 * p.dK0 - (p.c * p.K0 - p.K0 * p.K0 * p.K0 / 3.0 + p.d);
  if (std::fabs(d0) > 1e-12)
    throw std::invalid_argument(
        "solve_extremal: initial data inconsistent with declared (c, d)");

  RunConfig cfg;
  cfg.state_dim = 3;
  cfg.monitor_dim = 2;
  cfg.event_component = 1;  // K' = 0: revolution chart degenerates
  cfg.rhs = [](double, const State& y, State& dy) {
    dy[0] = y[1];
    dy[1] = y[2];
    dy[2] = -y[0] * y[1];
  };
  cfg.monitor = [&p](const State& y, State& inv) {
    inv[0] = 2.0 * y[2] + y[0] * y[0];
    inv[1] = y[1] * y[1] - p.c * y[0] + y[0] * y[0] * y[0] / 3.0;
  };

  OdeTrajectory tr;
  tr.state_names = {"K", "dK", "ddK"};
  tr.invariant_names = {"c_integral", "d_integral"};
  run(tr, cfg, t0, t1, step, {p.K0, p.dK0, 0.5 * (p.c - p.K0 * p.K0)});
  return tr;
}

MetricSpec extremal_metric(const ExprPtr& K) {
  univariate_scope(K, "t", "extremal_metric");
  const ExprPtr dK = derivative(K, "t");
  return metric_from_ast(
      mk_diag({"t", "x"}, {1, 1}, {ex_num(1.0), ex_mul(dK, dK)}));
}

double extremal_ode_residual(const ExprPtr& K, double t) {
  const Scope scope = univariate_scope(K, "t", "extremal_ode_residual");
  const ExprPtr k1 = derivative(K, "t");
  const ExprPtr k3 = derivative(derivative(k1, "t"), "t");
  return eval_value(k3, {t}, scope) +
         eval_value(K, {t}, scope) * eval_value(k1, {t}, scope);
}

namespace {

double warp_first_integral(const IteratedWarpProblem& p, double u, double du) {
  return std::pow(u, p.n - 2) *
         (du * du + (2.0 * p.d / p.n) * u * u - p.k);
}

double warp_oscillator_integral(const IteratedWarpProblem& p, double u,
                                double du) {
  const double w = std::pow(u, 0.5 * p.n);
  const double dw = 0.5 * p.n * std::pow(u, 0.5 * p.n - 1.0) * du;
  return dw * dw + 0.5 * p.d * p.n * w * w -
         0.25 * p.k * p.n * p.n * std::pow(u, p.n - 2);
}

}  // namespace

IteratedWarpResult solve_iterated_warp(const IteratedWarpProblem& p,
                                       double x0, double x1, double step) {
  if (p.n < 3) throw std::invalid_argument("solve_iterated_warp: need n >= 3");
  if (!(p.u0 > 0.0))
    throw std::invalid_argument("solve_iterated_warp: need u0 > 0");

  IteratedWarpResult out;
  out.kbar = 2.0 * p.d / p.n;
  out.c = warp_first_integral(p, p.u0, p.du0);
  out.e = warp_oscillator_integral(p, p.u0, p.du0);
  if (p.c && std::fabs(*p.c - out.c) > 1e-10)
    throw std::invalid_argument(
        "solve_iterated_warp: initial data inconsistent with declared c");
  if (p.e && std::fabs(*p.e - out.e) > 1e-10)
    throw std::invalid_argument(
        "solve_iterated_warp: initial data inconsistent with declared e");

  RunConfig cfg;
  cfg.state_dim = 2;
  cfg.monitor_dim = 2;
  cfg.event_component = 1;  // u' = 0: warped chart degenerates
  cfg.rhs = [&p](double, const State& y, State& dy) {
    dy[0] = y[1];
    dy[1] = (0.5 * p.k * (p.n - 2) - p.d * y[0] * y[0] -
             0.5 * (p.n - 2) * y[1] * y[1]) /
            y[0];
  };
  cfg.monitor = [&p](const State& y, State& inv) {
    inv[0] = warp_first_integral(p, y[0], y[1]);
    inv[1] = warp_oscillator_integral(p, y[0], y[1]);
  };
  cfg.stop = [](const State& y) { return y[0] <= 1e-9; };
  cfg.stop_reason = "u reached 0";

  out.traj.state_names = {"u", "du"};
  out.traj.invariant_names = {"first_integral", "oscillator_integral"};
  run(out.traj, cfg, x0, x1, step, {p.u0, p.du0});
  return out;
}

MetricNodePtr fiber_for(int n, double k) {
  const int m = n - 1;
  if (m < 2) throw std::invalid_argument("fiber_for: need n >= 3");
  if (k == 0.0) return mk_flat(m);
  if (k == 1.0) return mk_sphere(m);
  if (k == -1.0) return mk_hyperbolic(m);
  const ExprPtr factor = ex_call("sqrt", ex_num(1.0 / std::fabs(k)));
  return k > 0.0 ? mk_conformal(factor, mk_sphere(m))
                 : mk_conformal(factor, mk_hyperbolic(m));
}

MetricSpec iterated_warp_metric(const ExprPtr& u, int n, double k,
                                int eps_t) {
  if (eps_t != 1 && eps_t != -1)
    throw std::invalid_argument("iterated_warp_metric: eps_t must be +1/-1");
  univariate_scope(u, "x", "iterated_warp_metric");
  const ExprPtr du = derivative(u, "x");
  const MetricNodePtr base = mk_diag({"x"}, {1}, {ex_num(1.0)});
  const MetricNodePtr with_t =
      mk_warped(base, du, mk_diag({"t"}, {eps_t}, {ex_num(1.0)}));
  return metric_from_ast(mk_warped(with_t, u, fiber_for(n, k)));
}

double iterated_warp_residual(const ExprPtr& u, int n, double k, double x) {
  const Scope scope = univariate_scope(u, "x", "iterated_warp_residual");
  const ExprPtr u1 = derivative(u, "x");
  const ExprPtr u2 = derivative(u1, "x");
  const ExprPtr u3 = derivative(u2, "x");
  const double v = eval_value(u, {x}, scope);
  const double d1 = eval_value(u1, {x}, scope);
  const double d2 = eval_value(u2, {x}, scope);
  const double d3 = eval_value(u3, {x}, scope);
  return v * v * d3 + (n - 3) * v * d1 * d2 - (n - 2) * d1 * d1 * d1 +
         k * (n - 2) * d1;
}

ConfProductReport conf_product_residual(
    const ExprPtr& phi, const MetricSpec& g_star, int n, double kbar,
    const std::vector<std::vector<double>>& grid, double tol) {
  if (n != g_star.dim())
    throw std::invalid_argument("conf_product_residual: n must equal dim");
  if (n < 2)
    throw std::invalid_argument("conf_product_residual: needs dim >= 2");
  if (grid.empty())
    throw std::invalid_argument("conf_product_residual: empty grid");

  ConfProductReport rep;
  rep.tol = tol;
  rep.grid_size = static_cast<int>(grid.size());

  double kmin = 0.0, kmax = 0.0, ksum = 0.0;
  bool first = true;
  for (const auto& pt : grid) {
    const CurvatureReport c = curvature_at(g_star, pt);
    const HessianReport h = hessian_at(phi, g_star, pt);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const size_t t = static_cast<size_t>(i) * n + j;
        rep.eq1_residual =
            std::max(std::fabs(h.value * c.ricci[t] + (n - 1) * h.hessian[t]),
                     rep.eq1_residual);
      }
    const double kstar = c.scalar / (static_cast<double>(n) * (n - 1));
    rep.eq2_residual = std::max(
        std::fabs(h.grad_norm2 + h.value * h.value * kstar + kbar),
        rep.eq2_residual);
    ksum += kstar;
    kmin = first ? kstar : std::min(kmin, kstar);
    kmax = first ? kstar : std::max(kmax, kstar);
    first = false;
  }
  rep.kstar = ksum / static_cast<double>(grid.size());
  rep.kstar_spread = kmax - kmin;
  rep.eq1_pass = rep.eq1_residual < tol;
  rep.eq2_pass = rep.eq2_residual < tol;
  return rep;
}

CorvinoReport corvino_residual(const ExprPtr& f, const MetricSpec& g_star,
                               const std::vector<std::vector<double>>& grid,
                               double tol) {
  if (grid.empty())
    throw std::invalid_argument("corvino_residual: empty grid");

  CorvinoReport rep;
  rep.tol = tol;
  rep.grid_size = static_cast<int>(grid.size());

  const int n = g_star.dim();
  for (const auto& pt : grid) {
    const CurvatureReport c = curvature_at(g_star, pt);
    const HessianReport h = hessian_at(f, g_star, pt);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const size_t t = static_cast<size_t>(i) * n + j;
        rep.max_residual =
            std::max(std::fabs(h.value * c.ricci[t] - h.hessian[t] +
                               h.laplacian * c.g[t]),
                     rep.max_residual);
      }
    rep.trace_residual =
        std::max(std::fabs(h.value * c.scalar + (n - 1) * h.laplacian),
                 rep.trace_residual);
  }
  rep.pass = rep.max_residual < tol;
  return rep;
}

QuadratureXU quadrature_x_of_u(const IteratedWarpProblem& p, double u0,
                               double u) {
  if (p.n < 3) throw std::invalid_argument("quadrature_x_of_u: need n >= 3");
  if (!(u0 > 0.0))
    throw std::invalid_argument("quadrature_x_of_u: need u0 > 0");
  if (!(u > u0)) throw std::invalid_argument("quadrature_x_of_u: need u > u0");

  const double kbar = 2.0 * p.d / p.n;
  const double c = p.c ? *p.c : warp_first_integral(p, p.u0, p.du0);
  const auto P = [&](double v) {
    return c - kbar * std::pow(v, p.n) + p.k * std::pow(v, p.n - 2);
  };
  const double scale = std::fabs(c) + std::fabs(kbar) * std::pow(u0, p.n) +
                       std::fabs(p.k) * std::pow(u0, p.n - 2);
  const double p_at_root = P(u0);
  if (std::fabs(p_at_root) > 1e-8 * scale)
    throw std::invalid_argument("quadrature_x_of_u: u0 is not a root of P");

  QuadratureXU out;
  const double dP =
      std::pow(u0, p.n - 3) * (p.k * (p.n - 2) - kbar * p.n * u0 * u0);
  if (std::fabs(dP) * u0 < 1e-9 * scale) {
    // order-two root: the integral from u0 is infinite, and for large u
    // x(u) grows like log(u)/sqrt(-kbar)
    if (!(-kbar > 0.0))
      throw std::invalid_argument(
          "quadrature_x_of_u: double root requires kbar < 0");
    out.diverges = true;
    out.log_coefficient = 1.0 / std::sqrt(-kbar);
    return out;
  }

  // v = u0 + s^2 removes the 1/sqrt endpoint factor; subtracting the root
  // residue keeps the radicand from going negative by rounding near s = 0.
  const auto integrand = [&](double s) {
    const double v = u0 + s * s;
    const double radicand = P(v) - p_at_root;
    if (!(radicand > 0.0))
      throw std::invalid_argument(
          "quadrature_x_of_u: P is not positive inside (u0, u]");
    return 2.0 * s * std::sqrt(std::pow(v, p.n - 2) / radicand);
  };
  const QuadratureResult q =
      integrate(integrand, 0.0, std::sqrt(u - u0), 1e-13, 1e-11);
  out.x = q.value;
  out.error_estimate = q.error_estimate;
  out.evaluations = q.evaluations;
  return out;
}

}  // namespace forge
