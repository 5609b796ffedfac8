#include "forge/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forge {

const char* to_string(CompletenessType t) {
  switch (t) {
    case CompletenessType::TypeI: return "TypeI";
    case CompletenessType::TypeII: return "TypeII";
    case CompletenessType::TypeIII: return "TypeIII";
    case CompletenessType::Classical: return "Classical";
    case CompletenessType::PeriodicEjiri: return "PeriodicEjiri";
    case CompletenessType::Degenerate: return "Degenerate";
  }
  return "?";
}

double warp_polynomial(int n, double kbar, double k, double c, double v) {
  return c - kbar * std::pow(v, n) + k * std::pow(v, n - 2);
}

namespace {

CompletenessVerdict classify_oscillator(double kbar, double k) {
  // c = 0: u'^2 + kbar u^2 = k, the classical closed forms.
  CompletenessVerdict v;
  v.type = CompletenessType::Classical;
  v.case_label = "c=0";
  if (kbar > 0.0 && k > 0.0) {
    v.classical_family = "trig";
    v.growth = "bounded";
    v.roots.push_back({std::sqrt(k / kbar), 1});
    v.u0 = v.roots.front().value;  // amplitude; the orbit also touches u = 0
  } else if (kbar < 0.0 && k > 0.0) {
    v.classical_family = "sinh";
    v.growth = "exponential";
    v.log_coefficient = 1.0 / std::sqrt(-kbar);
  } else if (kbar < 0.0 && k < 0.0) {
    v.classical_family = "cosh";
    v.growth = "exponential";
    v.log_coefficient = 1.0 / std::sqrt(-kbar);
    v.roots.push_back({std::sqrt(k / kbar), 1});
    v.u0 = v.roots.front().value;  // the minimum of the orbit
  } else if (kbar < 0.0 && k == 0.0) {
    v.classical_family = "exp";
    v.growth = "exponential";
    v.log_coefficient = 1.0 / std::sqrt(-kbar);
  } else if (kbar == 0.0 && k > 0.0) {
    v.classical_family = "linear";
    v.growth = "linear";
  } else {
    v.type = CompletenessType::Degenerate;
    v.case_label.clear();
    v.note = "u'^2 = k - kbar u^2 has no positive solution for these signs";
  }
  return v;
}

}  // namespace

CompletenessVerdict classify_warp(int n, double kbar, double k, double c) {
  if (n < 3) throw std::invalid_argument("classify_warp: need n >= 3");
  if (kbar == 0.0 && k == 0.0 && c == 0.0)
    throw std::invalid_argument(
        "classify_warp: kbar, k, c must not all vanish");
  if (!(std::isfinite(kbar) && std::isfinite(k) && std::isfinite(c)))
    throw std::invalid_argument("classify_warp: coefficients must be finite");

  if (c == 0.0) return classify_oscillator(kbar, k);

  CompletenessVerdict out;
  const auto P = [&](double v) { return warp_polynomial(n, kbar, k, c, v); };

  // Interior critical point of P; it splits (0, inf) into monotone halves.
  const bool has_vstar = k * kbar > 0.0;
  const double vstar = has_vstar ? std::sqrt(k * (n - 2) / (kbar * n)) : 0.0;

  if (has_vstar) {
    const double scale = std::fabs(c) + std::fabs(kbar) * std::pow(vstar, n) +
                         std::fabs(k) * std::pow(vstar, n - 2);
    if (std::fabs(P(vstar)) < 1e-9 * scale) {
      out.roots.push_back({vstar, 2});
      out.u0 = vstar;
      if (kbar < 0.0) {
        // P >= 0 with equality only at u0; the orbit climbs away from u0.
        out.type = CompletenessType::TypeI;
        out.case_label = "Case1";
        out.growth = "exponential";
        out.log_coefficient = 1.0 / std::sqrt(-kbar);
        out.case1_residual =
            std::fabs(c + 2.0 * kbar * std::pow(vstar, n) / (n - 2)) / scale;
      } else {
        out.type = CompletenessType::Degenerate;
        out.note =
            "P touches zero at an interior maximum; only the stationary "
            "orbit u = u0 exists";
      }
      return out;
    }
  }

  if (kbar == 0.0 && k == 0.0) {
    out.note = "P is the nonzero constant c; it has no positive root";
    return out;
  }

  // Push the right endpoint until the leading term dominates by 10x, so no
  // root can hide beyond it and the tail sign is the leading-term sign.
  double vmax = std::max(1.0, 2.0 * vstar);
  for (int i = 0; i < 300; ++i) {
    const double lead = kbar != 0.0 ? std::fabs(kbar) * std::pow(vmax, n)
                                    : std::fabs(k) * std::pow(vmax, n - 2);
    const double rest = kbar != 0.0
                            ? std::fabs(c) + std::fabs(k) * std::pow(vmax, n - 2)
                            : std::fabs(c);
    if (lead >= 10.0 * rest) break;
    vmax *= 2.0;
  }

  const auto bisect = [&](double lo, double hi) {
    double flo = lo == 0.0 ? c : P(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double fm = P(mid);
      if (fm == 0.0) return mid;
      if ((flo < 0.0) == (fm < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  std::vector<std::pair<double, double>> segs;
  if (has_vstar && vstar < vmax) {
    segs.emplace_back(0.0, vstar);
    segs.emplace_back(vstar, vmax);
  } else {
    segs.emplace_back(0.0, vmax);
  }
  for (const auto& [lo, hi] : segs) {
    const double flo = lo == 0.0 ? c : P(lo);
    const double fhi = P(hi);
    if ((flo < 0.0) != (fhi < 0.0)) out.roots.push_back({bisect(lo, hi), 1});
  }

  const bool tail_positive = P(vmax) > 0.0;

  if (out.roots.empty()) {
    out.type = CompletenessType::Degenerate;
    out.note = tail_positive
                   ? "P has no positive root; every orbit reaches u = 0 at "
                     "finite x with unbounded slope"
                   : "P < 0 for all v > 0; the orbit equation has no real "
                     "solution";
    return out;
  }

  if (out.roots.size() == 1) {
    out.case_label = "Case2";
    out.u0 = out.roots.front().value;
    if (!tail_positive) {
      out.type = CompletenessType::Degenerate;
      out.case_label.clear();
      out.note =
          "P > 0 only below its root; orbits reach u = 0 at finite x";
    } else if (kbar == 0.0) {
      out.type = CompletenessType::TypeII;
      out.growth = "linear";
    } else {
      out.type = CompletenessType::TypeIII;
      out.growth = "exponential";
      out.log_coefficient = 1.0 / std::sqrt(-kbar);
    }
    return out;
  }

  // Two simple roots u1 < u2.
  out.case_label = "Case3";
  if (kbar > 0.0) {
    out.type = CompletenessType::PeriodicEjiri;
    out.u0 = out.roots.front().value;
    out.growth = "bounded";
  } else {
    out.type = CompletenessType::TypeIII;
    out.u0 = out.roots.back().value;
    out.growth = "exponential";
    out.log_coefficient = 1.0 / std::sqrt(-kbar);
    out.note = "escape orbit above the larger root; the branch below the "
               "smaller root reaches u = 0";
  }
  return out;
}

namespace {

using Wide = __int128;

// Coefficients of (x + s)^m (x + t): binomials times a linear factor.
std::vector<Wide> shifted_power_times_linear(int m, long long s, long long t) {
  std::vector<Wide> binom(static_cast<size_t>(m) + 1, 0);
  binom[0] = 1;
  for (int row = 1; row <= m; ++row)
    for (int j = row; j > 0; --j) binom[j] += binom[j - 1];
  // (x + s)^m = sum_i binom[i] s^(m-i) x^i
  std::vector<Wide> base(static_cast<size_t>(m) + 1, 0);
  for (int i = 0; i <= m; ++i) {
    Wide coef = binom[i];
    for (int p = 0; p < m - i; ++p) coef *= s;
    base[i] = coef;
  }
  std::vector<Wide> out(static_cast<size_t>(m) + 2, 0);
  for (int i = 0; i <= m; ++i) {
    out[i + 1] += base[i];      // x * x^i
    out[i] += base[i] * t;      // t * x^i
  }
  return out;
}

}  // namespace

DropLemmaReport drop_polynomial(int m) {
  if (m < 2) throw std::invalid_argument("drop_polynomial: need m >= 2");
  if (m > 60)
    throw std::invalid_argument(
        "drop_polynomial: coefficients overflow 128-bit integers past m = 60");

  const auto lhs = shifted_power_times_linear(m, -1, m);
  const auto rhs = shifted_power_times_linear(m, +1, -m);

  DropLemmaReport rep;
  rep.m = m;
  rep.coeffs.assign(static_cast<size_t>(m) - 1, 0);  // degree m-2
  for (int i = 0; i <= m + 1; ++i) {
    const Wide a = lhs[i] - rhs[i];
    if (i <= m - 2) {
      rep.coeffs[i] = a;
    } else if (a != 0) {
      throw std::logic_error("drop_polynomial: degree exceeds m - 2");
    }
  }

  rep.all_nonnegative = true;
  rep.parity_positive = true;
  for (int i = 0; i <= m - 2; ++i) {
    const Wide a = rep.coeffs[i];
    if (a < 0) rep.all_nonnegative = false;
    const bool same_parity = ((m - i) % 2) == 0;
    if (same_parity ? a <= 0 : a != 0) rep.parity_positive = false;
  }
  rep.no_positive_zero = rep.all_nonnegative && rep.parity_positive;

  if (m >= 3) {
    const auto prev = shifted_power_times_linear(m - 1, -1, m - 1);
    const auto prev2 = shifted_power_times_linear(m - 1, +1, -(m - 1));
    rep.recursion_ok = true;
    for (int i = 0; i <= m - 3; ++i) {
      const Wide deriv = rep.coeffs[i + 1] * (i + 1);
      const Wide scaled = (prev[i] - prev2[i]) * (m + 1);
      if (deriv != scaled) rep.recursion_ok = false;
    }
  }
  return rep;
}

std::string int128_to_string(__int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

DropInstance drop_instance(int n, double alpha, double beta) {
  if (n < 3) throw std::invalid_argument("drop_instance: need n >= 3");
  if (!(alpha * beta > 0.0))
    throw std::invalid_argument("drop_instance: need alpha * beta > 0");

  DropInstance d;
  d.n = n;
  d.alpha = alpha;
  d.beta = beta;
  d.y = std::sqrt(1.0 + (n - 2) * n * alpha * beta);
  d.a = (d.y - 1.0) / (n * beta);
  d.b = (d.y + 1.0) / (n * beta);
  d.gamma_a = -(2.0 * std::pow(d.a, n - 1) / (n - 2)) * (beta * d.a + 1.0);
  d.gamma_b = (2.0 * std::pow(d.b, n - 1) / (n - 2)) * (1.0 - beta * d.b);

  const auto g = [&](double x, double gamma) {
    return alpha - beta * x * x + gamma * std::pow(x, 2 - n);
  };
  const auto ddu = [&](double x, double gamma) {
    return -beta * x - 0.5 * (n - 2) * gamma * std::pow(x, 1 - n);
  };
  d.g_at_a = g(d.a, d.gamma_a);
  d.g_at_b = g(d.b, d.gamma_b);
  d.ddu_at_a = ddu(d.a, d.gamma_a);
  d.ddu_at_b = ddu(d.b, d.gamma_b);

  const auto phi = drop_polynomial(n - 1);
  double acc = 0.0;
  for (int i = static_cast<int>(phi.coeffs.size()) - 1; i >= 0; --i)
    acc = acc * d.y + static_cast<double>(phi.coeffs[i]);
  d.phi_at_y = acc;

  const double gscale = std::fabs(alpha) + std::fabs(beta) * d.a * d.a +
                        std::fabs(d.gamma_a) * std::pow(d.a, 2 - n);
  d.consistent = std::fabs(d.g_at_a) <= 1e-10 * gscale &&
                 std::fabs(d.g_at_b) <= 1e-10 * gscale &&
                 std::fabs(d.gamma_a - d.gamma_b) >
                     1e-10 * (std::fabs(d.gamma_a) + std::fabs(d.gamma_b)) &&
                 d.phi_at_y > 0.0;
  return d;
}

}  // namespace forge
