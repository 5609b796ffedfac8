#pragma once

#include <string>
#include <vector>

namespace forge {

// Orbit classification for positive solutions of
//   u'^2 = u^(2-n) P(u),   P(v) = c - kbar v^n + k v^(n-2).
// P' = v^(n-3) (k(n-2) - kbar n v^2) has at most one positive zero, so P
// has at most two simple positive roots or exactly one double root, and
// every root lies on a monotone segment of P.
//
//   TypeI          one double root u0; u decreases to u0 one way and grows
//                  like exp(sqrt(-kbar) x) the other
//   TypeII         one simple root, kbar = 0, asymptotically linear in x
//   TypeIII        escape from a simple root with kbar < 0, exponential
//   Classical      c = 0; the explicit oscillator families
//   PeriodicEjiri  two simple roots u1 < u2, orbit oscillates in [u1, u2]
//   Degenerate     no orbit that stays positive and bounded away from 0
enum class CompletenessType {
  TypeI,
  TypeII,
  TypeIII,
  Classical,
  PeriodicEjiri,
  Degenerate,
};

const char* to_string(CompletenessType t);

struct RootInfo {
  double value = 0.0;
  int order = 1;
};

struct CompletenessVerdict {
  CompletenessType type = CompletenessType::Degenerate;
  std::vector<RootInfo> roots;   // positive roots of P, ascending
  std::string case_label;        // "Case1" | "Case2" | "Case3"; "c=0" else ""
  std::string classical_family;  // trig | sinh | cosh | exp | linear
  double u0 = 0.0;               // orbit anchor root (0 when none exists)
  std::string growth;            // "bounded" | "linear" | "exponential"
  double log_coefficient = 0.0;  // x(u) ~ log(u)/sqrt(-kbar), Types I and III
  double case1_residual = 0.0;   // |c + 2 kbar u0^n/(n-2)| / scale at a double root
  std::string note;
};

double warp_polynomial(int n, double kbar, double k, double c, double v);

// n >= 3; (kbar, k, c) must not all vanish. Roots are bracketed on the
// monotone segments split at v* = sqrt(k(n-2)/(kbar n)) and bisected to
// machine width; |P(v*)| < 1e-9 * scale flags a double root.
CompletenessVerdict classify_warp(int n, double kbar, double k, double c);

// Obstruction polynomial phi_m(x) = (x-1)^m (x+m) - (x+1)^m (x-m) of
// degree m-2. Every coefficient is a nonnegative integer and those of
// parity m are positive, so phi_m has no positive zero. Exact in 128-bit
// integers up to m = 60.
struct DropLemmaReport {
  int m = 0;
  std::vector<__int128> coeffs;  // a_0 .. a_(m-2)
  bool all_nonnegative = false;
  bool parity_positive = false;  // a_k > 0 exactly when k == m (mod 2)
  bool no_positive_zero = false;
  bool recursion_ok = true;      // phi_m' == (m+1) phi_(m-1), exact (m >= 3)
};

DropLemmaReport drop_polynomial(int m);  // 2 <= m <= 60

std::string int128_to_string(__int128 v);

// Normalization data for u'^2 = alpha - beta u^2 + gamma u^(2-n) on an
// orbit with minimum value A and maximum value B. Requiring u'' = +1 at
// the minimum forces gamma_a, requiring u'' = -1 at the maximum forces
// gamma_b, and the two never agree: equality would make
// y = sqrt(1 + (n-2) n alpha beta) a positive zero of phi_(n-1).
struct DropInstance {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double y = 0.0;
  double a = 0.0;         // minimum value A = (y - 1)/(n beta)
  double b = 0.0;         // maximum value B = (y + 1)/(n beta)
  double gamma_a = 0.0;   // -(2 A^(n-1)/(n-2)) (beta A + 1)
  double gamma_b = 0.0;   // +(2 B^(n-1)/(n-2)) (1 - beta B)
  double g_at_a = 0.0;    // alpha - beta A^2 + gamma_a A^(2-n), ~0
  double g_at_b = 0.0;    // same at B with gamma_b, ~0
  double ddu_at_a = 0.0;  // u'' at the minimum from gamma_a, ~ +1
  double ddu_at_b = 0.0;  // u'' at the maximum from gamma_b, ~ -1
  double phi_at_y = 0.0;  // phi_(n-1)(y) > 0
  // Both g residuals vanish, gamma_a != gamma_b, and phi_(n-1)(y) > 0.
  bool consistent = false;
};

DropInstance drop_instance(int n, double alpha, double beta);  // alpha*beta > 0

}  // namespace forge
