#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

// Order-2 truncated Taylor value: value, gradient, and symmetric Hessian with
// respect to a fixed chart of dimension dim(). The Hessian is stored as a
// packed upper triangle, so symmetry holds by construction. Arithmetic
// follows the order-2 chain rule; any NaN/Inf component aborts the enclosing
// evaluation with a DomainError.
class Jet2 {
 public:
  Jet2() = default;

  static Jet2 constant(double v, int dim) {
    Jet2 j;
    j.val_ = v;
    j.grad_.assign(static_cast<size_t>(dim), 0.0);
    j.hess_.assign(packed_size(dim), 0.0);
    j.check_finite("constant");
    return j;
  }

  double value() const { return val_; }
  int dim() const { return static_cast<int>(grad_.size()); }

  double grad(int i) const { return grad_[static_cast<size_t>(i)]; }
  double& grad(int i) { return grad_[static_cast<size_t>(i)]; }
  const std::vector<double>& gradient() const { return grad_; }

  double hess(int i, int j) const { return hess_[hidx(i, j)]; }
  double& hess(int i, int j) { return hess_[hidx(i, j)]; }

  double& value_ref() { return val_; }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r = a;
    for (size_t i = 0; i < r.grad_.size(); ++i) r.grad_[i] += b.grad_[i];
    for (size_t i = 0; i < r.hess_.size(); ++i) r.hess_[i] += b.hess_[i];
    r.val_ += b.val_;
    r.check_finite("add");
    return r;
  }

  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r = a;
    for (size_t i = 0; i < r.grad_.size(); ++i) r.grad_[i] -= b.grad_[i];
    for (size_t i = 0; i < r.hess_.size(); ++i) r.hess_[i] -= b.hess_[i];
    r.val_ -= b.val_;
    r.check_finite("sub");
    return r;
  }

  friend Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r.val_ = -r.val_;
    for (auto& g : r.grad_) g = -g;
    for (auto& h : r.hess_) h = -h;
    return r;
  }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int d = a.dim();
    Jet2 r = Jet2::constant(0.0, d);
    r.val_ = a.val_ * b.val_;
    for (int i = 0; i < d; ++i)
      r.grad(i) = a.val_ * b.grad(i) + b.val_ * a.grad(i);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        r.hess(i, j) = a.val_ * b.hess(i, j) + b.val_ * a.hess(i, j) +
                       a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i);
    r.check_finite("mul");
    return r;
  }

  friend Jet2 operator*(double c, const Jet2& a) {
    Jet2 r = a;
    r.val_ *= c;
    for (auto& g : r.grad_) g *= c;
    for (auto& h : r.hess_) h *= c;
    r.check_finite("scale");
    return r;
  }
  friend Jet2 operator*(const Jet2& a, double c) { return c * a; }

  friend Jet2 operator+(const Jet2& a, double c) {
    Jet2 r = a;
    r.val_ += c;
    r.check_finite("add");
    return r;
  }
  friend Jet2 operator+(double c, const Jet2& a) { return a + c; }
  friend Jet2 operator-(const Jet2& a, double c) { return a + (-c); }
  friend Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }

  // Applies a C^2 scalar function given its value and first two derivatives
  // at this jet's value: h = f''(x) g x g + f'(x) H.
  Jet2 compose(double f, double f1, double f2, const char* name) const {
    const int d = dim();
    Jet2 r = Jet2::constant(0.0, d);
    r.val_ = f;
    for (int i = 0; i < d; ++i) r.grad(i) = f1 * grad(i);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        r.hess(i, j) = f2 * grad(i) * grad(j) + f1 * hess(i, j);
    r.check_finite(name);
    return r;
  }

  void check_finite(const char* op) const {
    if (!std::isfinite(val_)) throw DomainError(op, val_, non_finite_msg(op));
    for (double g : grad_)
      if (!std::isfinite(g)) throw DomainError(op, g, non_finite_msg(op));
    for (double h : hess_)
      if (!std::isfinite(h)) throw DomainError(op, h, non_finite_msg(op));
  }

 private:
  static size_t packed_size(int d) {
    return static_cast<size_t>(d) * (static_cast<size_t>(d) + 1) / 2;
  }
  size_t hidx(int i, int j) const {
    if (i > j) std::swap(i, j);
    const size_t d = grad_.size();
    return static_cast<size_t>(i) * (2 * d - static_cast<size_t>(i) - 1) / 2 +
           static_cast<size_t>(j);
  }
  static std::string non_finite_msg(const char* op) {
    return std::string("non-finite jet component produced by '") + op + "'";
  }

  double val_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

// Seeds coordinate i of a chart of dimension point.size(): the gradient is
// the i-th basis vector, the Hessian vanishes.
inline Jet2 lift_coordinate(int i, const std::vector<double>& point) {
  const int d = static_cast<int>(point.size());
  if (i < 0 || i >= d)
    throw DomainError("lift_coordinate", static_cast<double>(i),
                      "coordinate index out of range");
  Jet2 j = Jet2::constant(point[static_cast<size_t>(i)], d);
  j.grad(i) = 1.0;
  return j;
}

enum class FnTag {
  Sin,
  Cos,
  Sinh,
  Cosh,
  Tanh,
  Exp,
  Log,
  Sqrt,
  Pow,   // x^c for real c, requires x > 0
  Neg,
  Recip,
  Abs,
};

inline const char* fn_name(FnTag f) {
  switch (f) {
    case FnTag::Sin: return "sin";
    case FnTag::Cos: return "cos";
    case FnTag::Sinh: return "sinh";
    case FnTag::Cosh: return "cosh";
    case FnTag::Tanh: return "tanh";
    case FnTag::Exp: return "exp";
    case FnTag::Log: return "log";
    case FnTag::Sqrt: return "sqrt";
    case FnTag::Pow: return "pow";
    case FnTag::Neg: return "neg";
    case FnTag::Recip: return "recip";
    case FnTag::Abs: return "abs";
  }
  return "?";
}

// Order-2 chain rule for the elementary function table. `c` is the exponent
// for Pow and ignored otherwise.
inline Jet2 jet_apply(FnTag f, const Jet2& x, double c = 0.0) {
  const double v = x.value();
  switch (f) {
    case FnTag::Sin:
      return x.compose(std::sin(v), std::cos(v), -std::sin(v), "sin");
    case FnTag::Cos:
      return x.compose(std::cos(v), -std::sin(v), -std::cos(v), "cos");
    case FnTag::Sinh:
      return x.compose(std::sinh(v), std::cosh(v), std::sinh(v), "sinh");
    case FnTag::Cosh:
      return x.compose(std::cosh(v), std::sinh(v), std::cosh(v), "cosh");
    case FnTag::Tanh: {
      const double t = std::tanh(v);
      const double s = 1.0 - t * t;
      return x.compose(t, s, -2.0 * t * s, "tanh");
    }
    case FnTag::Exp: {
      const double e = std::exp(v);
      return x.compose(e, e, e, "exp");
    }
    case FnTag::Log:
      if (v <= 0.0)
        throw DomainError("log", v, "log of a non-positive value");
      return x.compose(std::log(v), 1.0 / v, -1.0 / (v * v), "log");
    case FnTag::Sqrt:
      if (v <= 0.0)
        throw DomainError("sqrt", v, "sqrt of a non-positive value");
      {
        const double s = std::sqrt(v);
        return x.compose(s, 0.5 / s, -0.25 / (s * v), "sqrt");
      }
    case FnTag::Pow:
      if (v <= 0.0)
        throw DomainError("pow", v, "pow of a non-positive base");
      {
        const double p = std::pow(v, c);
        return x.compose(p, c * p / v, c * (c - 1.0) * p / (v * v), "pow");
      }
    case FnTag::Neg:
      return -x;
    case FnTag::Recip:
      if (v == 0.0) throw DomainError("recip", v, "reciprocal of zero");
      {
        const double r = 1.0 / v;
        return x.compose(r, -r * r, 2.0 * r * r * r, "recip");
      }
    case FnTag::Abs:
      if (v == 0.0)
        throw DomainError("abs", v, "abs is not differentiable at zero");
      return x.compose(std::fabs(v), v > 0.0 ? 1.0 : -1.0, 0.0, "abs");
  }
  throw DomainError("jet_apply", v, "unknown function tag");
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  return a * jet_apply(FnTag::Recip, b);
}
inline Jet2 operator/(double c, const Jet2& b) {
  return c * jet_apply(FnTag::Recip, b);
}
inline Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }

}  // namespace forge
