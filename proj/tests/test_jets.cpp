#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "forge/jets.hpp"

using forge::DomainError;
using forge::FnTag;
using forge::Jet2;
using forge::jet_apply;
using forge::lift_coordinate;

TEST_CASE("coordinate lift seeds the gradient and nothing else") {
  const std::vector<double> p{0.3, 0.7, -0.2};
  const Jet2 y = lift_coordinate(1, p);
  CHECK(y.dim() == 3);
  CHECK(y.value() == 0.7);
  for (int i = 0; i < 3; ++i) CHECK(y.grad(i) == (i == 1 ? 1.0 : 0.0));
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) CHECK(y.hess(i, j) == 0.0);
  CHECK_THROWS_AS(lift_coordinate(3, p), DomainError);
  CHECK_THROWS_AS(lift_coordinate(-1, p), DomainError);
}

TEST_CASE("product and sum match closed-form second derivatives") {
  // f(x, y) = sin(x) exp(y) + x^2 y at (0.7, -0.3)
  const std::vector<double> p{0.7, -0.3};
  const Jet2 x = lift_coordinate(0, p);
  const Jet2 y = lift_coordinate(1, p);
  const Jet2 f = jet_apply(FnTag::Sin, x) * jet_apply(FnTag::Exp, y) + x * x * y;

  const double sx = std::sin(0.7), cx = std::cos(0.7), ey = std::exp(-0.3);
  CHECK(f.value() == doctest::Approx(sx * ey + 0.49 * -0.3).epsilon(1e-14));
  CHECK(f.grad(0) == doctest::Approx(cx * ey + 2 * 0.7 * -0.3).epsilon(1e-14));
  CHECK(f.grad(1) == doctest::Approx(sx * ey + 0.49).epsilon(1e-14));
  CHECK(f.hess(0, 0) == doctest::Approx(-sx * ey + 2 * -0.3).epsilon(1e-14));
  CHECK(f.hess(0, 1) == doctest::Approx(cx * ey + 2 * 0.7).epsilon(1e-14));
  CHECK(f.hess(1, 1) == doctest::Approx(sx * ey).epsilon(1e-14));
  CHECK(f.hess(1, 0) == f.hess(0, 1));
}

TEST_CASE("quotient follows the chain rule through recip") {
  // f = x / y at (1.2, 0.8)
  const std::vector<double> p{1.2, 0.8};
  const Jet2 f = lift_coordinate(0, p) / lift_coordinate(1, p);
  CHECK(f.value() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f.grad(0) == doctest::Approx(1 / 0.8).epsilon(1e-14));
  CHECK(f.grad(1) == doctest::Approx(-1.2 / 0.64).epsilon(1e-14));
  CHECK(f.hess(0, 0) == doctest::Approx(0.0));
  CHECK(f.hess(0, 1) == doctest::Approx(-1 / 0.64).epsilon(1e-14));
  CHECK(f.hess(1, 1) == doctest::Approx(2 * 1.2 / 0.512).epsilon(1e-14));
}

TEST_CASE("elementary functions agree with central differences") {
  struct Case {
    FnTag tag;
    double (*fn)(double);
    double x0;
    double c;
  };
  const Case cases[] = {
      {FnTag::Sin, [](double v) { return std::sin(v); }, 0.4, 0.0},
      {FnTag::Cos, [](double v) { return std::cos(v); }, 0.4, 0.0},
      {FnTag::Sinh, [](double v) { return std::sinh(v); }, 0.4, 0.0},
      {FnTag::Cosh, [](double v) { return std::cosh(v); }, 0.4, 0.0},
      {FnTag::Tanh, [](double v) { return std::tanh(v); }, 0.4, 0.0},
      {FnTag::Exp, [](double v) { return std::exp(v); }, 0.4, 0.0},
      {FnTag::Log, [](double v) { return std::log(v); }, 0.7, 0.0},
      {FnTag::Sqrt, [](double v) { return std::sqrt(v); }, 0.7, 0.0},
      {FnTag::Pow, [](double v) { return std::pow(v, 2.5); }, 1.3, 2.5},
      {FnTag::Recip, [](double v) { return 1.0 / v; }, 0.7, 0.0},
      {FnTag::Abs, [](double v) { return std::fabs(v); }, -0.6, 0.0},
  };
  const double h = 1e-5;
  for (const auto& c : cases) {
    CAPTURE(forge::fn_name(c.tag));
    const std::vector<double> p{c.x0};
    const Jet2 j = jet_apply(c.tag, lift_coordinate(0, p), c.c);
    const double d1 = (c.fn(c.x0 + h) - c.fn(c.x0 - h)) / (2 * h);
    const double d2 =
        (c.fn(c.x0 + h) - 2 * c.fn(c.x0) + c.fn(c.x0 - h)) / (h * h);
    CHECK(j.value() == doctest::Approx(c.fn(c.x0)).epsilon(1e-14));
    CHECK(j.grad(0) == doctest::Approx(d1).epsilon(1e-8));
    CHECK(j.hess(0, 0) == doctest::Approx(d2).epsilon(1e-5));
  }
}

TEST_CASE("pow with real exponent uses the analytic rule") {
  const std::vector<double> p{1.3};
  const Jet2 j = jet_apply(FnTag::Pow, lift_coordinate(0, p), 2.5);
  CHECK(j.grad(0) == doctest::Approx(2.5 * std::pow(1.3, 1.5)).epsilon(1e-14));
  CHECK(j.hess(0, 0) ==
        doctest::Approx(2.5 * 1.5 * std::pow(1.3, 0.5)).epsilon(1e-14));
}

TEST_CASE("domain guards reject out-of-range arguments") {
  const std::vector<double> p{-1.0};
  const Jet2 neg = lift_coordinate(0, p);
  const Jet2 zero = Jet2::constant(0.0, 1);
  CHECK_THROWS_AS(jet_apply(FnTag::Log, neg), DomainError);
  CHECK_THROWS_AS(jet_apply(FnTag::Log, zero), DomainError);
  CHECK_THROWS_AS(jet_apply(FnTag::Sqrt, neg), DomainError);
  CHECK_THROWS_AS(jet_apply(FnTag::Pow, neg, 0.5), DomainError);
  CHECK_THROWS_AS(jet_apply(FnTag::Recip, zero), DomainError);
  CHECK_THROWS_AS(jet_apply(FnTag::Abs, zero), DomainError);
}

TEST_CASE("non-finite components abort the evaluation") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Jet2::constant(nan, 2), DomainError);
  // exp overflows to inf; the jet layer must not let it propagate.
  const std::vector<double> p{1000.0};
  CHECK_THROWS_AS(jet_apply(FnTag::Exp, lift_coordinate(0, p)), DomainError);
  // 0 * inf would poison a plain double path.
  const Jet2 big = Jet2::constant(1e308, 1);
  CHECK_THROWS_AS(big * Jet2::constant(1e308, 1), DomainError);
}

TEST_CASE("packed hessian exposes a symmetric view") {
  Jet2 j = Jet2::constant(1.0, 4);
  for (int i = 0; i < 4; ++i)
    for (int k = i; k < 4; ++k) j.hess(i, k) = 10.0 * i + k;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      CHECK(j.hess(i, k) == 10.0 * std::min(i, k) + std::max(i, k));
}

TEST_CASE("scalar mixing keeps gradients consistent") {
  const std::vector<double> p{0.9};
  const Jet2 x = lift_coordinate(0, p);
  const Jet2 f = 3.0 * x - (2.0 - x) + x / 2.0;  // 4.5x - 2
  CHECK(f.value() == doctest::Approx(4.5 * 0.9 - 2.0).epsilon(1e-14));
  CHECK(f.grad(0) == doctest::Approx(4.5).epsilon(1e-14));
  CHECK(f.hess(0, 0) == doctest::Approx(0.0));
}
