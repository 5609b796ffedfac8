#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "forge/curvature.hpp"
#include "oracle_fd.hpp"

using namespace forge;

TEST_CASE("round spheres satisfy Ric = (n-1) g exactly") {
  for (int n : {2, 3, 4}) {
    CAPTURE(n);
    const MetricSpec spec = parse_metric("sphere(" + std::to_string(n) + ")");
    for (const auto& p : grid_points(spec, {}, 16)) {
      const CurvatureReport rep = curvature_at(spec, p);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          CHECK(rep.ric(i, j) == doctest::Approx((n - 1) * rep.g[i * n + j])
                                     .epsilon(1e-12));
      CHECK(rep.scalar == doctest::Approx(n * (n - 1)).epsilon(1e-12));
      CHECK(constant_curvature_residual(rep, 1.0) < 1e-12);
      CHECK(rep.bianchi_residual < 1e-12);
    }
  }
}

TEST_CASE("hyperbolic space has curvature -1") {
  const MetricSpec spec = parse_metric("hyperbolic(3)");
  for (const auto& p : grid_points(spec, {}, 8)) {
    const CurvatureReport rep = curvature_at(spec, p);
    CHECK(constant_curvature_residual(rep, -1.0) < 1e-12);
    CHECK(rep.scalar == doctest::Approx(-6.0).epsilon(1e-12));
  }
}

TEST_CASE("flat charts have vanishing Riemann tensor") {
  for (const char* text : {"flat(4)", "flat(4;-1,+1,+1,+1)"}) {
    const MetricSpec spec = parse_metric(text);
    for (const auto& p : grid_points(spec, {}, 4))
      CHECK(max_abs_riemann(curvature_at(spec, p)) == 0.0);
  }
}

TEST_CASE("plane waves expose the transverse laplacian in Ric_uu") {
  const MetricSpec harmonic = parse_metric("ppwave(H=x^2-y^2)");
  for (const auto& p : grid_points(harmonic, {}, 16))
    CHECK(max_abs_ricci(curvature_at(harmonic, p)) < 1e-12);

  const MetricSpec wave = parse_metric("ppwave(H=x^2+y^2)");
  for (const auto& p : grid_points(wave, {}, 16)) {
    const CurvatureReport rep = curvature_at(wave, p);
    CHECK(rep.ric(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != 0 || j != 0) CHECK(std::fabs(rep.ric(i, j)) < 1e-12);
  }

  const MetricSpec quartic = parse_metric("ppwave(H=x^4+y^2)");
  for (const auto& p : grid_points(quartic, {}, 8)) {
    const double want = 12.0 * p[2] * p[2] + 2.0;
    CHECK(curvature_at(quartic, p).ric(0, 0) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("projective plane is Einstein with lambda 6") {
  const MetricSpec spec = parse_metric("fubinistudy()");
  const auto grid = grid_points(spec, {}, 16);
  const EinsteinReport rep = einstein_residual(spec, grid, 1e-7);
  CHECK(rep.pass);
  CHECK(rep.lambda_hat == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(rep.lambda_stddev < 1e-10);
  CHECK(curvature_at(spec, grid.front()).scalar ==
        doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("einstein check fails on a product with mixed curvatures") {
  const MetricSpec spec = parse_metric("product(sphere(2), flat(1))");
  const EinsteinReport rep =
      einstein_residual(spec, grid_points(spec, {}, 16), 1e-7);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual > 0.1);
}

TEST_CASE("grid points are deterministic and respect the box") {
  const MetricSpec spec = parse_metric("flat(2)");
  const DomainBox box{{"x1", {-2.0, 3.0}}};
  const auto a = grid_points(spec, box, 32);
  const auto b = grid_points(spec, box, 32);
  CHECK(a == b);
  CHECK(a.size() == 32);
  for (const auto& p : a) {
    CHECK(p.size() == 2);
    CHECK(p[0] >= -2.0);
    CHECK(p[0] <= 3.0);
    // x2 falls back to the default box
    CHECK(p[1] >= kDefaultBoxLo);
    CHECK(p[1] <= kDefaultBoxHi);
  }
}

TEST_CASE("covariant hessian on flat space is the plain hessian") {
  const MetricSpec spec = parse_metric("flat(3)");
  const ExprPtr f = parse_expr("(x1^2+x2^2+x3^2)/2");
  const std::vector<double> p{0.4, 0.7, 1.1};
  const HessianReport rep = hessian_at(f, spec, p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(rep.hessian[i * 3 + j] == doctest::Approx(i == j ? 1.0 : 0.0));
  CHECK(rep.laplacian == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(rep.grad_norm2 ==
        doctest::Approx(0.16 + 0.49 + 1.21).epsilon(1e-13));
  CHECK(rep.value == doctest::Approx(0.93).epsilon(1e-13));
}

TEST_CASE("cos of polar distance is concircular on the sphere") {
  // Hess(cos r) = -cos(r) g on the round sphere
  const MetricSpec spec = parse_metric("sphere(3)");
  const ExprPtr f = parse_expr("cos(r)");
  for (const auto& p : grid_points(spec, {}, 8)) {
    const HessianReport rep = hessian_at(f, spec, p);
    const auto g = spec.eval_values(p);
    const double c = -std::cos(p[0]);
    for (int i = 0; i < 9; ++i)
      CHECK(rep.hessian[i] == doctest::Approx(c * g[i]).epsilon(1e-11));
    CHECK(rep.laplacian == doctest::Approx(3.0 * c).epsilon(1e-11));
  }
}

TEST_CASE("traceless ricci is traceless") {
  const MetricSpec spec = parse_metric("ppwave(H=x^4+y^2)");
  for (const auto& p : grid_points(spec, {}, 8)) {
    const CurvatureReport rep = curvature_at(spec, p);
    double tr = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        tr += rep.ginv[i * 4 + j] * rep.traceless_ricci[i * 4 + j];
    CHECK(std::fabs(tr) < 1e-12);
  }
}

TEST_CASE("jet curvature matches the finite-difference oracle") {
  const char* metrics[] = {
      "sphere(3)",
      "warped(warped(diag(x;+1;1), (1/2)*sinh(x)*cosh(x)^(-1/2), diag(t;+1;1)), cosh(x)^(1/2), flat(3))",
      "ppwave(H=x^4+y^2)",
      "fubinistudy()",
      "conformal(1/(t+1), product(diag(t;+1;1), sphere(2)))",
  };
  for (const char* text : metrics) {
    CAPTURE(text);
    const MetricSpec spec = parse_metric(text);
    const auto pts = forge_test::random_points(spec, {}, 5, 20260814u);
    for (const auto& p : pts) {
      const CurvatureReport rep = curvature_at(spec, p);
      const auto fd = forge_test::ricci_fd(spec, p, 4e-3);
      const int d = spec.dim();
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          CHECK(rep.ric(i, j) ==
                doctest::Approx(fd[i * d + j]).epsilon(5e-7).scale(1.0));
    }
  }
}

TEST_CASE("default tolerance honors the environment override") {
  unsetenv("EINSTEIN_FORGE_TOL");
  CHECK(default_tol() == kDefaultTol);
  setenv("EINSTEIN_FORGE_TOL", "1e-3", 1);
  CHECK(default_tol() == 1e-3);
  setenv("EINSTEIN_FORGE_TOL", "not-a-number", 1);
  CHECK(default_tol() == kDefaultTol);
  setenv("EINSTEIN_FORGE_TOL", "-4", 1);
  CHECK(default_tol() == kDefaultTol);
  unsetenv("EINSTEIN_FORGE_TOL");
}
