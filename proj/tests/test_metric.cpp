#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "forge/metric.hpp"

using namespace forge;

namespace {
std::vector<double> values(const std::string& text,
                           const std::vector<double>& point) {
  return parse_metric(text).eval_values(point);
}
}  // namespace

TEST_CASE("flat charts produce constant diagonal matrices") {
  const MetricSpec spec = parse_metric("flat(3)");
  CHECK(spec.dim() == 3);
  CHECK(spec.coords() == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(spec.signature() == std::vector<int>{1, 1, 1});
  const auto g = spec.eval_values({0.2, 0.5, 0.9});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g[i * 3 + j] == (i == j ? 1.0 : 0.0));

  const MetricSpec lor = parse_metric("flat(2;-1,+1)");
  CHECK(lor.signature() == std::vector<int>{-1, 1});
  const auto gl = lor.eval_values({0.0, 0.0});
  CHECK(gl[0] == -1.0);
  CHECK(gl[3] == 1.0);
}

TEST_CASE("diag entries evaluate with their declared signs") {
  const MetricSpec spec = parse_metric("diag(t,x;+1,-1;1,t^2)");
  CHECK(spec.coords() == std::vector<std::string>{"t", "x"});
  const auto g = spec.eval_values({1.3, 9.9});
  CHECK(g[0] == 1.0);
  CHECK(g[3] == doctest::Approx(-1.69).epsilon(1e-14));
  // jets carry the derivatives of the same entries
  const auto jets = spec.eval_jets({1.3, 9.9});
  CHECK(jets.at(1, 1).grad(0) == doctest::Approx(-2.6).epsilon(1e-14));
  CHECK(jets.at(1, 1).hess(0, 0) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(jets.at(1, 1).grad(1) == 0.0);
}

TEST_CASE("coordinate collisions rename left to right") {
  CHECK(parse_metric("product(sphere(2), sphere(2))").coords() ==
        std::vector<std::string>{"r", "q1", "r_2", "q1_2"});
  CHECK(parse_metric("product(flat(2), flat(2))").coords() ==
        std::vector<std::string>{"x1", "x2", "x1_2", "x2_2"});
  CHECK(parse_metric(
            "product(diag(t;+1;1), product(diag(t;+1;1), diag(t;+1;1)))")
            .coords() == std::vector<std::string>{"t", "t_2", "t_3"});
}

TEST_CASE("warp factors square onto the fiber block") {
  const auto g = values("warped(diag(x;+1;1), x, flat(2))", {2.0, 0.1, 0.2});
  CHECK(g[0] == 1.0);
  CHECK(g[4] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(g[8] == doctest::Approx(4.0).epsilon(1e-14));
  // nested warps bind base names after renaming
  const auto h = values("warped(warped(diag(x;+1;1), x, diag(t;+1;1)), x^2, flat(1))",
                        {2.0, 0.0, 0.0});
  CHECK(h[0] == 1.0);
  CHECK(h[4] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(h[8] == doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("conformal factors square onto every entry") {
  const auto g = values("conformal(2, flat(2))", {0.0, 0.0});
  CHECK(g[0] == 4.0);
  CHECK(g[3] == 4.0);
  // the factor sees post-rename names of its inner metric
  const auto h = values("conformal(1/(t+t_2), product(diag(t;+1;1), diag(t;-1;1)))",
                        {1.0, 2.0});
  CHECK(h[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(h[3] == doctest::Approx(-1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("polar sugar expands to iterated sin/sinh warps") {
  const auto s2 = values("sphere(2)", {0.7, 1.1});
  CHECK(s2[0] == 1.0);
  CHECK(s2[3] == doctest::Approx(std::pow(std::sin(0.7), 2)).epsilon(1e-14));

  const auto s3 = values("sphere(3)", {0.7, 1.1, 0.4});
  CHECK(s3[4] == doctest::Approx(std::pow(std::sin(0.7), 2)).epsilon(1e-14));
  CHECK(s3[8] == doctest::Approx(std::pow(std::sin(0.7) * std::sin(1.1), 2))
                     .epsilon(1e-14));

  const auto h2 = values("hyperbolic(2)", {0.7, 1.1});
  CHECK(h2[3] == doctest::Approx(std::pow(std::sinh(0.7), 2)).epsilon(1e-14));

  const auto neg = values("sphere(2;-1)", {0.7, 1.1});
  CHECK(neg[0] == -1.0);
  CHECK(neg[3] == doctest::Approx(-std::pow(std::sin(0.7), 2)).epsilon(1e-14));
  CHECK(parse_metric("sphere(2;-1)").signature() == std::vector<int>{-1, -1});
}

TEST_CASE("plane-wave chart wires H into g_uu") {
  const MetricSpec spec = parse_metric("ppwave(H=x^2-y^2)");
  CHECK(spec.coords() == std::vector<std::string>{"u", "v", "x", "y"});
  CHECK(spec.signature() == std::vector<int>{-1, 1, 1, 1});
  const auto g = spec.eval_values({0.3, 0.5, 1.2, 0.7});
  CHECK(g[0] == doctest::Approx(-2 * (1.44 - 0.49)).epsilon(1e-14));
  CHECK(g[1] == -1.0);
  CHECK(g[4] == -1.0);
  CHECK(g[5] == 0.0);
  CHECK(g[10] == 1.0);
  CHECK(g[15] == 1.0);
  CHECK_THROWS_AS(parse_metric("ppwave(x^2-y^2)"), ParseError);
}

TEST_CASE("projective-plane chart is four-dimensional and definite") {
  const MetricSpec spec = parse_metric("fubinistudy()");
  CHECK(spec.dim() == 4);
  CHECK(spec.coords() == std::vector<std::string>{"z1", "z2", "z3", "z4"});
  const auto g = spec.eval_values({0.4, 0.8, 0.6, 1.0});
  for (int i = 0; i < 4; ++i) CHECK(g[i * 4 + i] > 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(g[i * 4 + j] == g[j * 4 + i]);
}

TEST_CASE("json envelope carries the evaluation box") {
  const MetricInput in = parse_metric_input(
      R"js({"metric": "flat(2)", "domain": {"x1": [0.0, 1.0]}})js");
  CHECK(in.spec.dim() == 2);
  REQUIRE(in.domain.count("x1") == 1);
  CHECK(in.domain.at("x1").first == 0.0);
  CHECK(in.domain.at("x1").second == 1.0);
  CHECK(parse_metric_input("flat(2)").domain.empty());
}

TEST_CASE("structural errors are parse errors with positions") {
  for (const char* bad : {
           "diag(t,t;+1,+1;1,1)",     // duplicate name within one leaf
           "diag(t;+2;1)",            // sign must be +1/-1
           "diag(t,x;+1;1,1)",        // sign count mismatch
           "diag(t;+1;1,2)",          // entry count mismatch
           "warped(flat(1), , flat(1))",
           "product(flat(1))",
           "sphere(0)",
           "flat(2;+1)",              // signature length mismatch
           "conformal(flat(1), 2)",   // factor and metric swapped
           "nosuch(3)",
       }) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_metric(bad), ParseError);
  }
}

TEST_CASE("unknown warp symbols name the offender") {
  try {
    parse_metric("warped(flat(1), q, flat(1))");
    FAIL("unresolved symbol must throw");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("q") != std::string::npos);
  }
}

TEST_CASE("singular coefficient matrices are rejected at evaluation") {
  const MetricSpec spec = parse_metric("diag(t,x;+1,+1;1,t)");
  CHECK_THROWS_AS(spec.eval_values({0.0, 0.5}), SingularMetricError);
  CHECK(spec.eval_values({0.4, 0.5})[3] == doctest::Approx(0.4));
}

TEST_CASE("wide dynamic range alone does not trip the singularity gate") {
  // diagonal entries spanning ~7 orders of magnitude stay invertible
  const MetricSpec spec =
      parse_metric("diag(t,x,s,y;+1,+1,+1,+1;1,576/t^6,1,576/s^6)");
  const auto g = spec.eval_values({0.35, 0.1, 0.35, 0.1});
  CHECK(g[5] == doctest::Approx(576.0 / std::pow(0.35, 6)).epsilon(1e-13));
  CHECK(g[15] == doctest::Approx(576.0 / std::pow(0.35, 6)).epsilon(1e-13));
}

TEST_CASE("conformal factor magnitude is guarded") {
  const MetricSpec tiny = parse_metric("conformal(1/1000000000000000, flat(1))");
  CHECK_THROWS_AS(tiny.eval_values({0.5}), DomainError);
  const MetricSpec huge = parse_metric("conformal(exp(x1), flat(1))");
  CHECK_THROWS_AS(huge.eval_values({50.0}), DomainError);
  CHECK(huge.eval_values({0.5})[0] == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("left block width is reported only for product roots") {
  CHECK(parse_metric("product(flat(2), flat(3))").left_block_dim() == 2);
  CHECK_FALSE(parse_metric("flat(4)").left_block_dim().has_value());
  CHECK_FALSE(parse_metric("conformal(2, product(flat(1), flat(1)))")
                  .left_block_dim()
                  .has_value());
}

TEST_CASE("jets and plain values agree on a nested tree") {
  const MetricSpec spec =
      parse_metric("warped(diag(x;+1;1), cosh(x)^(1/2), flat(3))");
  const std::vector<double> p{0.8, 0.1, 0.2, 0.3};
  const auto vals = spec.eval_values(p);
  const auto jets = spec.eval_jets(p);
  REQUIRE(jets.dim == spec.dim());
  for (int i = 0; i < spec.dim(); ++i)
    for (int j = 0; j < spec.dim(); ++j)
      CHECK(jets.at(i, j).value() ==
            doctest::Approx(vals[i * spec.dim() + j]).epsilon(1e-14));
}

TEST_CASE("ast printing round-trips") {
  for (const char* text : {
           "conformal(1/cosh(t), product(diag(t;+1;1), sphere(3)))",
           "warped(warped(diag(x;+1;1), sinh(x), diag(t;+1;1)), cosh(x), hyperbolic(2))",
           "ppwave(H=x^4+y^2)",
           "flat(4;-1,+1,+1,+1)",
       }) {
    CAPTURE(text);
    const MetricSpec spec = parse_metric(text);
    const MetricSpec round = parse_metric(spec.text());
    CHECK(structurally_equal(spec.ast(), round.ast()));
  }
}
