#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "forge/catalog.hpp"
#include "forge/conformal.hpp"
#include "forge/curvature.hpp"
#include "oracle_fd.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

std::vector<CatalogEntry> shipped() {
  static const std::vector<CatalogEntry> entries =
      load_catalog(default_catalog_dir());
  return entries;
}

// Writes the fixture files, loads them, and returns the caught message
// (empty when the load unexpectedly succeeds).
std::string load_error(const std::map<std::string, std::string>& files) {
  const fs::path dir = fs::temp_directory_path() / "forge_catalog_fixture";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name);
    out << body;
  }
  try {
    load_catalog(dir.string());
  } catch (const std::runtime_error& ex) {
    return ex.what();
  }
  return "";
}

constexpr const char* kGoodEntry = R"js({
  "name": "fixture-sphere",
  "citation": "fixture: round 2-sphere",
  "metric": "sphere(2)",
  "expectation": {"kind": "einstein", "lambda": 1}
})js";

}  // namespace

TEST_CASE("shipped catalog loads sorted with unique anchors") {
  const auto entries = shipped();
  REQUIRE(entries.size() == 38);

  std::set<std::string> names, anchors;
  std::map<std::string, int> kinds;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i > 0) CHECK(entries[i - 1].name < e.name);
    CHECK(names.insert(e.name).second);
    CHECK(anchors.insert(e.citation).second);
    CHECK_FALSE(e.path.empty());
    ++kinds[e.kind()];
    if (e.kind() == "main-theorem-pair")
      CHECK(e.metric_text.empty());
    else
      CHECK_FALSE(e.metric_text.empty());
  }

  CHECK(kinds["einstein"] == 16);
  CHECK(kinds["ricci-flat"] == 9);
  CHECK(kinds["main-theorem-pair"] == 4);
  CHECK(kinds["constant-curvature"] == 2);
  CHECK(kinds["corvino"] == 2);
  CHECK(kinds["conf-product"] == 1);
  CHECK(kinds["gauss-curvature"] == 1);
  CHECK(kinds["non-einstein"] == 1);
  CHECK(kinds["ppwave-ricci"] == 1);
  CHECK(kinds["quasi-einstein"] == 1);
}

TEST_CASE("every shipped entry verifies on a coarse grid") {
  for (const auto& e : shipped()) {
    CAPTURE(e.name);
    const CatalogVerifyReport rep = verify_entry(e, 24, kDefaultTol);
    CHECK(rep.pass);
    CHECK(rep.name == e.name);
    CHECK(rep.kind == e.kind());
    CHECK(rep.tol == kDefaultTol);
    CHECK(rep.grid_size == (e.kind() == "main-theorem-pair" ? 8 : 24));
    CHECK(rep.wall_ms >= 0.0);
    if (e.kind() == "einstein") {
      CHECK(rep.has_lambda_hat);
      CHECK(rep.lambda_hat ==
            doctest::Approx(e.expectation["lambda"].get<double>())
                .epsilon(1e-7)
                .scale(1.0));
    }
  }
}

TEST_CASE("representative entries verify at the default grid size") {
  const auto entries = shipped();
  const char* picks[] = {
      "mercator-n4",        "calabi-ricci-flat",
      "fubini-study",       "flatexample",
      "beltrami-profile-surface", "conf-product-sphere",
      "corvino-sphere-height",    "quasi-einstein-hyperbolic",
      "pair-quadratic",     "ppwave-ricci-identity",
      "non-standard-mercator",    "iterated-ejiri",
  };
  for (const char* name : picks) {
    CAPTURE(name);
    const CatalogVerifyReport rep =
        verify_entry(find_entry(entries, name), kDefaultGridSize, kDefaultTol);
    CHECK(rep.pass);
  }
  CHECK(verify_entry(find_entry(entries, "mercator-n4"), kDefaultGridSize,
                     kDefaultTol)
            .lambda_hat == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(verify_entry(find_entry(entries, "pair-quadratic"), kDefaultGridSize,
                     kDefaultTol)
            .lambda_hat == doctest::Approx(24.0).epsilon(1e-9));
}

TEST_CASE("find_entry distinguishes hits from misses") {
  const auto entries = shipped();
  CHECK(find_entry(entries, "mercator-n3").name == "mercator-n3");
  CHECK_THROWS_AS(find_entry(entries, "no-such-entry"), std::runtime_error);
  try {
    find_entry(entries, "no-such-entry");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).find("no-such-entry") != std::string::npos);
  }
}

TEST_CASE("catalog directory resolution honors the environment") {
  const std::string builtin = default_catalog_dir();
  CHECK_FALSE(builtin.empty());
  CHECK(fs::is_directory(builtin));

  setenv("EINSTEIN_FORGE_CATALOG", "/tmp/somewhere-else", 1);
  CHECK(default_catalog_dir() == "/tmp/somewhere-else");
  setenv("EINSTEIN_FORGE_CATALOG", "", 1);  // empty value falls through
  CHECK(default_catalog_dir() == builtin);
  unsetenv("EINSTEIN_FORGE_CATALOG");
  CHECK(default_catalog_dir() == builtin);
}

TEST_CASE("single files load one entry or an array") {
  const fs::path dir = fs::temp_directory_path() / "forge_catalog_single";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "one.json");
    out << kGoodEntry;
  }
  const auto one = load_catalog((dir / "one.json").string());
  REQUIRE(one.size() == 1);
  CHECK(one[0].name == "fixture-sphere");
  CHECK(one[0].kind() == "einstein");
  CHECK(one[0].domain.empty());
  CHECK(verify_entry(one[0], 12, 1e-7).pass);

  {
    std::ofstream out(dir / "two.json");
    out << R"js([
      {"name": "fx-b", "citation": "fixture b", "metric": "flat(2)",
       "expectation": {"kind": "ricci-flat"}},
      {"name": "fx-a", "citation": "fixture a", "metric": "sphere(2)",
       "expectation": {"kind": "einstein", "lambda": 1},
       "domain": {"r": [0.3, 1.2]}}
    ])js";
  }
  const auto two = load_catalog((dir / "two.json").string());
  REQUIRE(two.size() == 2);
  CHECK(two[0].name == "fx-a");  // sorted after load
  CHECK(two[1].name == "fx-b");
  REQUIRE(two[0].domain.count("r") == 1);
  CHECK(two[0].domain.at("r").first == 0.3);
  CHECK(two[0].domain.at("r").second == 1.2);

  CHECK_THROWS_AS(load_catalog((dir / "absent.json").string()),
                  std::runtime_error);
}

TEST_CASE("schema violations name the offending file") {
  const auto has = [](const std::string& msg, const std::string& needle) {
    CAPTURE(msg);
    CHECK(msg.find(needle) != std::string::npos);
    CHECK(msg.find("forge_catalog_fixture") != std::string::npos);
  };

  has(load_error({{"a.json", R"js({"citation": "c", "metric": "flat(2)",
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "missing name");
  has(load_error({{"a.json", R"js({"name": "a", "metric": "flat(2)",
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "missing citation");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "metric": "flat(2)"})js"}}),
      "missing expectation");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "metric": "flat(2)",
                   "expectation": {"kind": "shiny"}})js"}}),
      "unknown expectation kind");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "missing metric");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "metric": "flat(2",
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "metric does not parse");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "metric": "flat(2)", "domain": {"x1": [1]},
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "must be [lo, hi]");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "metric": "flat(2)", "domain": {"x1": [2, 2]},
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "empty domain range");
  has(load_error({{"a.json", R"js({"name": "a", "citation": "c",
                   "metric": "flat(2)", "domain": {"q": [0, 1]},
                   "expectation": {"kind": "ricci-flat"}})js"}}),
      "unknown coordinate q");
  has(load_error({{"a.json", "{ not json"}}), "bad JSON");

  // Duplicates are detected across files.
  const std::string dup_name = load_error(
      {{"a.json", R"js({"name": "same", "citation": "c1", "metric": "flat(2)",
                      "expectation": {"kind": "ricci-flat"}})js"},
       {"b.json", R"js({"name": "same", "citation": "c2", "metric": "flat(2)",
                      "expectation": {"kind": "ricci-flat"}})js"}});
  has(dup_name, "duplicate entry name same");
  const std::string dup_anchor = load_error(
      {{"a.json", R"js({"name": "n1", "citation": "same", "metric": "flat(2)",
                      "expectation": {"kind": "ricci-flat"}})js"},
       {"b.json", R"js({"name": "n2", "citation": "same", "metric": "flat(2)",
                      "expectation": {"kind": "ricci-flat"}})js"}});
  has(dup_anchor, "duplicate citation");
}

TEST_CASE("conformal entries agree with the closed-form Ricci shift") {
  int covered = 0;
  for (const auto& e : shipped()) {
    if (e.metric_text.empty()) continue;
    const MetricSpec spec = parse_metric(e.metric_text);
    const MetricNodePtr root = spec.ast();
    if (root->kind != MetricNode::Kind::Conformal) continue;
    ++covered;
    CAPTURE(e.name);

    // The node stores g = e^2 g_inner; the pair wants g = phi^-2 g_inner.
    const MetricSpec inner = metric_from_ast(root->a);
    const ExprPtr phi = ex_div(ex_num(1.0), root->expr);
    const ConformalPair pair = make_conformal_pair(inner, phi);

    const auto grid = grid_points(spec, e.domain, 5);
    for (const auto& pt : grid) {
      const auto delta = conformal_ricci_delta(pair, pt);
      const CurvatureReport co = curvature_at(spec, pt);
      const CurvatureReport ci = curvature_at(inner, pt);
      double worst = 0.0;
      double scale = 1.0;
      for (size_t i = 0; i < delta.size(); ++i) {
        worst = std::max(worst,
                         std::fabs(co.ricci[i] - ci.ricci[i] - delta[i]));
        scale = std::max(scale, std::fabs(co.ricci[i]));
      }
      CHECK(worst <= 1e-9 * scale);
    }
  }
  CHECK(covered == 19);
}

TEST_CASE("finite differences reproduce the Ricci tensor of shipped entries") {
  const auto entries = shipped();
  for (const char* name :
       {"poincare-halfspace", "cleyton-quadratic", "iterated-ejiri"}) {
    CAPTURE(name);
    const CatalogEntry& e = find_entry(entries, name);
    const MetricSpec spec = parse_metric(e.metric_text);
    const auto pts = forge_test::random_points(spec, e.domain, 3, 911);
    for (const auto& x : pts) {
      const auto fd = forge_test::ricci_fd(spec, x, 4e-3);
      const CurvatureReport cr = curvature_at(spec, x);
      double scale = 1.0;
      for (double v : cr.ricci) scale = std::max(scale, std::fabs(v));
      for (size_t i = 0; i < fd.size(); ++i)
        CHECK(std::fabs(fd[i] - cr.ricci[i]) <= 1e-5 * scale);
    }
  }
}
