// einstein-forge: verify metrics, solve the profile ODE families, classify
// warp orbits, run the bundled catalog, and emit plot data. JSON goes to
// stdout, human notes to stderr, CSV only through --emit. Exit codes:
// 0 pass, 1 a verification ran and failed, 2 usage or evaluation errors.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forge/catalog.hpp"
#include "forge/classify.hpp"
#include "forge/conformal.hpp"
#include "forge/curvature.hpp"
#include "forge/errors.hpp"
#include "forge/metric.hpp"
#include "forge/ode.hpp"
#include "forge/quadrature.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

void emit_report(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

forge::DomainBox parse_domain_args(const std::vector<std::string>& kvs) {
  forge::DomainBox box;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    const auto colon = kv.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos || eq == 0)
      throw std::invalid_argument("bad --domain '" + kv +
                                  "', expected coord=lo:hi");
    double lo = 0.0, hi = 0.0;
    try {
      lo = std::stod(kv.substr(eq + 1, colon - eq - 1));
      hi = std::stod(kv.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --domain '" + kv +
                                  "', endpoints must be numbers");
    }
    if (!(lo < hi))
      throw std::invalid_argument("bad --domain '" + kv + "', need lo < hi");
    box[kv.substr(0, eq)] = {lo, hi};
  }
  return box;
}

ordered_json domain_to_json(const forge::DomainBox& box) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, range] : box)
    j[name] = {range.first, range.second};
  return j;
}

ordered_json trajectory_to_json(const forge::OdeTrajectory& tr) {
  ordered_json j;
  j["rows"] = tr.states.size();
  if (!tr.tag.empty()) j["tag"] = tr.tag;
  ordered_json drift = ordered_json::object();
  for (size_t i = 0; i < tr.invariant_names.size(); ++i)
    drift[tr.invariant_names[i]] = tr.drift[i];
  j["drift"] = drift;
  j["events"] = tr.events;
  j["truncated"] = tr.truncated;
  if (tr.truncated) j["truncation_reason"] = tr.truncation_reason;
  auto state_at = [&](size_t row) {
    ordered_json s = ordered_json::object();
    s["t"] = tr.param[row];
    for (size_t i = 0; i < tr.state_names.size(); ++i)
      s[tr.state_names[i]] = tr.states[row][i];
    return s;
  };
  if (!tr.states.empty()) {
    j["initial"] = state_at(0);
    j["final"] = state_at(tr.states.size() - 1);
  }
  return j;
}

std::string emit_trajectory_csv(const forge::OdeTrajectory& tr,
                                const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open --emit path " + path);
  forge::write_csv(tr, os);
  return path;
}

// All roots of P(K) = c K - K^3/3 + d by scan and bisection, ascending.
std::vector<double> cubic_roots(double c, double d) {
  const double bound = 1.0 + std::max(std::fabs(3.0 * c), std::fabs(3.0 * d));
  const auto P = [&](double v) { return c * v - v * v * v / 3.0 + d; };
  std::vector<double> roots;
  const int cells = 8192;
  double prev = -bound, fprev = P(prev);
  for (int i = 1; i <= cells; ++i) {
    const double v = -bound + 2.0 * bound * i / cells;
    const double fv = P(v);
    if (fprev == 0.0) roots.push_back(prev);
    if (fprev * fv < 0.0) {
      double lo = prev, hi = v;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * bound; ++it) {
        const double mid = 0.5 * (lo + hi);
        (P(lo) * P(mid) <= 0.0 ? hi : lo) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = v;
    fprev = fv;
  }
  if (fprev == 0.0) roots.push_back(prev);
  return roots;
}

struct VerifyArgs {
  std::string metric_text, metric_file, catalog_name, catalog_dir;
  std::string mode = "einstein";
  std::string phi_text;
  int grid = forge::kDefaultGridSize;
  double tol = 0.0;
  std::vector<std::string> domain_kv;
  bool timings = false;
};

int run_verify(const VerifyArgs& a) {
  const int given = (!a.metric_text.empty()) + (!a.metric_file.empty()) +
                    (!a.catalog_name.empty());
  if (given != 1)
    throw std::invalid_argument(
        "verify needs exactly one of --metric, --metric-file, --catalog");

  if (!a.catalog_name.empty()) {
    const std::string dir =
        a.catalog_dir.empty() ? forge::default_catalog_dir() : a.catalog_dir;
    const auto entries = forge::load_catalog(dir);
    const auto& entry = forge::find_entry(entries, a.catalog_name);
    const auto r = forge::verify_entry(entry, a.grid, a.tol);
    ordered_json j;
    j["command"] = "verify";
    j["version"] = kVersion;
    j["mode"] = "catalog";
    j["name"] = entry.name;
    j["kind"] = r.kind;
    j["grid"] = r.grid_size;
    j["tol"] = r.tol;
    j["pass"] = r.pass;
    j["residual"] = r.residual;
    if (r.has_lambda_hat) j["lambda_hat"] = r.lambda_hat;
    j["detail"] = r.detail;
    if (a.timings) j["wall_ms"] = r.wall_ms;
    emit_report(j);
    std::cerr << entry.name << ": " << (r.pass ? "pass" : "FAIL")
              << " (residual " << r.residual << ")\n";
    return r.pass ? 0 : 1;
  }

  std::string text = a.metric_text;
  std::string source = "inline";
  if (!a.metric_file.empty()) {
    std::ifstream is(a.metric_file);
    if (!is) throw std::invalid_argument("cannot read " + a.metric_file);
    std::ostringstream buf;
    buf << is.rdbuf();
    text = buf.str();
    source = "file";
  }

  auto input = forge::parse_metric_input(text);
  forge::DomainBox box = input.domain;
  for (const auto& [name, range] : parse_domain_args(a.domain_kv))
    box[name] = range;
  const auto grid = forge::grid_points(input.spec, box, a.grid);

  ordered_json j;
  j["command"] = "verify";
  j["version"] = kVersion;
  j["mode"] = a.mode;
  j["source"] = source;
  j["metric"] = input.spec.text();
  j["dim"] = input.spec.dim();
  j["grid"] = a.grid;
  j["tol"] = a.tol;
  if (!box.empty()) j["domain"] = domain_to_json(box);

  bool pass = false;
  if (a.mode == "einstein") {
    if (!a.phi_text.empty())
      throw std::invalid_argument("--phi only applies to --mode conformal");
    const auto r = forge::einstein_residual(input.spec, grid, a.tol);
    pass = r.pass;
    j["pass"] = r.pass;
    j["lambda_hat"] = r.lambda_hat;
    j["lambda_stddev"] = r.lambda_stddev;
    j["max_residual"] = r.max_residual;
    std::cerr << (pass ? "pass" : "FAIL") << ": lambda_hat = "
              << fmt(r.lambda_hat) << ", max residual " << r.max_residual
              << " on " << a.grid << " points\n";
  } else {
    if (a.phi_text.empty())
      throw std::invalid_argument("--mode conformal requires --phi");
    const auto phi = forge::parse_expr(a.phi_text);
    const auto pair = forge::make_conformal_pair(input.spec, phi);
    const auto crit = forge::conformally_einstein_residual(pair, grid, a.tol);
    const auto outer = forge::einstein_residual(pair.outer, grid, a.tol);
    pass = crit.pass && outer.pass;
    j["phi"] = a.phi_text;
    j["pass"] = pass;
    j["criterion_residual"] = crit.max_residual;
    ordered_json rescaled;
    rescaled["pass"] = outer.pass;
    rescaled["lambda_hat"] = outer.lambda_hat;
    rescaled["lambda_stddev"] = outer.lambda_stddev;
    rescaled["max_residual"] = outer.max_residual;
    j["rescaled"] = rescaled;
    std::cerr << (pass ? "pass" : "FAIL")
              << ": traceless criterion residual " << crit.max_residual
              << ", rescaled lambda_hat = " << fmt(outer.lambda_hat) << "\n";
  }
  emit_report(j);
  return pass ? 0 : 1;
}

struct SolveCommon {
  double t0 = 0.0, t1 = 10.0, step = 1e-3;
  std::string emit;
  bool timings = false;
};

int finish_solve(ordered_json& j, const forge::OdeTrajectory& tr,
                 const SolveCommon& sc) {
  ordered_json t = trajectory_to_json(tr);
  for (auto& [key, val] : t.items()) j[key] = val;
  if (!sc.emit.empty()) j["emitted"] = emit_trajectory_csv(tr, sc.emit);
  emit_report(j);
  double worst = 0.0;
  for (double d : tr.drift) worst = std::max(worst, d);
  std::cerr << "solved " << tr.states.size() << " rows, max drift " << worst
            << (tr.truncated ? ", truncated" : "") << "\n";
  return 0;
}

struct ClassifyArgs {
  int n = 4;
  double kbar = 0.0, k = 0.0, c = 0.0;
};

int run_classify(const ClassifyArgs& a) {
  const auto v = forge::classify_warp(a.n, a.kbar, a.k, a.c);
  ordered_json j;
  j["command"] = "classify";
  j["version"] = kVersion;
  j["n"] = a.n;
  j["kbar"] = a.kbar;
  j["k"] = a.k;
  j["c"] = a.c;
  j["type"] = forge::to_string(v.type);
  j["case"] = v.case_label;
  if (!v.classical_family.empty()) j["classical_family"] = v.classical_family;
  ordered_json roots = ordered_json::array();
  for (const auto& r : v.roots)
    roots.push_back({{"value", r.value}, {"order", r.order}});
  j["roots"] = roots;
  if (!v.roots.empty()) j["u0"] = v.u0;
  j["growth"] = v.growth;
  if (v.log_coefficient != 0.0) j["log_coefficient"] = v.log_coefficient;
  if (!v.case_label.empty() && v.case_label == "Case1")
    j["case1_residual"] = v.case1_residual;
  if (!v.note.empty()) j["note"] = v.note;
  emit_report(j);
  std::cerr << forge::to_string(v.type)
            << (v.case_label.empty() ? "" : " (" + v.case_label + ")");
  if (!v.roots.empty()) {
    std::cerr << ", roots";
    for (const auto& r : v.roots)
      std::cerr << " " << fmt(r.value) << (r.order == 2 ? " (double)" : "");
  }
  std::cerr << "\n";
  return 0;
}

struct DropArgs {
  int m = 0;
  int n = 0;
  double alpha = 0.0, beta = 0.0;
  bool has_m = false, has_instance = false;
};

int run_droplemma(const DropArgs& a) {
  if (a.has_m == a.has_instance)
    throw std::invalid_argument(
        "droplemma takes either --m, or all of --n --alpha --beta");
  ordered_json j;
  j["command"] = "droplemma";
  j["version"] = kVersion;
  if (a.has_m) {
    const auto rep = forge::drop_polynomial(a.m);
    j["m"] = rep.m;
    j["degree"] = static_cast<int>(rep.coeffs.size()) - 1;
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : rep.coeffs)
      coeffs.push_back(forge::int128_to_string(c));
    j["coefficients"] = coeffs;
    j["all_nonnegative"] = rep.all_nonnegative;
    j["parity_positive"] = rep.parity_positive;
    j["no_positive_zero"] = rep.no_positive_zero;
    j["recursion_ok"] = rep.recursion_ok;
    const bool pass = rep.all_nonnegative && rep.parity_positive &&
                      rep.no_positive_zero && rep.recursion_ok;
    j["pass"] = pass;
    emit_report(j);
    std::cerr << "phi_" << rep.m << (pass ? ": pass" : ": FAIL") << "\n";
    return pass ? 0 : 1;
  }
  const auto d = forge::drop_instance(a.n, a.alpha, a.beta);
  j["n"] = d.n;
  j["alpha"] = d.alpha;
  j["beta"] = d.beta;
  j["y"] = d.y;
  j["a"] = d.a;
  j["b"] = d.b;
  j["gamma_a"] = d.gamma_a;
  j["gamma_b"] = d.gamma_b;
  j["g_at_a"] = d.g_at_a;
  j["g_at_b"] = d.g_at_b;
  j["ddu_at_a"] = d.ddu_at_a;
  j["ddu_at_b"] = d.ddu_at_b;
  j["phi_at_y"] = d.phi_at_y;
  j["gammas_differ"] =
      std::fabs(d.gamma_a - d.gamma_b) >
      1e-10 * (std::fabs(d.gamma_a) + std::fabs(d.gamma_b));
  j["pass"] = d.consistent;
  emit_report(j);
  std::cerr << "gamma_a = " << fmt(d.gamma_a) << ", gamma_b = "
            << fmt(d.gamma_b) << (d.consistent ? " (pass)" : " (FAIL)")
            << "\n";
  return d.consistent ? 0 : 1;
}

struct CatalogArgs {
  std::string dir;
  std::string name;
  int grid = forge::kDefaultGridSize;
  double tol = 0.0;
  bool timings = false;
  bool parallel = false;
};

int run_catalog_list(const CatalogArgs& a) {
  const std::string dir =
      a.dir.empty() ? forge::default_catalog_dir() : a.dir;
  const auto entries = forge::load_catalog(dir);
  ordered_json j;
  j["command"] = "catalog-list";
  j["version"] = kVersion;
  j["dir"] = dir;
  j["count"] = entries.size();
  ordered_json list = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json item;
    item["name"] = e.name;
    item["kind"] = e.kind();
    if (!e.metric_text.empty())
      item["dim"] = forge::parse_metric(e.metric_text).dim();
    item["citation"] = e.citation;
    list.push_back(item);
  }
  j["entries"] = list;
  emit_report(j);
  std::cerr << entries.size() << " catalog entries in " << dir << "\n";
  return 0;
}

int run_catalog_show(const CatalogArgs& a) {
  const std::string dir =
      a.dir.empty() ? forge::default_catalog_dir() : a.dir;
  const auto entries = forge::load_catalog(dir);
  const auto& e = forge::find_entry(entries, a.name);
  std::ifstream is(e.path);
  if (!is) throw std::invalid_argument("cannot read " + e.path);
  ordered_json body = ordered_json::parse(is);
  ordered_json j;
  j["command"] = "catalog-show";
  j["version"] = kVersion;
  j["name"] = e.name;
  j["path"] = e.path;
  j["entry"] = body;
  emit_report(j);
  std::cerr << e.name << ": " << e.citation << "\n";
  return 0;
}

int run_catalog_verify(const CatalogArgs& a) {
  const std::string dir =
      a.dir.empty() ? forge::default_catalog_dir() : a.dir;
  auto entries = forge::load_catalog(dir);
  if (!a.name.empty()) {
    const auto& e = forge::find_entry(entries, a.name);
    entries = {e};
  }

  std::vector<forge::CatalogVerifyReport> reports(entries.size());
  if (a.parallel) {
    std::vector<std::future<forge::CatalogVerifyReport>> futs;
    futs.reserve(entries.size());
    for (const auto& e : entries)
      futs.push_back(std::async(std::launch::async, [&a, &e] {
        return forge::verify_entry(e, a.grid, a.tol);
      }));
    for (size_t i = 0; i < futs.size(); ++i) reports[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < entries.size(); ++i)
      reports[i] = forge::verify_entry(entries[i], a.grid, a.tol);
  }

  int passed = 0;
  ordered_json list = ordered_json::array();
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& r = reports[i];
    ordered_json item;
    item["name"] = r.name;
    item["kind"] = r.kind;
    item["pass"] = r.pass;
    item["residual"] = r.residual;
    if (r.has_lambda_hat) item["lambda_hat"] = r.lambda_hat;
    item["detail"] = r.detail;
    if (a.timings) item["wall_ms"] = r.wall_ms;
    list.push_back(item);
    passed += r.pass ? 1 : 0;
    std::cerr << (r.pass ? "  ok   " : "  FAIL ") << r.name << " ("
              << r.residual << ")\n";
  }
  ordered_json j;
  j["command"] = "catalog-verify";
  j["version"] = kVersion;
  j["dir"] = dir;
  j["grid"] = a.grid;
  j["tol"] = a.tol;
  j["total"] = entries.size();
  j["passed"] = passed;
  j["pass"] = passed == static_cast<int>(entries.size());
  j["entries"] = list;
  emit_report(j);
  std::cerr << passed << "/" << entries.size() << " entries pass\n";
  return j["pass"].get<bool>() ? 0 : 1;
}

struct ProfileArgs {
  double c = 2.0, d = -4.0 / 3.0;
  std::optional<double> K0, dK0;
  double t1 = 0.0;
  double step = 1e-3;
  int steps = 256;
  std::string emit;
};

int run_profile_beltrami(const ProfileArgs& a) {
  const double t0 = std::pow(72.0, 0.25);
  const double t1 = a.t1 > 0.0 ? a.t1 : 12.0;
  if (!(t1 > t0))
    throw std::invalid_argument("beltrami needs --t1 > 72^(1/4) = " +
                                fmt(t0));
  const auto integrand = [](double tau) {
    const double rp = 72.0 * std::pow(tau, -4.0);
    return std::sqrt(std::max(0.0, 1.0 - rp * rp));
  };
  std::vector<double> ts(a.steps + 1), hs(a.steps + 1);
  double acc = 0.0;
  for (int i = 0; i <= a.steps; ++i) {
    ts[i] = t0 + (t1 - t0) * i / a.steps;
    if (i > 0) {
      const auto q = forge::integrate(integrand, ts[i - 1], ts[i]);
      acc += q.value;
    }
    hs[i] = acc;
  }
  if (!a.emit.empty()) {
    std::ofstream os(a.emit);
    if (!os) throw std::invalid_argument("cannot open --emit path " + a.emit);
    os << "t,r,h,K\n";
    os.precision(17);
    for (int i = 0; i <= a.steps; ++i)
      os << ts[i] << "," << 24.0 * std::pow(ts[i], -3.0) << "," << hs[i]
         << "," << -12.0 / (ts[i] * ts[i]) << "\n";
  }
  ordered_json j;
  j["command"] = "profile";
  j["version"] = kVersion;
  j["kind"] = "beltrami";
  j["t0"] = t0;
  j["t1"] = t1;
  j["steps"] = a.steps;
  j["rows"] = a.steps + 1;
  j["r_at_t0"] = 24.0 * std::pow(t0, -3.0);
  j["K_at_t0"] = -12.0 / (t0 * t0);
  j["h_end"] = hs.back();
  if (!a.emit.empty()) j["emitted"] = a.emit;
  emit_report(j);
  std::cerr << "beltrami profile from t0 = " << fmt(t0) << ", K(t0) = "
            << fmt(-12.0 / (t0 * t0)) << "\n";
  return 0;
}

int run_profile_figure1(const ProfileArgs& a) {
  forge::ExtremalSurfaceParams p;
  p.c = a.c;
  p.d = a.d;
  if (a.K0) {
    p.K0 = *a.K0;
    const double pk =
        a.c * p.K0 - p.K0 * p.K0 * p.K0 / 3.0 + a.d;
    p.dK0 = a.dK0 ? *a.dK0 : std::sqrt(std::max(0.0, pk));
  } else {
    const auto roots = cubic_roots(a.c, a.d);
    double best = 0.0;
    for (double r : roots) best = std::max(best, r);
    if (best <= 0.0)
      throw std::invalid_argument(
          "no positive root of c K - K^3/3 + d; pass --K0 explicitly");
    p.K0 = best;
    p.dK0 = 0.0;
  }
  const double t1 = a.t1 > 0.0 ? a.t1 : 10.0;
  const auto tr = forge::solve_extremal(p, 0.0, t1, a.step);

  // Revolution chart: r = |K'|, h' = sqrt(1 - K''^2) with 2K'' = c - K^2.
  const auto ddK = [&](double K) { return 0.5 * (a.c - K * K); };
  std::vector<double> hs(tr.states.size(), 0.0);
  size_t rows = tr.states.size();
  for (size_t i = 1; i < tr.states.size(); ++i) {
    const double r2a = 1.0 - std::pow(ddK(tr.states[i - 1][0]), 2);
    const double r2b = 1.0 - std::pow(ddK(tr.states[i][0]), 2);
    if (r2a < -1e-12 || r2b < -1e-12) {
      rows = i;  // the chart leaves R^3 here
      break;
    }
    const double dt = tr.param[i] - tr.param[i - 1];
    hs[i] = hs[i - 1] + 0.5 * dt * (std::sqrt(std::max(0.0, r2a)) +
                                    std::sqrt(std::max(0.0, r2b)));
  }
  double kmin = tr.states[0][0], kmax = tr.states[0][0];
  for (size_t i = 0; i < rows; ++i) {
    kmin = std::min(kmin, tr.states[i][0]);
    kmax = std::max(kmax, tr.states[i][0]);
  }
  // Orbit endpoints are roots of P; snap past the RK4 sampling error.
  const auto snap = [&](double end) {
    for (double r : cubic_roots(a.c, a.d))
      if (std::fabs(r - end) < 1e-4) return r;
    return end;
  };
  kmin = snap(kmin);
  kmax = snap(kmax);
  if (!a.emit.empty()) {
    std::ofstream os(a.emit);
    if (!os) throw std::invalid_argument("cannot open --emit path " + a.emit);
    os << "t,r,h,K\n";
    os.precision(17);
    for (size_t i = 0; i < rows; ++i)
      os << tr.param[i] << "," << std::fabs(tr.states[i][1]) << "," << hs[i]
         << "," << tr.states[i][0] << "\n";
  }
  ordered_json j;
  j["command"] = "profile";
  j["version"] = kVersion;
  j["kind"] = "figure1";
  j["c"] = a.c;
  j["d"] = a.d;
  j["K0"] = p.K0;
  j["dK0"] = p.dK0;
  j["t1"] = t1;
  j["step"] = a.step;
  j["rows"] = rows;
  j["clipped"] = rows < tr.states.size();
  j["orbit_min"] = kmin;
  j["orbit_max"] = kmax;
  ordered_json drift = ordered_json::object();
  for (size_t i = 0; i < tr.invariant_names.size(); ++i)
    drift[tr.invariant_names[i]] = tr.drift[i];
  j["drift"] = drift;
  j["axis_crossings"] = tr.events;  // K' = 0: the profile meets the axis
  ordered_json caps = ordered_json::array();
  for (double kend : {kmax, kmin}) {
    const double dd = ddK(kend);
    ordered_json cap;
    cap["K"] = kend;
    cap["ddK"] = dd;
    // |K''| = 1 closes smoothly; anything less is a cone point in R^3.
    cap["smooth"] = std::fabs(std::fabs(dd) - 1.0) <= 1e-6;
    caps.push_back(cap);
  }
  j["caps"] = caps;
  if (!a.emit.empty()) j["emitted"] = a.emit;
  emit_report(j);
  std::cerr << "figure1 orbit in [" << fmt(kmin) << ", " << fmt(kmax)
            << "], " << rows << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric verification and profile toolkit"};
  app.set_version_flag("--version", std::string("einstein-forge ") + kVersion);
  app.require_subcommand(1);
  const double tol_default = forge::default_tol();

  VerifyArgs va;
  va.tol = tol_default;
  auto* verify = app.add_subcommand("verify", "check Einstein conditions");
  verify->add_option("--metric", va.metric_text, "metric DSL or JSON envelope");
  verify->add_option("--metric-file", va.metric_file,
                     "file containing metric DSL or JSON envelope");
  verify->add_option("--catalog", va.catalog_name, "bundled catalog entry");
  verify->add_option("--catalog-dir", va.catalog_dir, "catalog directory");
  verify->add_option("--mode", va.mode, "einstein | conformal")
      ->check(CLI::IsMember({"einstein", "conformal"}));
  verify->add_option("--phi", va.phi_text,
                     "conformal factor (mode conformal: is phi^-2 g Einstein)");
  verify->add_option("--grid", va.grid, "grid point count")
      ->check(CLI::PositiveNumber);
  verify->add_option("--tol", va.tol, "tolerance");
  verify->add_option("--domain", va.domain_kv,
                     "coord=lo:hi box override, repeatable");
  verify->add_flag("--timings", va.timings, "include wall-clock fields");

  auto* solve = app.add_subcommand("solve", "integrate a profile ODE family");
  solve->require_subcommand(1);
  SolveCommon sc;
  forge::BrinkmannProblem bp;
  auto* brink = solve->add_subcommand(
      "brinkmann", "phi''' + eps k phi' = 0 wave profiles");
  brink->add_option("--eps", bp.eps, "+1 or -1");
  brink->add_option("--k", bp.k);
  brink->add_option("--phi0", bp.phi0);
  brink->add_option("--dphi0", bp.dphi0);
  brink->add_option("--ddphi0", bp.ddphi0);

  forge::FtProblem fp;
  auto* ft = solve->add_subcommand("ft", "f'' = eps kstar f factor profiles");
  ft->add_option("--eps", fp.eps, "+1 or -1");
  ft->add_option("--kstar", fp.kstar);
  auto* ft_kbar = ft->add_option("--kbar", fp.kbar,
                                 "declared invariant, derived when absent");
  ft->add_option("--f0", fp.f0);
  ft->add_option("--df0", fp.df0);

  forge::ExtremalSurfaceParams ep;
  auto* ext = solve->add_subcommand(
      "extremal", "K''' + K K' = 0 extremal curvature orbits");
  ext->add_option("--c", ep.c, "2K'' + K^2 = c");
  ext->add_option("--d", ep.d, "K'^2 = cK - K^3/3 + d");
  auto* ext_K0 = ext->add_option(
      "--K0", ep.K0, "start value; largest root of P when absent");
  auto* ext_dK0 = ext->add_option("--dK0", ep.dK0);

  forge::IteratedWarpProblem wp;
  double wp_c = 0.0, wp_e = 0.0;
  auto* warp = solve->add_subcommand("warp", "iterated warp profile u(x)");
  warp->add_option("--n", wp.n, "fiber dimension + 1")->check(CLI::Range(3, 64));
  warp->add_option("--k", wp.k, "fiber curvature: Ric_fiber = k(n-2) g");
  warp->add_option("--d", wp.d, "ambient constant is 2d");
  warp->add_option("--u0", wp.u0);
  warp->add_option("--du0", wp.du0);
  auto* warp_c = warp->add_option(
      "--c", wp_c, "declared first integral, derived when absent");
  auto* warp_e = warp->add_option("--e", wp_e, "declared oscillator integral");

  for (auto* fam : {brink, ft, ext}) {
    fam->add_option("--t0", sc.t0);
    fam->add_option("--t1", sc.t1);
    fam->add_option("--step", sc.step, "fixed RK4 step")->check(CLI::PositiveNumber);
    fam->add_option("--emit", sc.emit, "write the trajectory as CSV");
    fam->add_flag("--timings", sc.timings);
  }
  warp->add_option("--x0", sc.t0);
  warp->add_option("--x1", sc.t1);
  warp->add_option("--step", sc.step, "fixed RK4 step")->check(CLI::PositiveNumber);
  warp->add_option("--emit", sc.emit, "write the trajectory as CSV");
  warp->add_flag("--timings", sc.timings);

  ClassifyArgs ca;
  auto* classify =
      app.add_subcommand("classify", "orbit classification for u'^2 = u^(2-n) P(u)");
  classify->add_option("--n", ca.n)->required()->check(CLI::Range(3, 64));
  classify->add_option("--kbar", ca.kbar)->required();
  classify->add_option("--k", ca.k)->required();
  classify->add_option("--c", ca.c)->required();

  DropArgs da;
  auto* drop = app.add_subcommand(
      "droplemma", "obstruction polynomial phi_m and orbit normalization");
  auto* drop_m = drop->add_option("--m", da.m, "polynomial index, 2..60");
  auto* drop_n = drop->add_option("--n", da.n, "instance dimension");
  drop->add_option("--alpha", da.alpha);
  drop->add_option("--beta", da.beta);

  CatalogArgs cga;
  cga.tol = tol_default;
  auto* catalog = app.add_subcommand("catalog", "bundled example metrics");
  catalog->require_subcommand(1);
  auto* clist = catalog->add_subcommand("list", "names, kinds, citations");
  auto* cshow = catalog->add_subcommand("show", "dump one entry");
  cshow->add_option("name", cga.name)->required();
  auto* cverify = catalog->add_subcommand("verify", "run expectations");
  cverify->add_option("name", cga.name, "single entry; all when absent");
  cverify->add_option("--grid", cga.grid)->check(CLI::PositiveNumber);
  cverify->add_option("--tol", cga.tol);
  cverify->add_flag("--timings", cga.timings);
  cverify->add_flag("--parallel", cga.parallel);
  for (auto* c : {clist, cshow, cverify})
    c->add_option("--dir", cga.dir, "catalog directory override");

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "surface-of-revolution data");
  profile->require_subcommand(1);
  auto* fig1 = profile->add_subcommand("figure1", "extremal orbit surface");
  fig1->add_option("--c", pa.c, "2K'' + K^2 = c");
  fig1->add_option("--d", pa.d, "K'^2 = cK - K^3/3 + d");
  double pa_K0 = 0.0, pa_dK0 = 0.0;
  auto* fig1_K0 = fig1->add_option("--K0", pa_K0);
  auto* fig1_dK0 = fig1->add_option("--dK0", pa_dK0);
  fig1->add_option("--t1", pa.t1);
  fig1->add_option("--step", pa.step)->check(CLI::PositiveNumber);
  auto* belt = profile->add_subcommand("beltrami", "r = 24 t^-3 pseudosphere");
  belt->add_option("--t1", pa.t1);
  belt->add_option("--steps", pa.steps)->check(CLI::PositiveNumber);
  for (auto* c : {fig1, belt})
    c->add_option("--emit", pa.emit, "write t,r,h,K rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (verify->parsed()) return run_verify(va);
    if (solve->parsed()) {
      ordered_json j;
      j["command"] = "solve";
      j["version"] = kVersion;
      if (brink->parsed()) {
        j["family"] = "brinkmann";
        j["params"] = {{"eps", bp.eps},     {"k", bp.k},
                       {"phi0", bp.phi0},   {"dphi0", bp.dphi0},
                       {"ddphi0", bp.ddphi0}};
        const auto r = forge::solve_brinkmann(bp, sc.t0, sc.t1, sc.step);
        j["kstar"] = r.kstar;
        return finish_solve(j, r.traj, sc);
      }
      if (ft->parsed()) {
        if (ft_kbar->count() == 0)
          fp.kbar = fp.kstar * fp.f0 * fp.f0 - fp.eps * fp.df0 * fp.df0;
        j["family"] = "ft";
        j["params"] = {{"eps", fp.eps}, {"kstar", fp.kstar},
                       {"kbar", fp.kbar}, {"f0", fp.f0}, {"df0", fp.df0}};
        const auto tr = forge::solve_ft(fp, sc.t0, sc.t1, sc.step);
        return finish_solve(j, tr, sc);
      }
      if (ext->parsed()) {
        if (ext_K0->count() == 0) {
          const auto roots = cubic_roots(ep.c, ep.d);
          if (roots.empty())
            throw std::invalid_argument(
                "P(K) = cK - K^3/3 + d has no real root; pass --K0");
          ep.K0 = roots.back();
          ep.dK0 = 0.0;
        } else if (ext_dK0->count() == 0) {
          const double pk = ep.c * ep.K0 - ep.K0 * ep.K0 * ep.K0 / 3.0 + ep.d;
          ep.dK0 = std::sqrt(std::max(0.0, pk));
        }
        j["family"] = "extremal";
        j["params"] = {
            {"c", ep.c}, {"d", ep.d}, {"K0", ep.K0}, {"dK0", ep.dK0}};
        const auto tr = forge::solve_extremal(ep, sc.t0, sc.t1, sc.step);
        return finish_solve(j, tr, sc);
      }
      if (warp_c->count() > 0) wp.c = wp_c;
      if (warp_e->count() > 0) wp.e = wp_e;
      j["family"] = "warp";
      j["params"] = {{"n", wp.n}, {"k", wp.k}, {"d", wp.d},
                     {"u0", wp.u0}, {"du0", wp.du0}};
      const auto r = forge::solve_iterated_warp(wp, sc.t0, sc.t1, sc.step);
      j["c"] = r.c;
      j["e"] = r.e;
      j["kbar"] = r.kbar;
      j["lambda"] = 2.0 * wp.d;
      return finish_solve(j, r.traj, sc);
    }
    if (classify->parsed()) return run_classify(ca);
    if (drop->parsed()) {
      da.has_m = drop_m->count() > 0;
      da.has_instance = drop_n->count() > 0;
      return run_droplemma(da);
    }
    if (catalog->parsed()) {
      if (clist->parsed()) return run_catalog_list(cga);
      if (cshow->parsed()) return run_catalog_show(cga);
      return run_catalog_verify(cga);
    }
    if (profile->parsed()) {
      if (belt->parsed()) return run_profile_beltrami(pa);
      if (fig1_K0->count() > 0) pa.K0 = pa_K0;
      if (fig1_dK0->count() > 0) pa.dK0 = pa_dK0;
      return run_profile_figure1(pa);
    }
  } catch (const forge::ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ", col "
              << e.col << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
