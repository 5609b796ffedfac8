#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/metric.hpp"

namespace forge {

// One pinned fixture: a metric, where to sample it, what must hold there,
// and a short source anchor. Stored one per JSON file:
//
//   {
//     "name": "mercator-n4",
//     "citation": "conformal cylinder over the unit 3-sphere",
//     "metric": "conformal(1/cosh(t), product(diag(t;+1;1), sphere(3)))",
//     "domain": {"t": [-0.8, 0.8]},
//     "expectation": {"kind": "einstein", "lambda": 3}
//   }
//
// expectation kinds and their parameters:
//   einstein           {lambda}     lambda_hat must match and spread vanish
//   ricci-flat         {}           max |Ric| < tol on the grid
//   non-einstein       {}           the Einstein check must fail
//   constant-curvature {kappa}      Riemann matches the space form exactly
//   gauss-curvature    {expr}       2-d metrics: scalar/2 == expr pointwise
//   conf-product       {phi, kbar}  factor equations for phi^-2(dt^2 + g)
//   corvino            {f}          f Ric - Hess f + (Lap f) g == 0
//   quasi-einstein     {phi}        precondition + rescaled identity
//   main-theorem-pair  {a, b, ktilde, eps1, eps2, n, nstar, lambda}
//   ppwave-ricci       {H}          Ric_uu == H_xx + H_yy, all else 0
struct CatalogEntry {
  std::string name;
  std::string citation;
  std::string metric_text;  // empty for metric-free kinds
  DomainBox domain;
  nlohmann::json expectation;
  std::string path;

  std::string kind() const { return expectation.value("kind", ""); }
};

struct CatalogVerifyReport {
  std::string name;
  std::string kind;
  bool pass = false;
  double lambda_hat = 0.0;
  bool has_lambda_hat = false;
  double residual = 0.0;
  int grid_size = 0;
  double tol = 0.0;
  double wall_ms = 0.0;
  std::string detail;  // expectation-specific notes
};

// Directory of *.json entries (sorted by name) or a single file holding one
// entry or an array. Schema violations, duplicate names or citations, and
// unparsable metrics all throw with the offending path in the message.
std::vector<CatalogEntry> load_catalog(const std::string& dir_or_file);

// EINSTEIN_FORGE_CATALOG when set, else the build-time default directory.
std::string default_catalog_dir();

const CatalogEntry& find_entry(const std::vector<CatalogEntry>& entries,
                               const std::string& name);

CatalogVerifyReport verify_entry(const CatalogEntry& entry, int grid_size,
                                 double tol);

}  // namespace forge
