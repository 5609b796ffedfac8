#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/expr.hpp"
#include "forge/jets.hpp"

namespace forge {

// Metric description tree.
//
//   node := diag(c1,..,ck; s1,..,sk; e1,..,ek)     s in {+1,-1}, g_ii = s_i*e_i
//         | product(node, node)
//         | warped(base, w, fiber)                  g = g_base + w^2 g_fiber
//         | conformal(e, node)                      g = e^2 g_inner
//         | sphere(n[;s]) | hyperbolic(n[;s])       iterated polar charts
//         | flat(n[;s1,..,sn])
//         | ppwave(H=expr)                          chart (u,v,x,y)
//         | fubinistudy()                           CP^2 chart (z1,..,z4)
//
// Coordinates must be unique across the composed tree; collisions are renamed
// left to right with numeric suffixes (t, t_2, t_3, ...). Expressions attached
// to a leaf (diag entries, ppwave H) refer to the leaf's own declared names;
// a warp factor refers to the post-rename names of its base, a conformal
// factor to those of its inner metric.
struct MetricNode;
using MetricNodePtr = std::shared_ptr<const MetricNode>;

struct MetricNode {
  enum class Kind {
    Diag,
    Product,
    Warped,
    Conformal,
    Sphere,
    Hyperbolic,
    Flat,
    PpWave,
    FubiniStudy,
  };

  Kind kind = Kind::Diag;
  std::vector<std::string> coords;  // Diag
  std::vector<int> signs;           // Diag; Flat signature when given
  std::vector<ExprPtr> entries;     // Diag
  MetricNodePtr a, b;               // children
  ExprPtr expr;                     // warp / conformal factor / H
  int n = 0;                        // sugar dimension
  int sign = 1;                     // Sphere/Hyperbolic overall sign
  int line = 1, col = 1;
};

MetricNodePtr mk_diag(std::vector<std::string> coords, std::vector<int> signs,
                      std::vector<ExprPtr> entries);
MetricNodePtr mk_product(MetricNodePtr a, MetricNodePtr b);
MetricNodePtr mk_warped(MetricNodePtr base, ExprPtr warp, MetricNodePtr fiber);
MetricNodePtr mk_conformal(ExprPtr factor, MetricNodePtr inner);
MetricNodePtr mk_sphere(int n, int sign = 1);
MetricNodePtr mk_hyperbolic(int n, int sign = 1);
MetricNodePtr mk_flat(int n, std::vector<int> signs = {});
MetricNodePtr mk_ppwave(ExprPtr H);
MetricNodePtr mk_fubini_study();

std::string to_string(const MetricNodePtr& node);
bool structurally_equal(const MetricNodePtr& a, const MetricNodePtr& b);

// Symmetric matrix of order-2 jets of the metric coefficients at one point.
struct MetricJets {
  int dim = 0;
  std::vector<Jet2> m;  // row-major, symmetric

  const Jet2& at(int i, int j) const {
    return m[static_cast<size_t>(i) * static_cast<size_t>(dim) +
             static_cast<size_t>(j)];
  }
  Jet2& at(int i, int j) {
    return m[static_cast<size_t>(i) * static_cast<size_t>(dim) +
             static_cast<size_t>(j)];
  }
};

namespace detail {
struct Plan;
}

// A parsed and resolved metric: global coordinate list, signature, and an
// evaluation plan. Evaluation guards: non-finite jet components, singular
// coefficient matrices (|det| <= 1e-12 times the Hadamard row-norm bound),
// conformal factors with |e| outside (1e-12, 1e6).
class MetricSpec {
 public:
  MetricSpec() = default;

  int dim() const { return dim_; }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::vector<int>& signature() const { return signature_; }
  const MetricNodePtr& ast() const { return root_; }
  std::string text() const { return to_string(root_); }

  MetricJets eval_jets(const std::vector<double>& point) const;
  // Plain-value evaluation on an independent arithmetic path (no jets).
  std::vector<double> eval_values(const std::vector<double>& point) const;

  // Width of the left factor when the root is product(...), else nullopt.
  std::optional<int> left_block_dim() const;

  friend MetricSpec metric_from_ast(const MetricNodePtr& root);

 private:
  MetricNodePtr root_;
  std::shared_ptr<const detail::Plan> plan_;
  std::vector<std::string> coords_;
  std::vector<int> signature_;
  int dim_ = 0;
};

MetricSpec metric_from_ast(const MetricNodePtr& root);
MetricSpec parse_metric(const std::string& text);

// Per-coordinate evaluation boxes.
using DomainBox = std::map<std::string, std::pair<double, double>>;

// Accepts raw DSL text or a JSON envelope {"metric": "...", "domain":
// {"t": [lo, hi], ...}}.
struct MetricInput {
  MetricSpec spec;
  DomainBox domain;
};
MetricInput parse_metric_input(const std::string& text);

}  // namespace forge
