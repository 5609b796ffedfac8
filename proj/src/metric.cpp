#include "forge/metric.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/linalg.hpp"
#include "parse_internal.hpp"

namespace forge {

// ---------------------------------------------------------------------------
// AST constructors

namespace {

std::shared_ptr<MetricNode> node(MetricNode::Kind k) {
  auto n = std::make_shared<MetricNode>();
  n->kind = k;
  return n;
}

}  // namespace

MetricNodePtr mk_diag(std::vector<std::string> coords, std::vector<int> signs,
                      std::vector<ExprPtr> entries) {
  auto n = node(MetricNode::Kind::Diag);
  n->coords = std::move(coords);
  n->signs = std::move(signs);
  n->entries = std::move(entries);
  return n;
}

MetricNodePtr mk_product(MetricNodePtr a, MetricNodePtr b) {
  auto n = node(MetricNode::Kind::Product);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

MetricNodePtr mk_warped(MetricNodePtr base, ExprPtr warp, MetricNodePtr fiber) {
  auto n = node(MetricNode::Kind::Warped);
  n->a = std::move(base);
  n->b = std::move(fiber);
  n->expr = std::move(warp);
  return n;
}

MetricNodePtr mk_conformal(ExprPtr factor, MetricNodePtr inner) {
  auto n = node(MetricNode::Kind::Conformal);
  n->a = std::move(inner);
  n->expr = std::move(factor);
  return n;
}

MetricNodePtr mk_sphere(int dim, int sign) {
  auto n = node(MetricNode::Kind::Sphere);
  n->n = dim;
  n->sign = sign;
  return n;
}

MetricNodePtr mk_hyperbolic(int dim, int sign) {
  auto n = node(MetricNode::Kind::Hyperbolic);
  n->n = dim;
  n->sign = sign;
  return n;
}

MetricNodePtr mk_flat(int dim, std::vector<int> signs) {
  auto n = node(MetricNode::Kind::Flat);
  n->n = dim;
  n->signs = std::move(signs);
  return n;
}

MetricNodePtr mk_ppwave(ExprPtr H) {
  auto n = node(MetricNode::Kind::PpWave);
  n->expr = std::move(H);
  return n;
}

MetricNodePtr mk_fubini_study() { return node(MetricNode::Kind::FubiniStudy); }

// ---------------------------------------------------------------------------
// printing / structural equality

namespace {

void print_node(const MetricNodePtr& n, std::string& out) {
  using K = MetricNode::Kind;
  switch (n->kind) {
    case K::Diag: {
      out += "diag(";
      for (size_t i = 0; i < n->coords.size(); ++i) {
        if (i) out += ',';
        out += n->coords[i];
      }
      out += ';';
      for (size_t i = 0; i < n->signs.size(); ++i) {
        if (i) out += ',';
        out += n->signs[i] > 0 ? "+1" : "-1";
      }
      out += ';';
      for (size_t i = 0; i < n->entries.size(); ++i) {
        if (i) out += ',';
        out += to_string(n->entries[i]);
      }
      out += ')';
      return;
    }
    case K::Product:
      out += "product(";
      print_node(n->a, out);
      out += ',';
      print_node(n->b, out);
      out += ')';
      return;
    case K::Warped:
      out += "warped(";
      print_node(n->a, out);
      out += ',';
      out += to_string(n->expr);
      out += ',';
      print_node(n->b, out);
      out += ')';
      return;
    case K::Conformal:
      out += "conformal(";
      out += to_string(n->expr);
      out += ',';
      print_node(n->a, out);
      out += ')';
      return;
    case K::Sphere:
    case K::Hyperbolic:
      out += n->kind == K::Sphere ? "sphere(" : "hyperbolic(";
      out += std::to_string(n->n);
      if (n->sign < 0) out += ";-1";
      out += ')';
      return;
    case K::Flat: {
      out += "flat(";
      out += std::to_string(n->n);
      bool any_neg = std::any_of(n->signs.begin(), n->signs.end(),
                                 [](int s) { return s < 0; });
      if (any_neg) {
        out += ';';
        for (size_t i = 0; i < n->signs.size(); ++i) {
          if (i) out += ',';
          out += n->signs[i] > 0 ? "+1" : "-1";
        }
      }
      out += ')';
      return;
    }
    case K::PpWave:
      out += "ppwave(H=";
      out += to_string(n->expr);
      out += ')';
      return;
    case K::FubiniStudy:
      out += "fubinistudy()";
      return;
  }
}

}  // namespace

std::string to_string(const MetricNodePtr& n) {
  std::string out;
  print_node(n, out);
  return out;
}

bool structurally_equal(const MetricNodePtr& a, const MetricNodePtr& b) {
  using K = MetricNode::Kind;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case K::Diag: {
      if (a->coords != b->coords || a->signs != b->signs ||
          a->entries.size() != b->entries.size())
        return false;
      for (size_t i = 0; i < a->entries.size(); ++i)
        if (!structurally_equal(a->entries[i], b->entries[i])) return false;
      return true;
    }
    case K::Product:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
    case K::Warped:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b) &&
             structurally_equal(a->expr, b->expr);
    case K::Conformal:
      return structurally_equal(a->a, b->a) &&
             structurally_equal(a->expr, b->expr);
    case K::Sphere:
    case K::Hyperbolic:
      return a->n == b->n && a->sign == b->sign;
    case K::Flat: {
      if (a->n != b->n) return false;
      auto norm = [](const MetricNode& m) {
        return m.signs.empty() ? std::vector<int>(static_cast<size_t>(m.n), 1)
                               : m.signs;
      };
      return norm(*a) == norm(*b);
    }
    case K::PpWave:
      return structurally_equal(a->expr, b->expr);
    case K::FubiniStudy:
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

using parse_detail::Lexer;

int int_literal(Lexer& lx) {
  double v = lx.number();
  if (v != std::floor(v) || v < 0 || v > 64) lx.fail("expected a small integer");
  return static_cast<int>(v);
}

MetricNodePtr parse_node(Lexer& lx) {
  lx.skip_ws();
  const int line = lx.line, col = lx.col;
  if (!lx.ident_ahead()) lx.fail("expected a metric constructor");
  std::string id = lx.ident();
  lx.expect('(');

  std::shared_ptr<MetricNode> n;
  if (id == "diag") {
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::Diag;
    do n->coords.push_back(lx.ident());
    while (lx.eat(','));
    lx.expect(';');
    do n->signs.push_back(lx.sign_literal());
    while (lx.eat(','));
    lx.expect(';');
    do n->entries.push_back(parse_detail::parse_expression(lx));
    while (lx.eat(','));
    lx.expect(')');
  } else if (id == "product") {
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::Product;
    n->a = parse_node(lx);
    lx.expect(',');
    n->b = parse_node(lx);
    lx.expect(')');
  } else if (id == "warped") {
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::Warped;
    n->a = parse_node(lx);
    lx.expect(',');
    n->expr = parse_detail::parse_expression(lx);
    lx.expect(',');
    n->b = parse_node(lx);
    lx.expect(')');
  } else if (id == "conformal") {
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::Conformal;
    n->expr = parse_detail::parse_expression(lx);
    lx.expect(',');
    n->a = parse_node(lx);
    lx.expect(')');
  } else if (id == "sphere" || id == "hyperbolic") {
    int dim = int_literal(lx);
    int sign = 1;
    if (lx.eat(';')) sign = lx.sign_literal();
    lx.expect(')');
    n = std::make_shared<MetricNode>();
    n->kind = id == "sphere" ? MetricNode::Kind::Sphere
                             : MetricNode::Kind::Hyperbolic;
    n->n = dim;
    n->sign = sign;
  } else if (id == "flat") {
    int dim = int_literal(lx);
    std::vector<int> signs;
    if (lx.eat(';'))
      do signs.push_back(lx.sign_literal());
      while (lx.eat(','));
    lx.expect(')');
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::Flat;
    n->n = dim;
    n->signs = std::move(signs);
  } else if (id == "ppwave") {
    if (lx.ident() != "H") lx.fail("expected 'H=' inside ppwave(...)");
    lx.expect('=');
    auto H = parse_detail::parse_expression(lx);
    lx.expect(')');
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::PpWave;
    n->expr = H;
  } else if (id == "fubinistudy") {
    lx.expect(')');
    n = std::make_shared<MetricNode>();
    n->kind = MetricNode::Kind::FubiniStudy;
  } else {
    lx.fail("unknown metric constructor '" + id + "'");
  }
  n->line = line;
  n->col = col;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// resolution

namespace detail {

struct Plan {
  MetricNode::Kind kind = MetricNode::Kind::Diag;
  int offset = 0;
  int dim = 0;
  std::vector<int> signs;        // leaf: per-coordinate sign
  std::vector<ExprPtr> entries;  // leaf: diagonal coefficients
  Scope scope;                   // binding for entries / expr
  ExprPtr expr;                  // warp | conformal factor | H
  std::vector<std::unique_ptr<Plan>> kids;
};

}  // namespace detail

namespace {

using detail::Plan;

struct Resolver {
  std::vector<std::string> names;
  std::set<std::string> used;
  std::vector<int> signature;

  int declare(const std::string& want) {
    std::string name = want;
    int k = 2;
    while (used.count(name)) name = want + "_" + std::to_string(k++);
    used.insert(name);
    names.push_back(name);
    return static_cast<int>(names.size()) - 1;
  }
};

[[noreturn]] void resolve_fail(const MetricNode& n, const std::string& msg) {
  throw ParseError(msg, n.line, n.col);
}

void bind_or_fail(const MetricNode& n, const ExprPtr& e, const Scope& scope,
                  const std::string& context) {
  try {
    check_symbols(e, scope, context);
  } catch (const DomainError& err) {
    resolve_fail(n, err.what());
  }
}

std::unique_ptr<Plan> resolve(const MetricNodePtr& nptr, Resolver& R) {
  const MetricNode& n = *nptr;
  auto plan = std::make_unique<Plan>();
  plan->kind = n.kind;
  plan->offset = static_cast<int>(R.names.size());

  using K = MetricNode::Kind;
  switch (n.kind) {
    case K::Diag: {
      const size_t k = n.coords.size();
      if (k == 0) resolve_fail(n, "diag needs at least one coordinate");
      if (n.signs.size() != k || n.entries.size() != k)
        resolve_fail(n, "diag coordinate/sign/entry counts differ");
      std::set<std::string> local(n.coords.begin(), n.coords.end());
      if (local.size() != k)
        resolve_fail(n, "duplicate coordinate in diag(...)");
      for (size_t i = 0; i < k; ++i)
        plan->scope[n.coords[i]] = R.declare(n.coords[i]);
      plan->signs = n.signs;
      plan->entries = n.entries;
      for (const auto& e : n.entries)
        bind_or_fail(n, e, plan->scope, "a diag coefficient");
      plan->dim = static_cast<int>(k);
      for (int s : n.signs) R.signature.push_back(s);
      break;
    }
    case K::Sphere:
    case K::Hyperbolic: {
      if (n.n < 1) resolve_fail(n, "sphere/hyperbolic dimension must be >= 1");
      if (n.sign != 1 && n.sign != -1) resolve_fail(n, "sign must be +1 or -1");
      std::vector<std::string> local;
      local.push_back(R.names[static_cast<size_t>(R.declare("r"))]);
      for (int i = 1; i < n.n; ++i)
        local.push_back(
            R.names[static_cast<size_t>(R.declare("q" + std::to_string(i)))]);
      for (int i = 0; i < n.n; ++i)
        plan->scope[local[static_cast<size_t>(i)]] = plan->offset + i;
      ExprPtr acc = ex_num(1.0);
      for (int i = 0; i < n.n; ++i) {
        plan->entries.push_back(acc);
        const char* fn =
            (i == 0 && n.kind == K::Hyperbolic) ? "sinh" : "sin";
        acc = ex_mul(acc, ex_pow(ex_call(fn, ex_sym(local[static_cast<size_t>(i)])),
                                 ex_num(2.0)));
      }
      plan->signs.assign(static_cast<size_t>(n.n), n.sign);
      plan->dim = n.n;
      for (int i = 0; i < n.n; ++i) R.signature.push_back(n.sign);
      break;
    }
    case K::Flat: {
      if (n.n < 1) resolve_fail(n, "flat dimension must be >= 1");
      std::vector<int> signs = n.signs;
      if (signs.empty()) signs.assign(static_cast<size_t>(n.n), 1);
      if (static_cast<int>(signs.size()) != n.n)
        resolve_fail(n, "flat signature length differs from dimension");
      for (int i = 1; i <= n.n; ++i) R.declare("x" + std::to_string(i));
      plan->signs = signs;
      plan->entries.assign(static_cast<size_t>(n.n), ex_num(1.0));
      plan->dim = n.n;
      for (int s : signs) R.signature.push_back(s);
      break;
    }
    case K::PpWave: {
      static const char* names[4] = {"u", "v", "x", "y"};
      for (int i = 0; i < 4; ++i) plan->scope[names[i]] = R.declare(names[i]);
      plan->expr = n.expr;
      bind_or_fail(n, n.expr, plan->scope, "the ppwave profile H");
      plan->dim = 4;
      R.signature.push_back(-1);
      for (int i = 0; i < 3; ++i) R.signature.push_back(1);
      break;
    }
    case K::FubiniStudy: {
      for (int i = 1; i <= 4; ++i) R.declare("z" + std::to_string(i));
      plan->dim = 4;
      for (int i = 0; i < 4; ++i) R.signature.push_back(1);
      break;
    }
    case K::Product: {
      plan->kids.push_back(resolve(n.a, R));
      plan->kids.push_back(resolve(n.b, R));
      plan->dim = plan->kids[0]->dim + plan->kids[1]->dim;
      break;
    }
    case K::Warped: {
      plan->kids.push_back(resolve(n.a, R));
      plan->kids.push_back(resolve(n.b, R));
      plan->dim = plan->kids[0]->dim + plan->kids[1]->dim;
      const Plan& base = *plan->kids[0];
      for (int i = 0; i < base.dim; ++i)
        plan->scope[R.names[static_cast<size_t>(base.offset + i)]] =
            base.offset + i;
      plan->expr = n.expr;
      bind_or_fail(n, n.expr, plan->scope, "the warp factor");
      break;
    }
    case K::Conformal: {
      plan->kids.push_back(resolve(n.a, R));
      plan->dim = plan->kids[0]->dim;
      const Plan& inner = *plan->kids[0];
      for (int i = 0; i < inner.dim; ++i)
        plan->scope[R.names[static_cast<size_t>(inner.offset + i)]] =
            inner.offset + i;
      plan->expr = n.expr;
      bind_or_fail(n, n.expr, plan->scope, "the conformal factor");
      break;
    }
  }
  return plan;
}

}  // namespace

// ---------------------------------------------------------------------------
// evaluation

namespace {

// Shared recursion for jet-valued and plain-value evaluation.
template <class T>
struct EvalOps;

template <>
struct EvalOps<Jet2> {
  static Jet2 constant(double v, const std::vector<double>& pt) {
    return Jet2::constant(v, static_cast<int>(pt.size()));
  }
  static Jet2 coordinate(int i, const std::vector<double>& pt) {
    return lift_coordinate(i, pt);
  }
  static Jet2 entry(const ExprPtr& e, const std::vector<double>& pt,
                    const Scope& scope) {
    return eval_jet(e, pt, scope);
  }
  static double value(const Jet2& v) { return v.value(); }
};

template <>
struct EvalOps<double> {
  static double constant(double v, const std::vector<double>&) { return v; }
  static double coordinate(int i, const std::vector<double>& pt) {
    return pt[static_cast<size_t>(i)];
  }
  static double entry(const ExprPtr& e, const std::vector<double>& pt,
                      const Scope& scope) {
    return eval_value(e, pt, scope);
  }
  static double value(double v) { return v; }
};

template <class T>
void eval_plan(const Plan& p, const std::vector<double>& pt,
               std::vector<T>& G, int d) {
  using Ops = EvalOps<T>;
  auto at = [&](int i, int j) -> T& {
    return G[static_cast<size_t>(i) * static_cast<size_t>(d) +
             static_cast<size_t>(j)];
  };
  using K = MetricNode::Kind;
  switch (p.kind) {
    case K::Diag:
    case K::Sphere:
    case K::Hyperbolic:
    case K::Flat: {
      for (int i = 0; i < p.dim; ++i) {
        T e = Ops::entry(p.entries[static_cast<size_t>(i)], pt, p.scope);
        at(p.offset + i, p.offset + i) =
            static_cast<double>(p.signs[static_cast<size_t>(i)]) * e;
      }
      return;
    }
    case K::PpWave: {
      T H = Ops::entry(p.expr, pt, p.scope);
      const int o = p.offset;
      at(o, o) = -2.0 * H;
      at(o, o + 1) = Ops::constant(-1.0, pt);
      at(o + 1, o) = Ops::constant(-1.0, pt);
      at(o + 2, o + 2) = Ops::constant(1.0, pt);
      at(o + 3, o + 3) = Ops::constant(1.0, pt);
      return;
    }
    case K::FubiniStudy: {
      const int o = p.offset;
      T x0 = Ops::coordinate(o + 0, pt);
      T x1 = Ops::coordinate(o + 1, pt);
      T x2 = Ops::coordinate(o + 2, pt);
      T x3 = Ops::coordinate(o + 3, pt);
      T x[4] = {x0, x1, x2, x3};
      // Complex structure (z1, z2) = (x0 + i x1, x2 + i x3).
      T J[4] = {-1.0 * x1, x0, -1.0 * x3, x2};
      T rho = Ops::constant(1.0, pt) + x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3;
      T w = Ops::constant(1.0, pt) / (rho * rho);
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          T t = -1.0 * (x[i] * x[j]) - J[i] * J[j];
          if (i == j) t = t + rho;
          at(o + i, o + j) = t * w;
          at(o + j, o + i) = at(o + i, o + j);
        }
      return;
    }
    case K::Product: {
      eval_plan(*p.kids[0], pt, G, d);
      eval_plan(*p.kids[1], pt, G, d);
      return;
    }
    case K::Warped: {
      eval_plan(*p.kids[0], pt, G, d);
      eval_plan(*p.kids[1], pt, G, d);
      T w = Ops::entry(p.expr, pt, p.scope);
      T w2 = w * w;
      const Plan& fiber = *p.kids[1];
      for (int i = 0; i < fiber.dim; ++i)
        for (int j = 0; j < fiber.dim; ++j)
          at(fiber.offset + i, fiber.offset + j) =
              w2 * at(fiber.offset + i, fiber.offset + j);
      return;
    }
    case K::Conformal: {
      eval_plan(*p.kids[0], pt, G, d);
      T e = Ops::entry(p.expr, pt, p.scope);
      const double ev = Ops::value(e);
      if (std::fabs(ev) <= 1e-12) {
        DomainError err("conformal", ev, "conformal factor vanishes");
        err.point = pt;
        throw err;
      }
      if (std::fabs(ev) >= 1e6) {
        DomainError err("conformal", ev,
                        "conformal factor exceeds 1e6 (its reciprocal is "
                        "within 1e-6 of a zero)");
        err.point = pt;
        throw err;
      }
      T e2 = e * e;
      const Plan& inner = *p.kids[0];
      for (int i = 0; i < inner.dim; ++i)
        for (int j = 0; j < inner.dim; ++j)
          at(inner.offset + i, inner.offset + j) =
              e2 * at(inner.offset + i, inner.offset + j);
      return;
    }
  }
}

// Compares |det| against the Hadamard row-norm bound so the gate stays
// scale invariant even when diagonal entries span many orders of magnitude.
void check_not_singular(const std::vector<double>& values, int d,
                        const std::vector<double>& pt) {
  const double det = la::determinant(values, d);
  double scale = 1.0;
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = values[static_cast<size_t>(i) * d + j];
      row += v * v;
    }
    scale *= std::sqrt(row);
  }
  if (std::fabs(det) <= 1e-12 * scale)
    throw SingularMetricError("metric coefficient matrix is singular", pt);
}

}  // namespace

MetricJets MetricSpec::eval_jets(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != dim_)
    throw DomainError("metric", static_cast<double>(point.size()),
                      "evaluation point has wrong dimension");
  MetricJets G;
  G.dim = dim_;
  G.m.assign(static_cast<size_t>(dim_) * dim_, Jet2::constant(0.0, dim_));
  eval_plan(*plan_, point, G.m, dim_);
  std::vector<double> values(G.m.size());
  for (size_t i = 0; i < G.m.size(); ++i) values[i] = G.m[i].value();
  check_not_singular(values, dim_, point);
  return G;
}

std::vector<double> MetricSpec::eval_values(
    const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != dim_)
    throw DomainError("metric", static_cast<double>(point.size()),
                      "evaluation point has wrong dimension");
  std::vector<double> G(static_cast<size_t>(dim_) * dim_, 0.0);
  eval_plan(*plan_, point, G, dim_);
  check_not_singular(G, dim_, point);
  return G;
}

std::optional<int> MetricSpec::left_block_dim() const {
  if (root_->kind != MetricNode::Kind::Product) return std::nullopt;
  return plan_->kids[0]->dim;
}

MetricSpec metric_from_ast(const MetricNodePtr& root) {
  Resolver R;
  auto plan = resolve(root, R);
  MetricSpec spec;
  spec.root_ = root;
  spec.plan_ = std::shared_ptr<const Plan>(std::move(plan));
  spec.coords_ = std::move(R.names);
  spec.signature_ = std::move(R.signature);
  spec.dim_ = static_cast<int>(spec.coords_.size());
  return spec;
}

MetricSpec parse_metric(const std::string& text) {
  Lexer lx(text);
  MetricNodePtr root = parse_node(lx);
  if (lx.peek() != '\0') lx.fail("trailing input after metric");
  return metric_from_ast(root);
}

MetricInput parse_metric_input(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
    ++i;
  MetricInput input;
  if (i < text.size() && text[i] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad JSON metric envelope: ") + e.what(), 1, 1);
    }
    if (!j.contains("metric") || !j["metric"].is_string())
      throw ParseError("JSON envelope needs a string field \"metric\"", 1, 1);
    input.spec = parse_metric(j["metric"].get<std::string>());
    if (j.contains("domain")) {
      for (auto& [key, val] : j["domain"].items()) {
        if (!val.is_array() || val.size() != 2)
          throw ParseError("domain entries must be [lo, hi] pairs", 1, 1);
        double lo = val[0].get<double>(), hi = val[1].get<double>();
        if (!(lo < hi))
          throw ParseError("domain box for '" + key + "' has lo >= hi", 1, 1);
        if (std::find(input.spec.coords().begin(), input.spec.coords().end(),
                      key) == input.spec.coords().end())
          throw ParseError("domain names unknown coordinate '" + key + "'", 1, 1);
        input.domain[key] = {lo, hi};
      }
    }
  } else {
    input.spec = parse_metric(text);
  }
  return input;
}

}  // namespace forge
