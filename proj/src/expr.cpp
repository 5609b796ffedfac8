#include "forge/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "forge/errors.hpp"
#include "parse_internal.hpp"

namespace forge {

namespace {

ExprPtr make(Expr::Kind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

bool is_num(const ExprPtr& e, double v) {
  return e->kind == Expr::Kind::Number && e->number == v;
}

}  // namespace

ExprPtr ex_num(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->number = v;
  return e;
}

ExprPtr ex_sym(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Symbol;
  e->name = name;
  return e;
}

ExprPtr ex_neg(ExprPtr a) {
  if (a->kind == Expr::Kind::Number) return ex_num(-a->number);
  return make(Expr::Kind::Neg, std::move(a));
}

ExprPtr ex_add(ExprPtr a, ExprPtr b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return make(Expr::Kind::Add, std::move(a), std::move(b));
}

ExprPtr ex_sub(ExprPtr a, ExprPtr b) {
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return ex_neg(std::move(b));
  return make(Expr::Kind::Sub, std::move(a), std::move(b));
}

ExprPtr ex_mul(ExprPtr a, ExprPtr b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return ex_num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  return make(Expr::Kind::Mul, std::move(a), std::move(b));
}

ExprPtr ex_div(ExprPtr a, ExprPtr b) {
  if (is_num(a, 0.0)) return ex_num(0.0);
  if (is_num(b, 1.0)) return a;
  return make(Expr::Kind::Div, std::move(a), std::move(b));
}

ExprPtr ex_pow(ExprPtr a, ExprPtr b) {
  if (is_num(b, 1.0)) return a;
  return make(Expr::Kind::Pow, std::move(a), std::move(b));
}

ExprPtr ex_call(const std::string& fn, ExprPtr a) {
  auto e = make(Expr::Kind::Call, std::move(a));
  const_cast<Expr*>(e.get())->name = fn;
  return e;
}

// ---------------------------------------------------------------------------
// parser

namespace parse_detail {

namespace {

bool known_unary_fn(const std::string& f) {
  static const char* fns[] = {"sin", "cos",  "sinh", "cosh", "tanh",
                              "exp", "log", "sqrt", "abs"};
  for (const char* s : fns)
    if (f == s) return true;
  return false;
}

struct ExprParser {
  Lexer& lx;

  ExprPtr parse() { return parse_sum(); }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (lx.eat('+'))
        lhs = make(Expr::Kind::Add, lhs, parse_term());
      else if (lx.eat('-'))
        lhs = make(Expr::Kind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (lx.eat('*'))
        lhs = make(Expr::Kind::Mul, lhs, parse_unary());
      else if (lx.eat('/'))
        lhs = make(Expr::Kind::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  // Unary minus binds tighter than '*' but looser than '^',
  // so -x^2 reads as -(x^2). A negated literal folds to a negative Number,
  // keeping print/parse round trips structurally stable.
  ExprPtr parse_unary() {
    if (lx.eat('-')) {
      ExprPtr inner = parse_unary();
      if (inner->kind == Expr::Kind::Number) return ex_num(-inner->number);
      return make(Expr::Kind::Neg, inner);
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (lx.eat('^')) return make(Expr::Kind::Pow, base, parse_unary());
    return base;
  }

  ExprPtr parse_primary() {
    char c = lx.peek();
    if (c == '(') {
      lx.advance(1);
      ExprPtr e = parse_sum();
      lx.expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return ex_num(lx.number());
    if (lx.ident_ahead()) {
      std::string id = lx.ident();
      if (lx.peek() == '(') {
        lx.advance(1);
        if (id == "pow") {
          ExprPtr a = parse_sum();
          lx.expect(',');
          ExprPtr b = parse_sum();
          lx.expect(')');
          return make(Expr::Kind::Pow, a, b);
        }
        if (!known_unary_fn(id)) lx.fail("unknown function '" + id + "'");
        ExprPtr a = parse_sum();
        lx.expect(')');
        auto e = make(Expr::Kind::Call, a);
        const_cast<Expr*>(e.get())->name = id;
        return e;
      }
      return ex_sym(id);
    }
    lx.fail(c == '\0' ? "unexpected end of input"
                       : std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

ExprPtr parse_expression(Lexer& lx) {
  ExprParser p{lx};
  return p.parse();
}

}  // namespace parse_detail

ExprPtr parse_expr(const std::string& text) {
  parse_detail::Lexer lx(text);
  ExprPtr e = parse_detail::parse_expression(lx);
  if (lx.peek() != '\0') lx.fail("trailing input after expression");
  return e;
}

// ---------------------------------------------------------------------------
// printing

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

void print_rec(const ExprPtr& e, std::string& out, int parent_prec,
               bool right_side) {
  const int p = prec_of(*e);
  bool parens = p < parent_prec || (p == parent_prec && right_side);
  switch (e->kind) {
    case Expr::Kind::Number: {
      if (e->number < 0) {
        out += '(';
        out += format_double(e->number);
        out += ')';
        return;
      }
      out += format_double(e->number);
      return;
    }
    case Expr::Kind::Symbol:
      out += e->name;
      return;
    case Expr::Kind::Call:
      out += e->name;
      out += '(';
      print_rec(e->a, out, 0, false);
      out += ')';
      return;
    case Expr::Kind::Neg:
      if (parens) out += '(';
      out += '-';
      print_rec(e->a, out, p, true);
      if (parens) out += ')';
      return;
    default: break;
  }
  const char* op = e->kind == Expr::Kind::Add   ? "+"
                   : e->kind == Expr::Kind::Sub ? "-"
                   : e->kind == Expr::Kind::Mul ? "*"
                   : e->kind == Expr::Kind::Div ? "/"
                                                : "^";
  if (parens) out += '(';
  // '^' is right-associative: parenthesize the left child at equal precedence.
  bool right_assoc = e->kind == Expr::Kind::Pow;
  print_rec(e->a, out, p, right_assoc);
  out += op;
  print_rec(e->b, out, p, !right_assoc);
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::string out;
  print_rec(e, out, 0, false);
  return out;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number: return a->number == b->number;
    case Expr::Kind::Symbol: return a->name == b->name;
    case Expr::Kind::Call:
      return a->name == b->name && structurally_equal(a->a, b->a);
    case Expr::Kind::Neg: return structurally_equal(a->a, b->a);
    default:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
  }
}

std::set<std::string> free_symbols(const ExprPtr& e) {
  std::set<std::string> out;
  std::vector<const Expr*> stack{e.get()};
  while (!stack.empty()) {
    const Expr* cur = stack.back();
    stack.pop_back();
    if (cur->kind == Expr::Kind::Symbol) out.insert(cur->name);
    if (cur->a) stack.push_back(cur->a.get());
    if (cur->b) stack.push_back(cur->b.get());
  }
  return out;
}

// ---------------------------------------------------------------------------
// derivative

ExprPtr derivative(const ExprPtr& e, const std::string& sym) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Number: return ex_num(0.0);
    case K::Symbol: return ex_num(e->name == sym ? 1.0 : 0.0);
    case K::Neg: return ex_neg(derivative(e->a, sym));
    case K::Add: return ex_add(derivative(e->a, sym), derivative(e->b, sym));
    case K::Sub: return ex_sub(derivative(e->a, sym), derivative(e->b, sym));
    case K::Mul:
      return ex_add(ex_mul(derivative(e->a, sym), e->b),
                    ex_mul(e->a, derivative(e->b, sym)));
    case K::Div:
      return ex_div(ex_sub(ex_mul(derivative(e->a, sym), e->b),
                           ex_mul(e->a, derivative(e->b, sym))),
                    ex_mul(e->b, e->b));
    case K::Pow: {
      if (e->b->kind == K::Number) {
        const double n = e->b->number;
        return ex_mul(ex_mul(ex_num(n), ex_pow(e->a, ex_num(n - 1.0))),
                      derivative(e->a, sym));
      }
      // a^b = exp(b log a)
      ExprPtr da = derivative(e->a, sym);
      ExprPtr db = derivative(e->b, sym);
      ExprPtr t = ex_add(ex_mul(db, ex_call("log", e->a)),
                         ex_div(ex_mul(e->b, da), e->a));
      return ex_mul(ex_pow(e->a, e->b), t);
    }
    case K::Call: {
      ExprPtr da = derivative(e->a, sym);
      const std::string& f = e->name;
      ExprPtr outer;
      if (f == "sin") outer = ex_call("cos", e->a);
      else if (f == "cos") outer = ex_neg(ex_call("sin", e->a));
      else if (f == "sinh") outer = ex_call("cosh", e->a);
      else if (f == "cosh") outer = ex_call("sinh", e->a);
      else if (f == "tanh")
        outer = ex_sub(ex_num(1.0), ex_pow(ex_call("tanh", e->a), ex_num(2.0)));
      else if (f == "exp") outer = ex_call("exp", e->a);
      else if (f == "log") outer = ex_div(ex_num(1.0), e->a);
      else if (f == "sqrt")
        outer = ex_div(ex_num(1.0), ex_mul(ex_num(2.0), ex_call("sqrt", e->a)));
      else if (f == "abs") outer = ex_div(e->a, ex_call("abs", e->a));
      else
        throw DomainError(f, 0.0, "no derivative rule for function '" + f + "'");
      return ex_mul(outer, da);
    }
  }
  throw DomainError("derivative", 0.0, "unreachable");
}

// ---------------------------------------------------------------------------
// evaluation

void check_symbols(const ExprPtr& e, const Scope& scope,
                   const std::string& context) {
  for (const auto& s : free_symbols(e))
    if (!scope.count(s))
      throw DomainError("symbol", 0.0,
                        "unknown coordinate '" + s + "' in " + context);
}

namespace {

bool integral_exponent(double v, long long& n) {
  if (std::fabs(v) > 1e15 || v != std::floor(v)) return false;
  n = static_cast<long long>(v);
  return true;
}

template <class T>
T pow_integer(T base, long long n, const T& one) {
  bool invert = n < 0;
  unsigned long long m = invert ? static_cast<unsigned long long>(-n)
                                : static_cast<unsigned long long>(n);
  T acc = one;
  T cur = base;
  while (m) {
    if (m & 1ull) acc = acc * cur;
    cur = cur * cur;
    m >>= 1;
  }
  return invert ? one / acc : acc;
}

double apply_value(const std::string& f, double x) {
  if (f == "sin") return std::sin(x);
  if (f == "cos") return std::cos(x);
  if (f == "sinh") return std::sinh(x);
  if (f == "cosh") return std::cosh(x);
  if (f == "tanh") return std::tanh(x);
  if (f == "exp") return std::exp(x);
  if (f == "log") {
    if (x <= 0.0) throw DomainError("log", x, "log of a non-positive value");
    return std::log(x);
  }
  if (f == "sqrt") {
    if (x < 0.0) throw DomainError("sqrt", x, "sqrt of a negative value");
    return std::sqrt(x);
  }
  if (f == "abs") return std::fabs(x);
  throw DomainError(f, x, "unknown function '" + f + "'");
}

FnTag tag_of(const std::string& f) {
  if (f == "sin") return FnTag::Sin;
  if (f == "cos") return FnTag::Cos;
  if (f == "sinh") return FnTag::Sinh;
  if (f == "cosh") return FnTag::Cosh;
  if (f == "tanh") return FnTag::Tanh;
  if (f == "exp") return FnTag::Exp;
  if (f == "log") return FnTag::Log;
  if (f == "sqrt") return FnTag::Sqrt;
  if (f == "abs") return FnTag::Abs;
  throw DomainError(f, 0.0, "unknown function '" + f + "'");
}

int slot_of(const Expr& e, const Scope& scope) {
  auto it = scope.find(e.name);
  if (it == scope.end())
    throw DomainError("symbol", 0.0, "unknown coordinate '" + e.name + "'");
  return it->second;
}

}  // namespace

double eval_value(const ExprPtr& e, const std::vector<double>& point,
                  const Scope& scope) {
  using K = Expr::Kind;
  try {
    switch (e->kind) {
      case K::Number: return e->number;
      case K::Symbol: return point[static_cast<size_t>(slot_of(*e, scope))];
      case K::Neg: return -eval_value(e->a, point, scope);
      case K::Add:
        return eval_value(e->a, point, scope) + eval_value(e->b, point, scope);
      case K::Sub:
        return eval_value(e->a, point, scope) - eval_value(e->b, point, scope);
      case K::Mul:
        return eval_value(e->a, point, scope) * eval_value(e->b, point, scope);
      case K::Div: {
        double den = eval_value(e->b, point, scope);
        if (den == 0.0) throw DomainError("div", den, "division by zero");
        return eval_value(e->a, point, scope) / den;
      }
      case K::Pow: {
        double base = eval_value(e->a, point, scope);
        double expn = eval_value(e->b, point, scope);
        long long n;
        if (integral_exponent(expn, n)) {
          if (base == 0.0 && n < 0)
            throw DomainError("pow", base, "zero base with negative exponent");
          return pow_integer(base, n, 1.0);
        }
        if (base <= 0.0)
          throw DomainError("pow", base,
                            "non-integer power of a non-positive base");
        return std::pow(base, expn);
      }
      case K::Call:
        return apply_value(e->name, eval_value(e->a, point, scope));
    }
  } catch (DomainError& err) {
    if (err.point.empty()) err.point = point;
    throw;
  }
  throw DomainError("eval", 0.0, "unreachable");
}

Jet2 eval_jet(const ExprPtr& e, const std::vector<double>& point,
              const Scope& scope) {
  using K = Expr::Kind;
  const int d = static_cast<int>(point.size());
  try {
    switch (e->kind) {
      case K::Number: return Jet2::constant(e->number, d);
      case K::Symbol: return lift_coordinate(slot_of(*e, scope), point);
      case K::Neg: return -eval_jet(e->a, point, scope);
      case K::Add:
        return eval_jet(e->a, point, scope) + eval_jet(e->b, point, scope);
      case K::Sub:
        return eval_jet(e->a, point, scope) - eval_jet(e->b, point, scope);
      case K::Mul:
        return eval_jet(e->a, point, scope) * eval_jet(e->b, point, scope);
      case K::Div:
        return eval_jet(e->a, point, scope) / eval_jet(e->b, point, scope);
      case K::Pow: {
        Jet2 base = eval_jet(e->a, point, scope);
        if (e->b->kind == K::Number) {
          long long n;
          if (integral_exponent(e->b->number, n)) {
            if (base.value() == 0.0 && n < 0)
              throw DomainError("pow", 0.0, "zero base with negative exponent");
            return pow_integer(base, n, Jet2::constant(1.0, d));
          }
          return jet_apply(FnTag::Pow, base, e->b->number);
        }
        Jet2 expn = eval_jet(e->b, point, scope);
        return jet_apply(FnTag::Exp, expn * jet_apply(FnTag::Log, base));
      }
      case K::Call:
        return jet_apply(tag_of(e->name), eval_jet(e->a, point, scope));
    }
  } catch (DomainError& err) {
    if (err.point.empty()) err.point = point;
    throw;
  }
  throw DomainError("eval", 0.0, "unreachable");
}

}  // namespace forge
