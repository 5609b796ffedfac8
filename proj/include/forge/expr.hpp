#pragma once

#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/jets.hpp"

namespace forge {

// Scalar expression tree over named coordinate symbols.
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' unary)?            right-associative
//   primary:= number | symbol | fn '(' expr (',' expr)* ')' | '(' expr ')'
//   fn     := sin cos sinh cosh tanh exp log sqrt pow abs
//
// pow(a, b) parses to the same node as a^b. Exponents that are integral
// literals are evaluated by repeated multiplication (valid for negative
// bases); everything else goes through exp(b*log(a)) and requires a > 0.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  double number = 0.0;   // Kind::Number
  std::string name;      // Kind::Symbol / Kind::Call
  ExprPtr a, b;          // operands (b unused for unary)
};

ExprPtr parse_expr(const std::string& text);

// Smart constructors; fold additive/multiplicative identities so derivative
// output stays printable.
ExprPtr ex_num(double v);
ExprPtr ex_sym(const std::string& name);
ExprPtr ex_neg(ExprPtr a);
ExprPtr ex_add(ExprPtr a, ExprPtr b);
ExprPtr ex_sub(ExprPtr a, ExprPtr b);
ExprPtr ex_mul(ExprPtr a, ExprPtr b);
ExprPtr ex_div(ExprPtr a, ExprPtr b);
ExprPtr ex_pow(ExprPtr a, ExprPtr b);
ExprPtr ex_call(const std::string& fn, ExprPtr a);

std::string to_string(const ExprPtr& e);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);
std::set<std::string> free_symbols(const ExprPtr& e);

// d(e)/d(sym), no simplification beyond identity folding.
ExprPtr derivative(const ExprPtr& e, const std::string& sym);

// Maps symbol names to slots of the evaluation point.
using Scope = std::unordered_map<std::string, int>;

// Throws DomainError("symbol", ...) naming the first symbol of e missing
// from scope.
void check_symbols(const ExprPtr& e, const Scope& scope,
                   const std::string& context);

double eval_value(const ExprPtr& e, const std::vector<double>& point,
                  const Scope& scope);
Jet2 eval_jet(const ExprPtr& e, const std::vector<double>& point,
              const Scope& scope);

// Shortest decimal form that parses back to exactly v.
std::string format_double(double v);

}  // namespace forge
