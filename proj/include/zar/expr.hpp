#pragma once

#include "zar/value.hpp"

#include <memory>
#include <set>

namespace zar {

enum class Op {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kFloor,
  kAbs,
  kEq,
  kLt,
  kLe,
  kAnd,
  kOr,
  kNot,
  kIsPrime,
  kIsEven,
};

bool is_unary(Op op);
bool is_binary(Op op);

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr() : Expr(constant(Value::integer(0))) {}

  static Expr constant(Value v);
  static Expr boolean(bool b) { return constant(Value::boolean(b)); }
  static Expr integer(long long n) { return constant(Value::integer(n)); }
  static Expr rational(Rational q) { return constant(Value::rational(std::move(q))); }
  static Expr rational(long long num, long long den);
  static Expr var(Symbol x);
  static Expr var(std::string_view x) { return var(Symbol(x)); }
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);

  Op op() const noexcept { return node_->op; }
  const Value& constant_value() const noexcept { return node_->constant; }
  Symbol variable() const noexcept { return node_->var; }
  const Expr& lhs() const { return *node_->lhs; }
  const Expr& rhs() const { return *node_->rhs; }
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op = Op::kConst;
    Value constant;
    Symbol var;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Convenience builders used by the standard library and tests.
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator%(Expr a, Expr b);
Expr operator&&(Expr a, Expr b);
Expr operator||(Expr a, Expr b);
Expr operator!(Expr a);
Expr eq(Expr a, Expr b);
Expr lt(Expr a, Expr b);
Expr le(Expr a, Expr b);
Expr floor(Expr a);
Expr abs(Expr a);
Expr is_prime(Expr a);
Expr is_even(Expr a);

Value eval_expr(const Expr& e, const State& s);
// Evaluates and requires a Bool result.
bool eval_bool(const Expr& e, const State& s);

void collect_free_vars(const Expr& e, VarSet& out);
VarSet free_vars(const Expr& e);

bool is_prime(const Integer& n);

}  // namespace zar
