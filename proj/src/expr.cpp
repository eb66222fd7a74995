#include "zar/expr.hpp"

#include "zar/error.hpp"

#include <boost/multiprecision/miller_rabin.hpp>
#include <random>

namespace zar {

namespace mp = boost::multiprecision;

bool is_unary(Op op) {
  switch (op) {
    case Op::kFloor:
    case Op::kAbs:
    case Op::kNot:
    case Op::kIsPrime:
    case Op::kIsEven:
      return true;
    default:
      return false;
  }
}

bool is_binary(Op op) { return op != Op::kConst && op != Op::kVar && !is_unary(op); }

Expr Expr::constant(Value v) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->constant = std::move(v);
  return Expr(std::move(n));
}

Expr Expr::rational(long long num, long long den) {
  return constant(Value::rational(make_rational(Integer(num), Integer(den))));
}

Expr Expr::var(Symbol x) {
  auto n = std::make_shared<Node>();
  n->op = Op::kVar;
  n->var = x;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::make_shared<const Expr>(std::move(a));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::make_shared<const Expr>(std::move(a));
  n->rhs = std::make_shared<const Expr>(std::move(b));
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::kConst: return a.constant_value() == b.constant_value();
    case Op::kVar: return a.variable() == b.variable();
    default: break;
  }
  if (!(a.lhs() == b.lhs())) return false;
  return is_unary(a.op()) || a.rhs() == b.rhs();
}

Expr operator+(Expr a, Expr b) { return Expr::binary(Op::kAdd, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Op::kSub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Op::kMul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Op::kDiv, std::move(a), std::move(b)); }
Expr operator%(Expr a, Expr b) { return Expr::binary(Op::kMod, std::move(a), std::move(b)); }
Expr operator&&(Expr a, Expr b) { return Expr::binary(Op::kAnd, std::move(a), std::move(b)); }
Expr operator||(Expr a, Expr b) { return Expr::binary(Op::kOr, std::move(a), std::move(b)); }
Expr operator!(Expr a) { return Expr::unary(Op::kNot, std::move(a)); }
Expr eq(Expr a, Expr b) { return Expr::binary(Op::kEq, std::move(a), std::move(b)); }
Expr lt(Expr a, Expr b) { return Expr::binary(Op::kLt, std::move(a), std::move(b)); }
Expr le(Expr a, Expr b) { return Expr::binary(Op::kLe, std::move(a), std::move(b)); }
Expr floor(Expr a) { return Expr::unary(Op::kFloor, std::move(a)); }
Expr abs(Expr a) { return Expr::unary(Op::kAbs, std::move(a)); }
Expr is_prime(Expr a) { return Expr::unary(Op::kIsPrime, std::move(a)); }
Expr is_even(Expr a) { return Expr::unary(Op::kIsEven, std::move(a)); }

bool is_prime(const Integer& n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (mp::bit_test(n, 0) == false) return false;
  if (n < Integer(1000000000000LL)) {
    const auto m = n.convert_to<std::uint64_t>();
    for (std::uint64_t d = 3; d * d <= m; d += 2) {
      if (m % d == 0) return false;
    }
    return true;
  }
  std::mt19937_64 gen(0x5eed);
  return mp::miller_rabin_test(n, 32, gen);
}

namespace {

[[noreturn]] void type_error(std::string_view what, const Value& v) {
  throw Error(ErrorKind::kTypeError,
              std::string(what) + " applied to " + std::string(to_string(v.kind())) +
                  " value " + to_string(v));
}

const Value& require_bool(std::string_view what, const Value& v) {
  if (!v.is_bool()) type_error(what, v);
  return v;
}

const Integer& require_int(std::string_view what, const Value& v) {
  if (!v.is_int()) type_error(what, v);
  return v.as_int();
}

void require_numeric(std::string_view what, const Value& v) {
  if (!v.is_numeric()) type_error(what, v);
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Value arith(Op op, const Value& a, const Value& b) {
  static constexpr std::string_view kNames[] = {"", "", "+", "-", "*", "/", "mod"};
  const auto name = kNames[static_cast<int>(op)];
  require_numeric(name, a);
  require_numeric(name, b);
  if (op == Op::kMod) {
    const Integer& x = require_int("mod", a);
    const Integer& y = require_int("mod", b);
    if (y == 0) throw Error(ErrorKind::kDivisionByZero, "mod by zero");
    return Value::integer(x - y * floor_div(x, y));
  }
  if (op == Op::kDiv) {
    Rational y = b.to_rational();
    if (y == 0) throw Error(ErrorKind::kDivisionByZero, "division by zero");
    return Value::rational(a.to_rational() / y);
  }
  if (a.is_int() && b.is_int()) {
    switch (op) {
      case Op::kAdd: return Value::integer(a.as_int() + b.as_int());
      case Op::kSub: return Value::integer(a.as_int() - b.as_int());
      default: return Value::integer(a.as_int() * b.as_int());
    }
  }
  Rational x = a.to_rational();
  Rational y = b.to_rational();
  switch (op) {
    case Op::kAdd: return Value::rational(x + y);
    case Op::kSub: return Value::rational(x - y);
    default: return Value::rational(x * y);
  }
}

bool numeric_less(const Value& a, const Value& b, bool or_equal) {
  const auto name = or_equal ? "<=" : "<";
  require_numeric(name, a);
  require_numeric(name, b);
  if (a.is_int() && b.is_int()) return or_equal ? a.as_int() <= b.as_int() : a.as_int() < b.as_int();
  Rational x = a.to_rational();
  Rational y = b.to_rational();
  return or_equal ? x <= y : x < y;
}

bool equal_values(const Value& a, const Value& b) {
  if (a.is_bool() || b.is_bool()) {
    if (a.is_bool() != b.is_bool()) type_error("=", a.is_bool() ? b : a);
    return a.as_bool() == b.as_bool();
  }
  if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
  return a.to_rational() == b.to_rational();
}

}  // namespace

Value eval_expr(const Expr& e, const State& s) {
  switch (e.op()) {
    case Op::kConst: return e.constant_value();
    case Op::kVar: return s.lookup(e.variable());
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
    case Op::kMod:
      return arith(e.op(), eval_expr(e.lhs(), s), eval_expr(e.rhs(), s));
    case Op::kFloor: {
      Value v = eval_expr(e.lhs(), s);
      require_numeric("floor", v);
      if (v.is_int()) return v;
      const Rational& q = v.as_rat();
      return Value::integer(floor_div(mp::numerator(q), mp::denominator(q)));
    }
    case Op::kAbs: {
      Value v = eval_expr(e.lhs(), s);
      require_numeric("abs", v);
      if (v.is_int()) return Value::integer(mp::abs(v.as_int()));
      return Value::rational(mp::abs(v.as_rat()));
    }
    case Op::kEq: return Value::boolean(equal_values(eval_expr(e.lhs(), s), eval_expr(e.rhs(), s)));
    case Op::kLt: return Value::boolean(numeric_less(eval_expr(e.lhs(), s), eval_expr(e.rhs(), s), false));
    case Op::kLe: return Value::boolean(numeric_less(eval_expr(e.lhs(), s), eval_expr(e.rhs(), s), true));
    case Op::kAnd: {
      if (!require_bool("and", eval_expr(e.lhs(), s)).as_bool()) return Value::boolean(false);
      return require_bool("and", eval_expr(e.rhs(), s));
    }
    case Op::kOr: {
      if (require_bool("or", eval_expr(e.lhs(), s)).as_bool()) return Value::boolean(true);
      return require_bool("or", eval_expr(e.rhs(), s));
    }
    case Op::kNot: return Value::boolean(!require_bool("not", eval_expr(e.lhs(), s)).as_bool());
    case Op::kIsPrime: return Value::boolean(is_prime(require_int("is_prime", eval_expr(e.lhs(), s))));
    case Op::kIsEven: return Value::boolean(!mp::bit_test(mp::abs(require_int("is_even", eval_expr(e.lhs(), s))), 0));
  }
  throw Error(ErrorKind::kInternal, "unknown expression operator");
}

bool eval_bool(const Expr& e, const State& s) {
  Value v = eval_expr(e, s);
  if (!v.is_bool()) throw Error(ErrorKind::kTypeError, "expected Bool, got " + to_string(v));
  return v.as_bool();
}

void collect_free_vars(const Expr& e, VarSet& out) {
  switch (e.op()) {
    case Op::kConst: return;
    case Op::kVar: out.insert(e.variable()); return;
    default: break;
  }
  collect_free_vars(e.lhs(), out);
  if (is_binary(e.op())) collect_free_vars(e.rhs(), out);
}

VarSet free_vars(const Expr& e) {
  VarSet out;
  collect_free_vars(e, out);
  return out;
}

}  // namespace zar
