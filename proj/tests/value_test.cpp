#include "zar/error.hpp"
#include "zar/expr.hpp"

#include <gtest/gtest.h>

namespace zar {
namespace {

const Symbol h("h"), a("a"), b("b"), x("x");

TEST(ValueTest, UnboundReadsZero) {
  EXPECT_EQ(eval_expr(Expr::var(x), State{}), Value::integer(0));
  EXPECT_FALSE(State{}.contains(x));
}

TEST(ValueTest, StateUpdate) {
  EXPECT_EQ(State{}.update(h, Value::integer(1)), (State{{h, Value::integer(1)}}));
  State one{{h, Value::integer(1)}};
  EXPECT_EQ(one.update(h, Value::integer(2)), (State{{h, Value::integer(2)}}));
  EXPECT_EQ(one.lookup(h), Value::integer(1));
  State s{{a, Value::boolean(true)}};
  EXPECT_EQ(s.update(b, Value::boolean(false)), (State{{a, Value::boolean(true)}, {b, Value::boolean(false)}}));
}

TEST(ValueTest, BindingsSortedByName) {
  State s = State{}.update(x, Value::integer(1)).update(a, Value::integer(2)).update(h, Value::integer(3));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.bindings()[0].first, a);
  EXPECT_EQ(s.bindings()[1].first, h);
  EXPECT_EQ(s.bindings()[2].first, x);
  EXPECT_EQ(to_string(s), "{a = 2, h = 3, x = 1}");
}

TEST(ValueTest, EqualStatesHashEqual) {
  State s = State{}.update(a, Value::integer(1)).update(b, Value::rational(Rational(1, 3)));
  State t = State{}.update(b, Value::rational(Rational(1, 3))).update(a, Value::integer(1));
  EXPECT_EQ(s, t);
  EXPECT_EQ(s.hash(), t.hash());
  t.set(a, Value::integer(2));
  EXPECT_NE(s, t);
}

TEST(ValueTest, KindsAreDistinct) {
  EXPECT_NE(Value::integer(1), Value::rational(Rational(1)));
  EXPECT_NE(Value::integer(0), Value::boolean(false));
  EXPECT_LT(Value::integer(-3), Value::integer(2));
}

TEST(ExprTest, Examples) {
  EXPECT_EQ(eval_expr(is_prime(Expr::var(h)), State{{h, Value::integer(4)}}), Value::boolean(false));
  EXPECT_EQ(eval_expr(is_prime(Expr::var(h)), State{{h, Value::integer(7)}}), Value::boolean(true));
  EXPECT_EQ(eval_expr(Expr::integer(1) / Expr::integer(3) + Expr::integer(1) / Expr::integer(6), State{}),
            Value::rational(Rational(1, 2)));
}

TEST(ExprTest, Arithmetic) {
  State s{{x, Value::integer(-7)}};
  EXPECT_EQ(eval_expr(floor(Expr::var(x) / Expr::integer(2)), s), Value::integer(-4));
  EXPECT_EQ(eval_expr(abs(Expr::var(x)), s), Value::integer(7));
  EXPECT_EQ(eval_expr(Expr::var(x) % Expr::integer(3), s), Value::integer(2));
  EXPECT_EQ(eval_expr(is_even(Expr::var(x) + Expr::integer(1)), s), Value::boolean(true));
  EXPECT_EQ(eval_expr(Expr::integer(6) / Expr::integer(3), s), Value::rational(Rational(2)));
  EXPECT_EQ(eval_expr(eq(Expr::integer(2), Expr::rational(4, 2)), s), Value::boolean(true));
  EXPECT_EQ(eval_expr(le(Expr::rational(1, 3), Expr::rational(1, 2)), s), Value::boolean(true));
}

TEST(ExprTest, Errors) {
  auto kind = [](const Expr& e) {
    try {
      eval_expr(e, State{});
    } catch (const Error& err) {
      return err.kind();
    }
    return ErrorKind::kInternal;
  };
  EXPECT_EQ(kind(Expr::integer(1) / Expr::integer(0)), ErrorKind::kDivisionByZero);
  EXPECT_EQ(kind(Expr::integer(1) + Expr::boolean(true)), ErrorKind::kTypeError);
  EXPECT_EQ(kind(!Expr::integer(1)), ErrorKind::kTypeError);
  EXPECT_THROW(eval_bool(Expr::integer(1), State{}), Error);
}

TEST(ExprTest, FreeVars) {
  VarSet vs = free_vars(Expr::var(a) + Expr::var(b) * Expr::var(a));
  EXPECT_EQ(vs, (VarSet{a, b}));
}

}  // namespace
}  // namespace zar
