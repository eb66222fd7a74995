#pragma once

#include "zar/expr.hpp"

#include <functional>
#include <optional>
#include <string>

namespace zar {

/// Nonnegative rational or +infinity.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(Rational q);  // NOLINT: implicit on purpose
  ExtReal(long long n) : ExtReal(Rational(n)) {}  // NOLINT
  static ExtReal infinity();

  bool is_infinite() const noexcept { return inf_; }
  // Requires a finite value.
  const Rational& value() const;
  double to_double() const;

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
  // 0 * inf = 0.
  friend ExtReal operator*(const ExtReal& a, const ExtReal& b);
  // a - b for finite b <= a.
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b);
  friend bool operator==(const ExtReal& a, const ExtReal& b);
  friend bool operator<(const ExtReal& a, const ExtReal& b);
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }

 private:
  Rational q_;
  bool inf_ = false;
};

std::string to_string(const ExtReal& x);
// |a - b| for finite values; infinity when exactly one side is infinite.
ExtReal distance(const ExtReal& a, const ExtReal& b);

/// A function State -> ExtReal. `reads` lists the variables the function
/// depends on, or is empty when unknown.
class Expectation {
 public:
  using Fn = std::function<ExtReal(const State&)>;

  Expectation(Fn fn, std::optional<VarSet> reads = std::nullopt);

  static Expectation constant(Rational q);
  static Expectation zero() { return constant(0); }
  static Expectation one() { return constant(1); }
  // Boolean expressions lift to indicators, numeric ones to their value.
  // Negative values raise NegativeExpectation when evaluated.
  static Expectation from_expr(const Expr& e);
  static Expectation indicator(const Expr& e);
  // [x = v], comparing values structurally.
  static Expectation point(Symbol x, Value v);
  // [. = s], comparing whole states.
  static Expectation state_is(State s);

  ExtReal operator()(const State& s) const { return fn_(s); }
  const std::optional<VarSet>& reads() const noexcept { return reads_; }

  // 1 - f. Raises BoundError if f exceeds one.
  Expectation complement() const;
  // a * f + g.
  static Expectation affine(const Rational& a, const Expectation& f, const Expectation& g);

 private:
  Fn fn_;
  std::optional<VarSet> reads_;
};

}  // namespace zar
