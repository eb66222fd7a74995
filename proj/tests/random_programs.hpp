#pragma once

#include "zar/command.hpp"
#include "zar/expectation.hpp"

#include <random>
#include <vector>

namespace zar::testing {

/// Well-typed random loop-free programs over Int variables a, b, c and Bool
/// variables x, y. Biases and ranges are built to stay in range.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  Command command(int depth) {
    int k = pick(depth <= 0 ? 4 : 10);
    switch (k) {
      case 0: return Command::skip();
      case 1: return Command::assign(int_var(), int_expr(2));
      case 2: return Command::assign(bool_var(), bool_expr(2));
      case 3: return Command::observe(pick(3) == 0 ? bool_expr(1) : !Expr::boolean(false));
      case 4:
      case 5: return Command::seq(command(depth - 1), command(depth - 1));
      case 6: return Command::ite(bool_expr(2), command(depth - 1), command(depth - 1));
      case 7:
      case 8: return Command::choice(bias(), command(depth - 1), command(depth - 1));
      default: return Command::uniform(Expr::integer(1) + abs(int_expr(1)) % Expr::integer(5), int_var(), command(depth - 1));
    }
  }

  Expr int_expr(int depth) {
    int k = pick(depth <= 0 ? 2 : 6);
    switch (k) {
      case 0: return Expr::integer(pick(9) - 4);
      case 1: return Expr::var(int_var());
      case 2: return int_expr(depth - 1) + int_expr(depth - 1);
      case 3: return int_expr(depth - 1) - int_expr(depth - 1);
      case 4: return int_expr(depth - 1) * Expr::integer(pick(3) + 1);
      default: return floor(int_expr(depth - 1) / Expr::integer(pick(3) + 1));
    }
  }

  Expr bool_expr(int depth) {
    int k = pick(depth <= 0 ? 2 : 6);
    switch (k) {
      case 0: return Expr::boolean(pick(2) == 0);
      case 1: return Expr::var(bool_var());
      case 2: return lt(int_expr(depth - 1), int_expr(depth - 1));
      case 3: return eq(int_expr(depth - 1), int_expr(depth - 1));
      case 4: return bool_expr(depth - 1) && !bool_expr(depth - 1);
      default: return is_even(int_expr(depth - 1)) || bool_expr(depth - 1);
    }
  }

  // A constant in [0, 1], or a state-dependent one.
  Expr bias() {
    if (pick(4) == 0) return abs(int_expr(1)) % Expr::integer(4) / Expr::integer(3);
    int d = 1 + pick(8);
    return Expr::rational(pick(d + 1), d);
  }

  // [v = k] for a random variable and value.
  Expectation indicator() {
    if (pick(2) == 0) return Expectation::point(bool_var(), Value::boolean(pick(2) == 0));
    return Expectation::point(int_var(), Value::integer(pick(7) - 3));
  }

  State state() {
    State s;
    for (Symbol v : ints()) s.set(v, Value::integer(pick(7) - 3));
    for (Symbol v : bools()) s.set(v, Value::boolean(pick(2) == 0));
    return s;
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  static const std::vector<Symbol>& ints() {
    static const std::vector<Symbol> vs{Symbol("a"), Symbol("b"), Symbol("c")};
    return vs;
  }
  static const std::vector<Symbol>& bools() {
    static const std::vector<Symbol> vs{Symbol("x"), Symbol("y")};
    return vs;
  }
  Symbol int_var() { return ints()[pick(3)]; }
  Symbol bool_var() { return bools()[pick(2)]; }

  std::mt19937_64 rng_;
};

}  // namespace zar::testing
