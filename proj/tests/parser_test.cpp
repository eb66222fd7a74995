#include "zar/error.hpp"
#include "zar/parser.hpp"
#include "zar/stdlib.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

namespace zar {
namespace {

const Symbol a("a"), b("b"), h("h"), p("p");

Command flip_cmd(Symbol x, Expr q) {
  return Command::choice(std::move(q), Command::assign(x, Expr::boolean(true)), Command::assign(x, Expr::boolean(false)));
}

TEST(ParserTest, Examples) {
  EXPECT_EQ(parse_program("skip"), Command::skip());
  EXPECT_EQ(parse_program("flip a 2/3"), flip_cmd(a, Expr::rational(2, 3)));
  EXPECT_EQ(parse_program("while a = b { flip a p; flip b p }"),
            Command::loop(eq(Expr::var(a), Expr::var(b)),
                          Command::seq(flip_cmd(a, Expr::var(p)), flip_cmd(b, Expr::var(p)))));
}

TEST(ParserTest, PrettyExamples) {
  EXPECT_EQ(pretty_print(Command::skip()), "skip");
  EXPECT_EQ(pretty_print(Command::assign(h, Expr::var(h) + Expr::integer(1))), "h <- h + 1");
  EXPECT_EQ(pretty_print(Command::observe(is_prime(Expr::var(h)))), "observe is_prime(h)");
}

TEST(ParserTest, Literals) {
  EXPECT_EQ(parse_expr("3/4"), Expr::rational(3, 4));
  EXPECT_EQ(parse_expr("3 / 4"), Expr::integer(3) / Expr::integer(4));
  EXPECT_EQ(parse_expr("0.125"), Expr::rational(1, 8));
  EXPECT_EQ(parse_expr("0.0"), Expr::rational(0, 1));
  EXPECT_EQ(parse_expr("010.50"), Expr::rational(21, 2));
  EXPECT_EQ(parse_expr("a >= 10"), le(Expr::integer(10), Expr::var(a)));
  EXPECT_EQ(parse_expr("1 + 2 * 3"), Expr::integer(1) + Expr::integer(2) * Expr::integer(3));
}

TEST(ParserTest, SyntaxErrorsCarryPosition) {
  try {
    parse_program("skip;\n  h <- ");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSyntaxError);
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_program(""), SyntaxError);
  EXPECT_THROW(parse_program("while { skip }"), SyntaxError);
  EXPECT_THROW(parse_program("x <- 1/0"), SyntaxError);
}

TEST(ParserTest, Pragmas) {
  SourceFile f = parse_source("#param p = 2/3\n#param n = 6\n#out h\nflip b p");
  ASSERT_EQ(f.params.size(), 2u);
  EXPECT_EQ(f.params[0].second, Value::rational(Rational(2, 3)));
  ASSERT_TRUE(f.out);
  EXPECT_EQ(*f.out, h);
  State s = f.initial_state({parse_binding("p=1/2")});
  EXPECT_EQ(s.lookup(p), Value::rational(Rational(1, 2)));
  EXPECT_EQ(s.lookup(Symbol("n")), Value::integer(6));
}

// Random ASTs over a small grammar.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  Expr expr(int depth) {
    const Symbol vars[] = {a, b, h};
    int k = pick(depth <= 0 ? 3 : 9);
    switch (k) {
      case 0: return Expr::integer(pick(7) - 3);
      case 1: return Expr::rational(1 + pick(5), 2 + pick(5));
      case 2: return Expr::var(vars[pick(3)]);
      case 3: return expr(depth - 1) + expr(depth - 1);
      case 4: return expr(depth - 1) * expr(depth - 1);
      case 5: return lt(expr(depth - 1), expr(depth - 1)) && !eq(expr(depth - 1), expr(depth - 1));
      case 6: return floor(expr(depth - 1)) - abs(expr(depth - 1));
      case 7: return is_even(expr(depth - 1)) || Expr::boolean(pick(2) == 0);
      default: return expr(depth - 1) / expr(depth - 1);
    }
  }

  Command cmd(int depth) {
    const Symbol vars[] = {a, b, h};
    int k = pick(depth <= 0 ? 3 : 8);
    switch (k) {
      case 0: return Command::skip();
      case 1: return Command::assign(vars[pick(3)], expr(2));
      case 2: return Command::observe(expr(2));
      case 3: return Command::seq(cmd(depth - 1), cmd(depth - 1));
      case 4: return Command::ite(expr(1), cmd(depth - 1), cmd(depth - 1));
      case 5: return Command::choice(expr(1), cmd(depth - 1), cmd(depth - 1));
      case 6: return Command::uniform(expr(1), vars[pick(3)], cmd(depth - 1));
      default: return Command::loop(expr(1), cmd(depth - 1));
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::mt19937 rng_;
};

TEST(ParserTest, RoundTripRandomPrograms) {
  Gen gen(7);
  for (int i = 0; i < 500; ++i) {
    Command c = gen.cmd(4);
    std::string text = pretty_print(c);
    EXPECT_EQ(parse_program(text), c) << text;
  }
}

std::string read_program(const std::string& name) {
  std::ifstream in(std::string(ZAR_PROGRAMS_DIR) + "/" + name + ".zar");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ParserTest, ProgramFilesMatchBuilders) {
  const Symbol out("out");
  struct Case {
    std::string file;
    Command expected;
    std::string out;
  };
  const std::vector<Case> cases = {
      {"primes", geometric_primes(Expr::var(p)), "h"},
      {"dueling_coins", dueling_coins(Expr::var(p)), "a"},
      {"die", die(Expr::var("n")), "x"},
      {"bern_exp", Subroutines().bern_exp(out, Expr::var("gamma")), "out"},
      {"laplace", Subroutines().laplace(out, Expr::var("s"), Expr::var("t")), "out"},
      {"gaussian", Subroutines().gaussian(Symbol("z"), Expr::var("mu"), Expr::var("sigma")), "z"},
      {"hare_tortoise", hare_tortoise(Expr::boolean(true)), "t0"},
      {"hare_tortoise_late", hare_tortoise(le(Expr::integer(10), Expr::var("time"))), "t0"},
  };
  for (const auto& c : cases) {
    SourceFile f = parse_source(read_program(c.file));
    EXPECT_EQ(f.program, c.expected) << c.file;
    ASSERT_TRUE(f.out) << c.file;
    EXPECT_EQ(f.out->name(), c.out);
  }
}

}  // namespace
}  // namespace zar
