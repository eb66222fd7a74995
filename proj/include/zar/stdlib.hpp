#pragma once

#include "zar/command.hpp"
#include "zar/stats.hpp"

#include <string_view>

namespace zar {

/// Builders for the subroutine family (Bernoulli-exponential, discrete
/// Laplace, discrete Gaussian). Each call names its scratch variables
/// `name_<n>` with a fresh n, shared by the subroutines it uses internally.
/// With `clobber` set, every call shares the plain names.
class Subroutines {
 public:
  explicit Subroutines(bool clobber = false) : clobber_(clobber) {}

  // out <- true with probability exp(-gamma), 0 <= gamma <= 1.
  Command bern_exp_0_1(Symbol out, const Expr& gamma);
  // out <- true with probability exp(-gamma), 0 <= gamma.
  Command bern_exp(Symbol out, const Expr& gamma);
  // out ~ discrete Laplace with scale t/s; s, t positive integers.
  Command laplace(Symbol out, const Expr& s, const Expr& t);
  // z ~ discrete Gaussian with mean 0 and scale sigma > 0.
  Command gaussian_0(Symbol z, const Expr& sigma);
  Command gaussian(Symbol out, const Expr& mu, const Expr& sigma);

 private:
  Command bern_exp_0_1(Symbol out, const Expr& gamma, int ns);
  Command bern_exp(Symbol out, const Expr& gamma, int ns);
  Command laplace(Symbol out, const Expr& s, const Expr& t, int ns);
  Command gaussian_0(Symbol z, const Expr& sigma, int ns);

  int fresh() { return ++counter_; }
  Symbol local(std::string_view name, int ns) const;

  bool clobber_;
  int counter_ = 0;
};

Command flip(Symbol x, const Expr& p);
// a, b: the fair coin from two p-coins.
Command dueling_coins(const Expr& p);
// h: heads before the first tails, conditioned on h prime.
Command geometric_primes(const Expr& p);
// x uniform on 1..n; m is the bound draw.
Command die(const Expr& n, Symbol x = Symbol("x"));
Command hare_tortoise(const Expr& predicate, bool clobber = false);

// Exact posteriors, truncated where the support is infinite so that the
// omitted mass is below 1e-15, and renormalized.
Pmf primes_pmf(const Rational& p);
Pmf die_pmf(const Integer& n);
Pmf bern_exp_pmf(double gamma);
Pmf laplace_pmf(double scale);
Pmf gaussian_pmf(double mu, double sigma);

}  // namespace zar
