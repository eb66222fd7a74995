#include "zar/stdlib.hpp"

#include "zar/error.hpp"

#include <cmath>
#include <string>

namespace zar {

Symbol Subroutines::local(std::string_view name, int ns) const {
  if (clobber_) return Symbol(name);
  return Symbol(std::string(name) + "_" + std::to_string(ns));
}

Command Subroutines::bern_exp_0_1(Symbol out, const Expr& gamma) { return bern_exp_0_1(out, gamma, fresh()); }
Command Subroutines::bern_exp(Symbol out, const Expr& gamma) { return bern_exp(out, gamma, fresh()); }
Command Subroutines::laplace(Symbol out, const Expr& s, const Expr& t) { return laplace(out, s, t, fresh()); }
Command Subroutines::gaussian_0(Symbol z, const Expr& sigma) { return gaussian_0(z, sigma, fresh()); }

Command flip(Symbol x, const Expr& p) {
  return Command::choice(p, Command::assign(x, Expr::boolean(true)), Command::assign(x, Expr::boolean(false)));
}

Command Subroutines::bern_exp_0_1(Symbol out, const Expr& gamma, int id) {
  const Symbol k = local("k", id), a = local("a", id);
  const Expr kv = Expr::var(k);
  return Command::seq({
      Command::assign(k, Expr::integer(0)),
      Command::assign(a, Expr::boolean(true)),
      Command::loop(Expr::var(a), Command::choice(gamma / (kv + Expr::integer(1)),
                                                  Command::assign(k, kv + Expr::integer(1)),
                                                  Command::assign(a, Expr::boolean(false)))),
      Command::ite(is_even(kv), Command::assign(out, Expr::boolean(true)), Command::assign(out, Expr::boolean(false))),
  });
}

Command Subroutines::bern_exp(Symbol out, const Expr& gamma, int id) {
  const Symbol i = local("i", id), b = local("b", id);
  const Expr iv = Expr::var(i), bv = Expr::var(b);
  Command small = bern_exp_0_1(out, gamma, id);
  Command large = Command::seq({
      Command::assign(i, Expr::integer(1)),
      Command::assign(b, Expr::boolean(true)),
      Command::loop(bv && le(iv, gamma),
                    Command::seq(bern_exp_0_1(b, Expr::integer(1), id), Command::assign(i, iv + Expr::integer(1)))),
      Command::ite(bv, bern_exp_0_1(out, gamma - floor(gamma), id), Command::assign(out, Expr::boolean(false))),
  });
  return Command::ite(le(gamma, Expr::integer(1)), small, large);
}

Command Subroutines::laplace(Symbol out, const Expr& s, const Expr& t, int id) {
  const Symbol lp = local("lp", id), u = local("u", id), d = local("d", id), v = local("v", id),
               il = local("il", id), x = local("x", id), y = local("y", id), c = local("c", id);
  const Expr uv = Expr::var(u), vv = Expr::var(v), yv = Expr::var(y), cv = Expr::var(c);
  Command accept = Command::seq({
      Command::assign(v, Expr::integer(0)),
      bern_exp(il, Expr::integer(1), id),
      Command::loop(Expr::var(il),
                    Command::seq(Command::assign(v, vv + Expr::integer(1)), bern_exp(il, Expr::integer(1), id))),
      Command::assign(x, uv + t * vv),
      Command::assign(y, floor(Expr::var(x) / s)),
      flip(c, Expr::rational(1, 2)),
      Command::ite(cv && eq(yv, Expr::integer(0)), Command::skip(),
                   Command::seq(Command::assign(lp, Expr::boolean(false)),
                                Command::ite(cv, Command::assign(out, Expr::integer(0) - yv),
                                             Command::assign(out, yv)))),
  });
  Command round = Command::uniform(
      t, u, Command::seq(bern_exp(d, uv / t, id), Command::ite(Expr::var(d), accept, Command::skip())));
  return Command::seq(Command::assign(lp, Expr::boolean(true)), Command::loop(Expr::var(lp), round));
}

Command Subroutines::gaussian_0(Symbol z, const Expr& sigma, int id) {
  const Symbol ol = local("ol", id), t = local("t", id);
  const Expr tv = Expr::var(t), zv = Expr::var(z);
  const Expr sigma2 = sigma * sigma;
  const Expr dev = abs(zv) - sigma2 / tv;
  return Command::seq({
      Command::assign(t, floor(sigma) + Expr::integer(1)),
      Command::assign(ol, Expr::boolean(false)),
      Command::loop(!Expr::var(ol), Command::seq(laplace(z, Expr::integer(1), tv, id),
                                                 bern_exp(ol, dev * dev / (Expr::integer(2) * sigma2), id))),
  });
}

Command Subroutines::gaussian(Symbol out, const Expr& mu, const Expr& sigma) {
  return Command::seq(gaussian_0(out, sigma, fresh()), Command::assign(out, Expr::var(out) + mu));
}

Command dueling_coins(const Expr& p) {
  const Symbol a("a"), b("b");
  return Command::seq({
      Command::assign(a, Expr::boolean(false)),
      Command::assign(b, Expr::boolean(false)),
      Command::loop(eq(Expr::var(a), Expr::var(b)), Command::seq(flip(a, p), flip(b, p))),
  });
}

Command geometric_primes(const Expr& p) {
  const Symbol b("b"), h("h");
  return Command::seq({
      flip(b, p),
      Command::loop(Expr::var(b),
                    Command::seq(Command::assign(h, Expr::var(h) + Expr::integer(1)), flip(b, p))),
      Command::observe(is_prime(Expr::var(h))),
  });
}

Command die(const Expr& n, Symbol x) {
  const Symbol m("m");
  return Command::uniform(n, m, Command::assign(x, Expr::var(m) + Expr::integer(1)));
}

Command hare_tortoise(const Expr& predicate, bool clobber) {
  Subroutines lib(clobber);
  const Symbol n("n"), t0("t0"), tortoise("tortoise"), hare("hare"), time("time"), jump("jump");
  const Expr one = Expr::integer(1);
  return Command::seq({
      Command::uniform(Expr::integer(10), n, Command::assign(t0, Expr::var(n))),
      Command::assign(tortoise, Expr::var(t0)),
      Command::assign(hare, Expr::integer(0)),
      Command::assign(time, Expr::integer(0)),
      Command::loop(lt(Expr::var(hare), Expr::var(tortoise)),
                    Command::seq({
                        Command::assign(time, Expr::var(time) + one),
                        Command::assign(tortoise, Expr::var(tortoise) + one),
                        Command::choice(Expr::rational(2, 5),
                                        Command::seq(lib.gaussian(jump, Expr::integer(4), Expr::integer(2)),
                                                     Command::assign(hare, Expr::var(hare) + Expr::var(jump))),
                                        Command::skip()),
                    })),
      Command::observe(predicate),
  });
}

namespace {

Pmf normalized(Pmf p) {
  double sum = 0;
  for (const auto& [v, m] : p) sum += m;
  for (auto& [v, m] : p) m /= sum;
  return p;
}

}  // namespace

Pmf primes_pmf(const Rational& p) {
  if (p <= 0 || p >= 1) throw Error(ErrorKind::kBiasOutOfRange, "primes pmf needs 0 < p < 1");
  const double q = to_double(p);
  Pmf out;
  double w = 1;
  for (long long h = 0; h < 2 || w > 1e-18; ++h, w *= q) {
    if (is_prime(Integer(h))) out[Value::integer(h)] = w * (1 - q);
  }
  return normalized(std::move(out));
}

Pmf die_pmf(const Integer& n) {
  if (n <= 0) throw Error(ErrorKind::kNonPositive, "die needs n > 0");
  Pmf out;
  const double w = 1 / to_double(Rational(n));
  for (Integer i = 1; i <= n; ++i) out[Value::integer(i)] = w;
  return normalized(std::move(out));
}

Pmf bern_exp_pmf(double gamma) {
  const double t = std::exp(-gamma);
  Pmf out;
  out[Value::boolean(true)] = t;
  out[Value::boolean(false)] = 1 - t;
  return out;
}

Pmf laplace_pmf(double scale) {
  Pmf out;
  const auto reach = static_cast<long long>(std::ceil(40 * scale)) + 1;
  for (long long x = -reach; x <= reach; ++x) out[Value::integer(x)] = std::exp(-std::abs(double(x)) / scale);
  return normalized(std::move(out));
}

Pmf gaussian_pmf(double mu, double sigma) {
  Pmf out;
  const auto centre = static_cast<long long>(std::llround(mu));
  const auto reach = static_cast<long long>(std::ceil(10 * sigma)) + 1;
  for (long long x = centre - reach; x <= centre + reach; ++x) {
    const double d = double(x) - mu;
    out[Value::integer(x)] = std::exp(-d * d / (2 * sigma * sigma));
  }
  return normalized(std::move(out));
}

}  // namespace zar
