#include "zar/expectation.hpp"

#include "zar/error.hpp"

namespace zar {

ExtReal::ExtReal(Rational q) : q_(std::move(q)) {}

ExtReal ExtReal::infinity() {
  ExtReal x;
  x.inf_ = true;
  return x;
}

const Rational& ExtReal::value() const {
  if (inf_) throw Error(ErrorKind::kInternal, "value() of infinite ExtReal");
  return q_;
}

double ExtReal::to_double() const {
  return inf_ ? std::numeric_limits<double>::infinity() : zar::to_double(q_);
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
  if (a.inf_ || b.inf_) return ExtReal::infinity();
  return ExtReal(a.q_ + b.q_);
}

ExtReal operator*(const ExtReal& a, const ExtReal& b) {
  if ((!a.inf_ && a.q_ == 0) || (!b.inf_ && b.q_ == 0)) return ExtReal(0);
  if (a.inf_ || b.inf_) return ExtReal::infinity();
  return ExtReal(a.q_ * b.q_);
}

ExtReal operator-(const ExtReal& a, const ExtReal& b) {
  if (b.inf_) throw Error(ErrorKind::kInternal, "subtracting infinity");
  if (a.inf_) return a;
  return ExtReal(a.q_ - b.q_);
}

bool operator==(const ExtReal& a, const ExtReal& b) {
  if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
  return a.q_ == b.q_;
}

bool operator<(const ExtReal& a, const ExtReal& b) {
  if (a.inf_) return false;
  if (b.inf_) return true;
  return a.q_ < b.q_;
}

std::string to_string(const ExtReal& x) { return x.is_infinite() ? "inf" : to_string(x.value()); }

ExtReal distance(const ExtReal& a, const ExtReal& b) {
  if (a.is_infinite() || b.is_infinite()) {
    return a.is_infinite() == b.is_infinite() ? ExtReal(0) : ExtReal::infinity();
  }
  return ExtReal(boost::multiprecision::abs(a.value() - b.value()));
}

Expectation::Expectation(Fn fn, std::optional<VarSet> reads)
    : fn_(std::move(fn)), reads_(std::move(reads)) {}

Expectation Expectation::constant(Rational q) {
  if (q < 0) throw Error(ErrorKind::kNegativeExpectation, "constant " + to_string(q));
  ExtReal x(std::move(q));
  return Expectation([x](const State&) { return x; }, VarSet{});
}

Expectation Expectation::from_expr(const Expr& e) {
  return Expectation(
      [e](const State& s) -> ExtReal {
        Value v = eval_expr(e, s);
        if (v.is_bool()) return ExtReal(v.as_bool() ? 1 : 0);
        Rational q = v.to_rational();
        if (q < 0) {
          throw Error(ErrorKind::kNegativeExpectation, "expectation is " + to_string(q) + " at " + to_string(s));
        }
        return ExtReal(std::move(q));
      },
      free_vars(e));
}

Expectation Expectation::indicator(const Expr& e) {
  return Expectation([e](const State& s) { return ExtReal(eval_bool(e, s) ? 1 : 0); }, free_vars(e));
}

Expectation Expectation::point(Symbol x, Value v) {
  return Expectation([x, v](const State& s) { return ExtReal(s.lookup(x) == v ? 1 : 0); }, VarSet{x});
}

Expectation Expectation::state_is(State target) {
  return Expectation([t = std::move(target)](const State& s) { return ExtReal(s == t ? 1 : 0); });
}

Expectation Expectation::complement() const {
  auto f = fn_;
  return Expectation(
      [f](const State& s) {
        ExtReal x = f(s);
        if (ExtReal(1) < x) throw Error(ErrorKind::kBoundError, "expectation exceeds 1 at " + to_string(s));
        return ExtReal(1) - x;
      },
      reads_);
}

Expectation Expectation::affine(const Rational& a, const Expectation& f, const Expectation& g) {
  std::optional<VarSet> reads;
  if (f.reads_ && g.reads_) {
    reads = *f.reads_;
    reads->insert(g.reads_->begin(), g.reads_->end());
  }
  ExtReal scale(a);
  return Expectation([scale, f, g](const State& s) { return scale * f(s) + g(s); }, reads);
}

}  // namespace zar
