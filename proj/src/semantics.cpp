#include "zar/semantics.hpp"

#include "zar/error.hpp"

namespace zar {

Rational eval_probability(const Expr& p, const State& s) {
  Value v = eval_expr(p, s);
  if (!v.is_numeric()) {
    throw Error(ErrorKind::kTypeError, "choice bias must be a number, got " + to_string(v));
  }
  Rational q = v.to_rational();
  if (!in_unit_interval(q)) {
    throw Error(ErrorKind::kChoiceOutOfRange, "choice bias " + to_string(q) + " at " + to_string(s));
  }
  return q;
}

Integer eval_range(const Expr& n, const State& s) {
  Value v = eval_expr(n, s);
  if (!v.is_int()) throw Error(ErrorKind::kTypeError, "uniform range must be an Int, got " + to_string(v));
  if (v.as_int() <= 0) {
    throw Error(ErrorKind::kUniformNonPositive, "uniform range " + to_string(v) + " at " + to_string(s));
  }
  return v.as_int();
}

namespace {

class Engine {
 public:
  Engine(const Command& program, const VarSet& live_out, const FixpointConfig& cfg)
      : cfg_(cfg), keys_(program, live_out) {}

  ExtReal run(const Command& c, const State& s, Cont k, Mode m) {
    switch (c.kind()) {
      case CommandKind::kSkip: return k(s);
      case CommandKind::kAssign: return k(s.update(c.variable(), eval_expr(c.expr(), s)));
      case CommandKind::kSeq: {
        auto rest = [&](const State& t) { return run(c.second(), t, k, m); };
        return run(c.first(), s, rest, m);
      }
      case CommandKind::kObserve:
        if (eval_bool(c.expr(), s)) return k(s);
        return ExtReal(m.fail ? 1 : 0);
      case CommandKind::kIte:
        return eval_bool(c.expr(), s) ? run(c.first(), s, k, m) : run(c.second(), s, k, m);
      case CommandKind::kChoice: {
        Rational p = eval_probability(c.expr(), s);
        if (p == 1) return run(c.first(), s, k, m);
        if (p == 0) return run(c.second(), s, k, m);
        return ExtReal(p) * run(c.first(), s, k, m) + ExtReal(1 - p) * run(c.second(), s, k, m);
      }
      case CommandKind::kUniform: {
        Integer n = eval_range(c.expr(), s);
        ExtReal sum(0);
        for (Integer i = 0; i < n; ++i) {
          sum = sum + run(c.body(), s.update(c.variable(), Value::integer(i)), k, m);
        }
        return ExtReal(Rational(1, n)) * sum;
      }
      case CommandKind::kWhile: {
        auto step = [&](const State& t, Cont x, Mode mm) { return run(c.body(), t, x, mm); };
        LoopSpec loop{c.expr(), step, k, keys_.find(c)};
        return solve_loop(loop, s, m, cfg_, stats_);
      }
    }
    throw Error(ErrorKind::kInternal, "unknown command");
  }

  const SolveStats& stats() const { return stats_; }

 private:
  const FixpointConfig& cfg_;
  LoopKeys keys_;
  SolveStats stats_;
};

Expectation bounded(const Expectation& f) {
  return Expectation(
      [f](const State& s) {
        ExtReal v = f(s);
        if (ExtReal(1) < v) throw Error(ErrorKind::kBoundError, "expectation " + to_string(v) + " exceeds 1");
        return v;
      },
      f.reads());
}

InferenceResult transform(Mode mode, const Command& c, const Expectation& f, const State& s,
                          const FixpointConfig& cfg) {
  InferenceResult out;
  run_with_large_stack([&] {
    const VarSet live = cfg.live_out ? *cfg.live_out : f.reads() ? *f.reads() : all_vars(c);
    Engine engine(c, live, cfg);
    auto post = [&](const State& t) { return f(t); };
    out.value = engine.run(c, s, post, mode);
    out.stats = engine.stats();
  });
  out.converged = out.stats.converged();
  out.iterations = out.stats.max_iterations;
  return out;
}

}  // namespace

InferenceResult wp(bool b, const Command& c, const Expectation& f, const State& s, const FixpointConfig& cfg) {
  return transform(Mode{false, b}, c, f, s, cfg);
}

InferenceResult wlp(bool b, const Command& c, const Expectation& f, const State& s, const FixpointConfig& cfg) {
  return transform(Mode{true, b}, c, bounded(f), s, cfg);
}

CwpResult cwp(const Command& c, const Expectation& f, const State& s, const FixpointConfig& config) {
  FixpointConfig cfg = config;
  if (!cfg.live_out) cfg.live_out = f.reads() ? *f.reads() : all_vars(c);
  CwpResult out;
  InferenceResult num = wp(false, c, f, s, cfg);
  InferenceResult den = wlp(false, c, Expectation::one(), s, cfg);
  if (den.value == ExtReal(0)) {
    throw Error(ErrorKind::kZeroDenominator, "every execution fails an observation");
  }
  out.numerator = num.value;
  out.denominator = den.value;
  out.lo = num.value.is_infinite() ? num.value : ExtReal(num.value.value() / den.value.value());
  out.converged = num.converged && den.converged;
  out.iterations = std::max(num.iterations, den.iterations);
  if (!contains_loop(c)) {
    // Loop-free programs terminate, so the bounds coincide for bounded f.
    try {
      wlp(false, c, f, s, cfg);
      out.hi = out.lo;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBoundError) throw;
    }
    return out;
  }
  try {
    InferenceResult upper = wlp(false, c, f, s, cfg);
    InferenceResult mass = wp(false, c, Expectation::one(), s, cfg);
    out.converged = out.converged && upper.converged && mass.converged;
    out.iterations = std::max({out.iterations, upper.iterations, mass.iterations});
    if (mass.value == ExtReal(0)) {
      out.hi = ExtReal(1);
    } else {
      Rational hi = upper.value.value() / mass.value.value();
      out.hi = ExtReal(hi > 1 ? Rational(1) : hi);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kBoundError) throw;
  }
  return out;
}

Rational invariant_sum_check(const Command& c, const Expectation& f, const State& s, const FixpointConfig& cfg,
                             bool b) {
  InferenceResult lhs = wp(b, c, f, s, cfg);
  InferenceResult rhs = wlp(!b, c, f.complement(), s, cfg);
  if (lhs.value.is_infinite()) throw Error(ErrorKind::kBoundError, "invariant sum needs a bounded expectation");
  return boost::multiprecision::abs(lhs.value.value() + rhs.value.value() - 1);
}

}  // namespace zar
