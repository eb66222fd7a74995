#pragma once

#include "zar/expectation.hpp"
#include "zar/function_ref.hpp"

#include <cstddef>
#include <functional>
#include <optional>

namespace zar {

struct FixpointConfig {
  std::size_t max_iters = 10000;
  // Stop once successive iterates at the queried state differ by at most
  // this much and the not-yet-terminated mass is at most this much.
  // Zero runs exactly max_iters iterations unless the loop is solved exactly.
  Rational tolerance = Rational(1, 1000000000);
  // Solve loops whose guard-true states all share one key in closed form.
  bool closed_form = true;
  // Variables the post-expectation may read, which fixes the loop keys.
  // Unset: the expectation's own read set, else every program variable.
  std::optional<VarSet> live_out;
};

/// Which transformer is being computed: wp_b (liberal = false) or wlp_b.
struct Mode {
  bool liberal = false;
  bool fail = false;  // the value [b] of a failed observation

  friend bool operator==(Mode, Mode) = default;
};

struct SolveStats {
  std::size_t loops = 0;
  std::size_t closed_forms = 0;
  std::size_t max_iterations = 0;
  std::size_t unconverged = 0;
  std::size_t monotonicity_violations = 0;

  bool converged() const noexcept { return unconverged == 0; }
};

using Cont = FunctionRef<ExtReal(const State&)>;

/// One loop instance: `while guard { body }` started in some state, followed
/// by `exit`. `step(s, k, m)` is the transformer of one body execution from s
/// with continuation k. `key_vars`, when set, are the only variables a
/// guard-true state's value depends on.
struct LoopSpec {
  const Expr& guard;
  FunctionRef<ExtReal(const State&, Cont, Mode)> step;
  Cont exit;
  const VarSet* key_vars = nullptr;
};

struct InferenceResult {
  // Kleene iterates approach wp from below and wlp from above; an
  // unconverged result is the last iterate computed.
  ExtReal value;
  bool converged = true;
  std::size_t iterations = 0;
  SolveStats stats;
};

struct CwpResult {
  // wp_false c f / wlp_false c 1: a lower bound of the conditional
  // expectation, exact when every loop converged exactly.
  ExtReal lo;
  // wlp_false c f / wp_false c 1 (capped at 1), present for bounded f.
  std::optional<ExtReal> hi;
  ExtReal numerator;
  ExtReal denominator;
  bool converged = true;
  std::size_t iterations = 0;
};

ExtReal solve_loop(const LoopSpec& loop, const State& init, Mode mode, const FixpointConfig& cfg,
                   SolveStats& stats);

/// Runs `fn` on a thread with a large stack; loop iteration recurses once
/// per iterate.
void run_with_large_stack(const std::function<void()>& fn);

}  // namespace zar
