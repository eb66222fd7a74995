#pragma once

#include "zar/command.hpp"
#include "zar/expectation.hpp"
#include "zar/fixpoint.hpp"

#include <optional>

namespace zar {

/// wp_b c f at s. `b` is the value of a failed observation.
InferenceResult wp(bool b, const Command& c, const Expectation& f, const State& s,
                   const FixpointConfig& cfg = {});
/// wlp_b c f at s. f must be bounded by one (BoundError otherwise).
InferenceResult wlp(bool b, const Command& c, const Expectation& f, const State& s,
                    const FixpointConfig& cfg = {});

/// Conditional expectation of f after c. Throws ZeroDenominator when every
/// run fails an observation.
CwpResult cwp(const Command& c, const Expectation& f, const State& s, const FixpointConfig& cfg = {});

/// |wp_b c f + wlp_(not b) c (1 - f) - 1| at matched iteration counts.
Rational invariant_sum_check(const Command& c, const Expectation& f, const State& s,
                             const FixpointConfig& cfg = {}, bool b = false);

// Checks a choice bias or uniform range as the semantics and the compiler do.
Rational eval_probability(const Expr& p, const State& s);
Integer eval_range(const Expr& n, const State& s);

}  // namespace zar
