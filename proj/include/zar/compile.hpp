#pragma once

#include "zar/cftree.hpp"
#include "zar/command.hpp"

#include <optional>
#include <vector>

namespace zar {

// Reserved variables carried by uniform_tree and bernoulli_tree states.
Symbol out_var();
Symbol flag_var();

/// CF tree of c started in s. Loops become Fix nodes whose key variables
/// come from the liveness analysis of the whole program, with `live_out`
/// (default: every variable) live at the end. Given `live_out`, states also
/// drop bindings that are dead at their program point.
Tree compile(const Command& c, const State& s, const std::optional<VarSet>& live_out = std::nullopt);

/// Fair-coin tree whose leaves {__out = i}, i < n, are equally likely.
/// Non-powers of two reject via a Fix loop.
Tree uniform_tree(const Integer& n);

/// Fair-coin tree whose leaf {__out = true} has probability p.
Tree bernoulli_tree(const Rational& p);

/// Drops choices with bias 0 or 1 and choices between equal subtrees.
Tree elim_choices(const Tree& t);

/// Replaces every biased choice by a bernoulli_tree.
Tree debias(const Tree& t);

/// True iff every choice reachable when expanding Fix generators `depth`
/// levels deep, at the Fix's own state and at each probe state, is fair.
bool is_unbiased(const Tree& t, const std::vector<State>& probes = {}, int depth = 5);

// compile, elim_choices and debias in sequence.
Tree compile_debiased(const Command& c, const State& s, const std::optional<VarSet>& live_out = std::nullopt);

}  // namespace zar
