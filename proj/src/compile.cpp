#include "zar/compile.hpp"

#include "zar/error.hpp"
#include "zar/semantics.hpp"

#include <map>
#include <mutex>
#include <unordered_map>

namespace zar {

Symbol out_var() {
  static const Symbol kOut("__out");
  return kOut;
}

Symbol flag_var() {
  static const Symbol kFlag("__flag");
  return kFlag;
}

namespace {

// Variables live after each command node, for dropping dead bindings.
class LiveAfter {
 public:
  LiveAfter(const Command& program, const VarSet& live_out) { analyse(program, live_out); }

  const VarSet* find(const Command& c) const {
    auto it = after_.find(c.id());
    return it == after_.end() ? nullptr : &it->second;
  }

 private:
  VarSet analyse(const Command& c, const VarSet& out) {
    auto [it, inserted] = after_.try_emplace(c.id(), out);
    if (!inserted) it->second.insert(out.begin(), out.end());
    switch (c.kind()) {
      case CommandKind::kSeq: return analyse(c.first(), analyse(c.second(), out));
      case CommandKind::kIte:
      case CommandKind::kChoice: {
        VarSet in = analyse(c.first(), out);
        VarSet other = analyse(c.second(), out);
        in.insert(other.begin(), other.end());
        collect_free_vars(c.expr(), in);
        return in;
      }
      case CommandKind::kUniform: {
        VarSet in = analyse(c.body(), out);
        in.erase(c.variable());
        collect_free_vars(c.expr(), in);
        return in;
      }
      case CommandKind::kWhile: {
        // Bindings re-entering the loop are pruned against the head set.
        VarSet head = liveness_.in(c, out);
        after_[c.id()].insert(head.begin(), head.end());
        analyse(c.body(), head);
        return head;
      }
      default: return liveness_.in(c, out);
    }
  }

  Liveness liveness_;
  std::unordered_map<const void*, VarSet> after_;
};

struct Context {
  LoopKeys keys;
  std::optional<LiveAfter> live;
  Context(const Command& program, const VarSet& live_out, bool prune) : keys(program, live_out) {
    if (prune) live.emplace(program, live_out);
  }

  const VarSet* keep(const Command& c) const { return live ? live->find(c) : nullptr; }

  State prune(const Command& c, const State& s) const {
    const VarSet* k = keep(c);
    return k == nullptr ? s : s.restrict(*k);
  }

  State assign(const Command& c, const State& s, Value v) const {
    const VarSet* k = keep(c);
    if (k == nullptr) return s.update(c.variable(), std::move(v));
    State out = s.restrict(*k);
    if (k->count(c.variable())) out.set(c.variable(), std::move(v));
    return out;
  }
};

Tree compile_in(const std::shared_ptr<const Context>& ctx, const Command& c, const State& s) {
  switch (c.kind()) {
    case CommandKind::kSkip: return Tree::leaf(ctx->prune(c, s));
    case CommandKind::kAssign: return Tree::leaf(ctx->assign(c, s, eval_expr(c.expr(), s)));
    case CommandKind::kObserve: return eval_bool(c.expr(), s) ? Tree::leaf(ctx->prune(c, s)) : Tree::fail();
    case CommandKind::kSeq: {
      Command rest = c.second();
      Generator next([ctx, rest](const State& t) { return compile_in(ctx, rest, t); });
      return tree_bind(compile_in(ctx, c.first(), s), next);
    }
    case CommandKind::kIte:
      return eval_bool(c.expr(), s) ? compile_in(ctx, c.first(), s) : compile_in(ctx, c.second(), s);
    case CommandKind::kChoice: {
      Rational p = eval_probability(c.expr(), s);
      return Tree::choice(std::move(p), compile_in(ctx, c.first(), s), compile_in(ctx, c.second(), s));
    }
    case CommandKind::kUniform: {
      Integer n = eval_range(c.expr(), s);
      Command body = c.body();
      Symbol x = c.variable();
      Generator k([ctx, body, x, s](const State& u) {
        return compile_in(ctx, body, s.update(x, u.lookup(out_var())));
      });
      return tree_bind(uniform_tree(n), k);
    }
    case CommandKind::kWhile: {
      Command body = c.body();
      Generator g([ctx, body](const State& t) { return compile_in(ctx, body, t); });
      std::shared_ptr<const VarSet> keys;
      if (const VarSet* k = ctx->keys.find(c)) keys = std::shared_ptr<const VarSet>(ctx, k);
      return Tree::fix(ctx->prune(c, s), c.expr(), std::move(g), Generator::leaf(), std::move(keys));
    }
  }
  throw Error(ErrorKind::kInternal, "unknown command");
}

// Perfect fair tree over 2^m slots; slots past `limit` loop back and are
// merged into one leaf wherever a whole subtree consists of them.
template <class LeafFn>
Tree slot_tree(const Integer& lo, const Integer& size, const Integer& limit, const Tree& loopback, LeafFn leaf) {
  if (lo >= limit) return loopback;
  if (size == 1) return leaf(lo);
  Integer half = size / 2;
  return Tree::choice(Rational(1, 2), slot_tree(lo, half, limit, loopback, leaf),
                      slot_tree(lo + half, half, limit, loopback, leaf));
}

Integer next_power_of_two(const Integer& n) {
  Integer p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Wraps a slot tree in the rejection loop, or returns it directly when no
// slot loops back.
template <class LeafFn>
Tree rejection_tree(const Integer& slots, LeafFn value_of) {
  const Integer width = next_power_of_two(slots);
  if (width == slots) {
    return slot_tree(0, width, slots, Tree::fail(),
                     [&](const Integer& i) { return Tree::leaf(State{{out_var(), value_of(i)}}); });
  }
  Tree loopback = Tree::leaf(State{{flag_var(), Value::boolean(true)}});
  Tree body = slot_tree(0, width, slots, loopback, [&](const Integer& i) {
    return Tree::leaf(State{{flag_var(), Value::boolean(false)}, {out_var(), value_of(i)}});
  });
  Generator g([body](const State&) { return body; });
  Generator k([](const State& s) { return Tree::leaf(State{{out_var(), s.lookup(out_var())}}); });
  static const auto kNoKeys = std::make_shared<const VarSet>();
  return Tree::fix(State{{flag_var(), Value::boolean(true)}}, Expr::var(flag_var()), std::move(g), std::move(k),
                   kNoKeys);
}

class TreeCache {
 public:
  template <class Build>
  Tree get(const Value& key, Build build) {
    {
      std::lock_guard lock(mutex_);
      auto it = trees_.find(key);
      if (it != trees_.end()) return it->second;
    }
    Tree t = build();
    std::lock_guard lock(mutex_);
    if (trees_.size() < 4096) trees_.emplace(key, t);
    return t;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<Value, Tree, ValueHash> trees_;
};

}  // namespace

Tree compile(const Command& c, const State& s, const std::optional<VarSet>& live_out) {
  auto ctx = std::make_shared<const Context>(c, live_out ? *live_out : all_vars(c), live_out.has_value());
  return compile_in(ctx, c, s);
}

Tree uniform_tree(const Integer& n) {
  if (n <= 0) throw Error(ErrorKind::kNonPositive, "uniform_tree of " + to_string(n));
  if (n == 1) return Tree::leaf(State{{out_var(), Value::integer(0)}});
  static TreeCache cache;
  return cache.get(Value::integer(n), [&] { return rejection_tree(n, [](const Integer& i) { return Value::integer(i); }); });
}

Tree bernoulli_tree(const Rational& p) {
  if (p < 0 || p > 1) throw Error(ErrorKind::kBiasOutOfRange, "bias " + to_string(p));
  if (p == 0) return Tree::leaf(State{{out_var(), Value::boolean(false)}});
  if (p == 1) return Tree::leaf(State{{out_var(), Value::boolean(true)}});
  static TreeCache cache;
  return cache.get(Value::rational(p), [&] {
    const Integer n = boost::multiprecision::numerator(p);
    const Integer d = boost::multiprecision::denominator(p);
    return rejection_tree(d, [&](const Integer& i) { return Value::boolean(i < n); });
  });
}

namespace {

class Rewriter {
 public:
  enum class Pass { kElim, kDebias, kBoth };
  explicit Rewriter(Pass pass) : pass_(pass) {}

  Tree run(const Tree& t) {
    switch (t.kind()) {
      case TreeKind::kLeaf:
      case TreeKind::kFail: return t;
      case TreeKind::kFix: {
        Generator body = t.body();
        Generator exit = t.exit();
        Pass pass = pass_;
        Generator g([body, pass](const State& s) { return Rewriter(pass).run(body(s)); });
        Generator k([exit, pass](const State& s) { return Rewriter(pass).run(exit(s)); });
        return Tree::fix(t.state(), t.guard(), std::move(g), std::move(k), t.shared_key_vars());
      }
      case TreeKind::kChoice: break;
    }
    auto it = memo_.find(t.id());
    if (it != memo_.end()) return it->second;
    Tree out = pass_ == Pass::kDebias ? debias_choice(t) : elim(t);
    memo_.emplace(t.id(), out);
    return out;
  }

 private:
  Tree elim(const Tree& t) {
    if (t.bias() == 1) return run(t.left());
    if (t.bias() == 0) return run(t.right());
    Tree l = run(t.left());
    Tree r = run(t.right());
    if (l == r) return l;
    if (pass_ == Pass::kBoth) return debiased(t, std::move(l), std::move(r));
    if (l.id() == t.left().id() && r.id() == t.right().id()) return t;
    return Tree::choice(t.bias(), std::move(l), std::move(r));
  }

  Tree debias_choice(const Tree& t) { return debiased(t, run(t.left()), run(t.right())); }

  // t with its children replaced by the rewritten l and r.
  Tree debiased(const Tree& t, Tree l, Tree r) {
    if (is_one_half(t.bias())) {
      if (l.id() == t.left().id() && r.id() == t.right().id()) return t;
      return Tree::choice(t.bias(), std::move(l), std::move(r));
    }
    Generator pick([l, r](const State& s) { return s.lookup(out_var()) == Value::boolean(true) ? l : r; });
    return tree_bind(bernoulli_tree(t.bias()), pick);
  }

  Pass pass_;
  std::unordered_map<const void*, Tree> memo_;
};

bool unbiased_in(const Tree& t, const std::vector<State>& probes, int depth);

void collect_leaves(const Tree& t, std::vector<State>& out, std::size_t limit) {
  if (out.size() >= limit) return;
  if (t.kind() == TreeKind::kLeaf) out.push_back(t.state());
  if (t.kind() == TreeKind::kChoice) {
    collect_leaves(t.left(), out, limit);
    collect_leaves(t.right(), out, limit);
  }
}

// Expands the Fix at s: the body while the guard holds (following the
// states it produces), the exit otherwise.
bool unbiased_fix(const Tree& fix, const State& s, const std::vector<State>& probes, int depth) {
  if (depth <= 0) return true;
  Tree expanded;
  bool looping = false;
  try {
    looping = eval_bool(fix.guard(), s);
    expanded = looping ? fix.body()(s) : fix.exit()(s);
  } catch (const Error&) {
    return true;  // probe outside the generator's domain
  }
  if (!unbiased_in(expanded, probes, depth - 1)) return false;
  if (!looping) return true;
  std::vector<State> next;
  collect_leaves(expanded, next, 16);
  for (const State& n : next) {
    if (!unbiased_fix(fix, n, probes, depth - 1)) return false;
  }
  return true;
}

bool unbiased_in(const Tree& t, const std::vector<State>& probes, int depth) {
  switch (t.kind()) {
    case TreeKind::kLeaf:
    case TreeKind::kFail: return true;
    case TreeKind::kChoice:
      return is_one_half(t.bias()) && unbiased_in(t.left(), probes, depth) &&
             unbiased_in(t.right(), probes, depth);
    case TreeKind::kFix: break;
  }
  if (!unbiased_fix(t, t.state(), probes, depth)) return false;
  for (const State& p : probes) {
    if (!unbiased_fix(t, p, probes, depth)) return false;
  }
  return true;
}

}  // namespace

Tree elim_choices(const Tree& t) { return Rewriter(Rewriter::Pass::kElim).run(t); }

Tree debias(const Tree& t) { return Rewriter(Rewriter::Pass::kDebias).run(t); }

bool is_unbiased(const Tree& t, const std::vector<State>& probes, int depth) {
  return unbiased_in(t, probes, depth);
}

Tree compile_debiased(const Command& c, const State& s, const std::optional<VarSet>& live_out) {
  return Rewriter(Rewriter::Pass::kBoth).run(compile(c, s, live_out));
}

}  // namespace zar
