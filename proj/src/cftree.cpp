#include "zar/cftree.hpp"

#include "zar/error.hpp"
#include "zar/parser.hpp"
#include "zar/semantics.hpp"

#include <sstream>
#include <unordered_map>

namespace zar {

const Generator& Generator::leaf() {
  static const Generator kLeaf([](const State& s) { return Tree::leaf(s); });
  return kLeaf;
}

Tree Generator::operator()(const State& s) const { return (*fn_)(s); }

Tree Tree::leaf(State s) {
  auto n = std::make_shared<Node>();
  n->kind = TreeKind::kLeaf;
  n->state = std::move(s);
  return Tree(std::move(n));
}

Tree Tree::fail() {
  static const Tree kFail(std::make_shared<Node>());
  return kFail;
}

Tree Tree::choice(Rational p, Tree left, Tree right) {
  if (!in_unit_interval(p)) throw Error(ErrorKind::kChoiceOutOfRange, "choice bias " + to_string(p));
  auto n = std::make_shared<Node>();
  n->kind = TreeKind::kChoice;
  n->bias = std::move(p);
  n->left = std::make_shared<const Tree>(std::move(left));
  n->right = std::make_shared<const Tree>(std::move(right));
  return Tree(std::move(n));
}

Tree Tree::fix(State init, Expr guard, Generator body, Generator exit, std::shared_ptr<const VarSet> key_vars) {
  auto n = std::make_shared<Node>();
  n->kind = TreeKind::kFix;
  n->state = std::move(init);
  n->guard = std::move(guard);
  n->body = std::move(body);
  n->exit = std::move(exit);
  n->key_vars = std::move(key_vars);
  return Tree(std::move(n));
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TreeKind::kLeaf: return a.state() == b.state();
    case TreeKind::kFail: return true;
    case TreeKind::kChoice: return a.bias() == b.bias() && a.left() == b.left() && a.right() == b.right();
    case TreeKind::kFix:
      return a.state() == b.state() && a.guard() == b.guard() && a.body().id() == b.body().id() &&
             a.exit().id() == b.exit().id();
  }
  return false;
}

namespace {

class Binder {
 public:
  explicit Binder(const Generator& f) : f_(f) {}

  Tree run(const Tree& t) {
    switch (t.kind()) {
      case TreeKind::kLeaf: return f_(t.state());
      case TreeKind::kFail: return t;
      case TreeKind::kChoice: {
        auto it = memo_.find(t.id());
        if (it != memo_.end()) return it->second;
        Tree out = Tree::choice(t.bias(), run(t.left()), run(t.right()));
        memo_.emplace(t.id(), out);
        return out;
      }
      case TreeKind::kFix: {
        Generator exit = t.exit();
        Generator f = f_;
        Generator composed([exit, f](const State& s) { return tree_bind(exit(s), f); });
        return Tree::fix(t.state(), t.guard(), t.body(), std::move(composed), t.shared_key_vars());
      }
    }
    throw Error(ErrorKind::kInternal, "unknown tree kind");
  }

 private:
  const Generator& f_;
  std::unordered_map<const void*, Tree> memo_;
};

class TreeEngine {
 public:
  explicit TreeEngine(const FixpointConfig& cfg) : cfg_(cfg) {}

  ExtReal run(const Tree& t, Cont k, Mode m) {
    switch (t.kind()) {
      case TreeKind::kLeaf: return k(t.state());
      case TreeKind::kFail: return ExtReal(m.fail ? 1 : 0);
      case TreeKind::kChoice: {
        const Rational& p = t.bias();
        if (p == 1) return run(t.left(), k, m);
        if (p == 0) return run(t.right(), k, m);
        return ExtReal(p) * run(t.left(), k, m) + ExtReal(1 - p) * run(t.right(), k, m);
      }
      case TreeKind::kFix: {
        auto step = [&](const State& s, Cont x, Mode mm) { return run(expand(t.body(), s), x, mm); };
        auto exit = [&](const State& s) { return run(expand(t.exit(), s), k, m); };
        LoopSpec loop{t.guard(), step, exit, t.key_vars()};
        return solve_loop(loop, t.state(), m, cfg_, stats_);
      }
    }
    throw Error(ErrorKind::kInternal, "unknown tree kind");
  }

  const SolveStats& stats() const { return stats_; }

 private:
  struct Key {
    const void* gen;
    State state;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return hash_combine(std::hash<const void*>{}(k.gen), k.state.hash()); }
  };

  Tree expand(const Generator& g, const State& s) {
    if (g.id() == Generator::leaf().id()) return Tree::leaf(s);
    Key key{g.id(), s};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second.second;
    Tree t = g(s);
    if (cache_.size() >= kCacheLimit) cache_.clear();
    cache_.emplace(std::move(key), std::make_pair(g, t));
    return t;
  }

  static constexpr std::size_t kCacheLimit = 1 << 16;
  const FixpointConfig& cfg_;
  SolveStats stats_;
  // Keeps each generator alive so its address is not reused while cached.
  std::unordered_map<Key, std::pair<Generator, Tree>, KeyHash> cache_;
};

InferenceResult transform(Mode mode, const Tree& t, const Expectation& f, const FixpointConfig& cfg) {
  InferenceResult out;
  run_with_large_stack([&] {
    TreeEngine engine(cfg);
    auto post = [&](const State& s) {
      ExtReal v = f(s);
      if (mode.liberal && ExtReal(1) < v) {
        throw Error(ErrorKind::kBoundError, "expectation " + to_string(v) + " exceeds 1");
      }
      return v;
    };
    out.value = engine.run(t, post, mode);
    out.stats = engine.stats();
  });
  out.converged = out.stats.converged();
  out.iterations = out.stats.max_iterations;
  return out;
}

bool contains_fix(const Tree& t) {
  switch (t.kind()) {
    case TreeKind::kChoice: return contains_fix(t.left()) || contains_fix(t.right());
    case TreeKind::kFix: return true;
    default: return false;
  }
}

}  // namespace

Tree tree_bind(const Tree& t, const Generator& f) {
  if (f.id() == Generator::leaf().id()) return t;
  return Binder(f).run(t);
}

InferenceResult twp(bool b, const Tree& t, const Expectation& f, const FixpointConfig& cfg) {
  return transform(Mode{false, b}, t, f, cfg);
}

InferenceResult twlp(bool b, const Tree& t, const Expectation& f, const FixpointConfig& cfg) {
  return transform(Mode{true, b}, t, f, cfg);
}

CwpResult tcwp(const Tree& t, const Expectation& f, const FixpointConfig& cfg) {
  CwpResult out;
  InferenceResult num = twp(false, t, f, cfg);
  InferenceResult den = twlp(false, t, Expectation::one(), cfg);
  if (den.value == ExtReal(0)) throw Error(ErrorKind::kZeroDenominator, "every path fails");
  out.numerator = num.value;
  out.denominator = den.value;
  out.lo = num.value.is_infinite() ? num.value : ExtReal(num.value.value() / den.value.value());
  out.converged = num.converged && den.converged;
  out.iterations = std::max(num.iterations, den.iterations);
  try {
    if (!contains_fix(t)) {
      twlp(false, t, f, cfg);
      out.hi = out.lo;
      return out;
    }
    InferenceResult upper = twlp(false, t, f, cfg);
    InferenceResult mass = twp(false, t, Expectation::one(), cfg);
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

ValueDist project(const Dist& d, Symbol x) {
  ValueDist out;
  out.fail_mass = d.fail_mass;
  out.unresolved_mass = d.unresolved_mass;
  for (const auto& [s, m] : d.mass) out.mass[s.lookup(x)] += m;
  return out;
}

namespace {

void dump_into(const Tree& t, int depth, int expand, std::ostringstream& os) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (t.kind()) {
    case TreeKind::kLeaf: os << pad << "Leaf " << to_string(t.state()) << '\n'; return;
    case TreeKind::kFail: os << pad << "Fail\n"; return;
    case TreeKind::kChoice:
      os << pad << "Choice " << to_string(t.bias()) << '\n';
      dump_into(t.left(), depth + 1, expand, os);
      dump_into(t.right(), depth + 1, expand, os);
      return;
    case TreeKind::kFix: {
      os << pad << "Fix " << to_string(t.state()) << " while " << pretty_print(t.guard());
      if (t.key_vars() != nullptr) {
        os << " keys {";
        bool first = true;
        for (Symbol x : *t.key_vars()) {
          os << (first ? "" : ", ") << x.name();
          first = false;
        }
        os << '}';
      }
      os << '\n';
      if (expand <= 0) {
        os << pad << "  ...\n";
        return;
      }
      if (eval_bool(t.guard(), t.state())) {
        os << pad << "  body:\n";
        dump_into(t.body()(t.state()), depth + 2, expand - 1, os);
      } else {
        os << pad << "  exit:\n";
        dump_into(t.exit()(t.state()), depth + 2, expand - 1, os);
      }
      return;
    }
  }
}

}  // namespace

std::string dump(const Tree& t, int expand_depth) {
  std::ostringstream os;
  dump_into(t, 0, expand_depth, os);
  return os.str();
}

std::size_t tree_size(const Tree& t) {
  if (t.kind() == TreeKind::kChoice) return 1 + tree_size(t.left()) + tree_size(t.right());
  return 1;
}

}  // namespace zar
