#pragma once

#include "zar/expectation.hpp"
#include "zar/fixpoint.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace zar {

class Tree;

/// Pure function State -> Tree. Copies share the underlying callable, and
/// `id()` identifies it for caching.
class Generator {
 public:
  using Fn = std::function<Tree(const State&)>;

  Generator() = default;
  explicit Generator(Fn fn) : fn_(std::make_shared<const Fn>(std::move(fn))) {}
  // The generator s -> Leaf s.
  static const Generator& leaf();

  Tree operator()(const State& s) const;
  const void* id() const noexcept { return fn_.get(); }
  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

 private:
  std::shared_ptr<const Fn> fn_;
};

enum class TreeKind { kLeaf, kFail, kChoice, kFix };

/// Choice-fix tree. Choice takes `left` with probability `bias`. A Fix node
/// runs `body` from its state while `guard` holds, then continues with
/// `exit`. `key_vars`, when set, are the only variables a guard-true state's
/// behaviour depends on.
class Tree {
 public:
  Tree() : Tree(fail()) {}

  static Tree leaf(State s);
  static Tree fail();
  static Tree choice(Rational p, Tree left, Tree right);
  static Tree fix(State init, Expr guard, Generator body, Generator exit,
                  std::shared_ptr<const VarSet> key_vars = nullptr);

  TreeKind kind() const noexcept { return node_->kind; }
  // Leaf state or Fix initial state.
  const State& state() const noexcept { return node_->state; }
  const Rational& bias() const noexcept { return node_->bias; }
  const Tree& left() const { return *node_->left; }
  const Tree& right() const { return *node_->right; }
  const Expr& guard() const noexcept { return node_->guard; }
  const Generator& body() const noexcept { return node_->body; }
  const Generator& exit() const noexcept { return node_->exit; }
  const VarSet* key_vars() const noexcept { return node_->key_vars.get(); }
  const std::shared_ptr<const VarSet>& shared_key_vars() const noexcept { return node_->key_vars; }
  const void* id() const noexcept { return node_.get(); }

  // Structural; Fix nodes compare their generators by identity.
  friend bool operator==(const Tree& a, const Tree& b);

 private:
  struct Node {
    TreeKind kind = TreeKind::kFail;
    State state;
    Rational bias;
    std::shared_ptr<const Tree> left;
    std::shared_ptr<const Tree> right;
    Expr guard;
    Generator body;
    Generator exit;
    std::shared_ptr<const VarSet> key_vars;
  };
  explicit Tree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Monadic bind: every Leaf s becomes f(s); a Fix binds f after its exit.
Tree tree_bind(const Tree& t, const Generator& f);

InferenceResult twp(bool b, const Tree& t, const Expectation& f, const FixpointConfig& cfg = {});
InferenceResult twlp(bool b, const Tree& t, const Expectation& f, const FixpointConfig& cfg = {});
CwpResult tcwp(const Tree& t, const Expectation& f, const FixpointConfig& cfg = {});

/// Finite distribution over outcomes with the mass that failed an
/// observation or was not resolved. All masses sum to one.
template <class K>
struct BasicDist {
  std::map<K, Rational> mass;
  Rational fail_mass;
  Rational unresolved_mass;

  Rational total() const {
    Rational sum = fail_mass + unresolved_mass;
    for (const auto& [k, m] : mass) sum += m;
    return sum;
  }
};

using Dist = BasicDist<State>;
using ValueDist = BasicDist<Value>;

// Pushes a distribution over states forward through x.
ValueDist project(const Dist& d, Symbol x);

/// Indented rendering; Fix nodes show their body and exit expanded at the
/// initial state, nested up to `expand_depth` levels.
std::string dump(const Tree& t, int expand_depth = 1);

// Number of nodes, not expanding Fix generators.
std::size_t tree_size(const Tree& t);

}  // namespace zar
