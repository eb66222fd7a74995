#pragma once

#include "zar/expr.hpp"

#include <initializer_list>
#include <memory>
#include <map>
#include <unordered_map>

namespace zar {

enum class CommandKind { kSkip, kAssign, kSeq, kObserve, kIte, kChoice, kUniform, kWhile };

/// cpGCL command AST.
///
/// `Uniform(e, x, body)` draws n uniformly from [0, e) and runs `body` with
/// x bound to n. `Choice(p, c1, c2)` takes c1 with probability p.
class Command {
 public:
  Command() : Command(skip()) {}

  static Command skip();
  static Command assign(Symbol x, Expr e);
  static Command assign(std::string_view x, Expr e) { return assign(Symbol(x), std::move(e)); }
  static Command seq(Command first, Command second);
  // Right-nested sequence; an empty list is skip.
  static Command seq(std::initializer_list<Command> commands);
  static Command observe(Expr e);
  static Command ite(Expr guard, Command then_branch, Command else_branch);
  static Command choice(Expr p, Command left, Command right);
  static Command uniform(Expr n, Symbol x, Command body);
  static Command uniform(Expr n, std::string_view x, Command body) {
    return uniform(std::move(n), Symbol(x), std::move(body));
  }
  static Command loop(Expr guard, Command body);

  CommandKind kind() const noexcept { return node_->kind; }
  Symbol variable() const noexcept { return node_->var; }
  // Assigned expression, observed predicate, guard, choice bias or range.
  const Expr& expr() const noexcept { return node_->expr; }
  const Command& first() const { return *node_->first; }
  const Command& second() const { return *node_->second; }
  const Command& body() const { return *node_->first; }
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Command& a, const Command& b);

 private:
  struct Node {
    CommandKind kind = CommandKind::kSkip;
    Symbol var;
    Expr expr;
    std::shared_ptr<const Command> first;
    std::shared_ptr<const Command> second;
  };
  explicit Command(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// State after executing an assignment.
State state_update(const State& s, Symbol x, Value v);

// Static facts used to key loop memo tables.
VarSet all_vars(const Command& c);
bool contains_loop(const Command& c);
bool contains_observe(const Command& c);

/// Variables read before being overwritten, given the set live afterwards.
VarSet live_in(const Command& c, const VarSet& live_out);

// live_in with loop results remembered across calls on one program.
class Liveness {
 public:
  VarSet in(const Command& c, const VarSet& live_out);

 private:
  std::map<std::pair<const void*, VarSet>, VarSet> loops_;
};

/// For every loop in a program, the variables that determine the value of one
/// more iteration when its guard holds: the loop body's live-in set computed
/// against the loop-head live set. Keyed by `Command::id()`. A loop reached
/// from several program points gets the union.
class LoopKeys {
 public:
  LoopKeys() = default;
  LoopKeys(const Command& program, const VarSet& live_out);

  // nullptr when the loop was not part of the analysed program.
  const VarSet* find(const Command& loop) const;

 private:
  VarSet analyse(const Command& c, const VarSet& live_out, Liveness& live);
  std::unordered_map<const void*, VarSet> keys_;
};

}  // namespace zar
