#include "zar/command.hpp"

#include "zar/error.hpp"

#include <algorithm>
#include <vector>

namespace zar {

Command Command::skip() {
  static const Command kSkip(std::make_shared<Node>());
  return kSkip;
}

Command Command::assign(Symbol x, Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kAssign;
  n->var = x;
  n->expr = std::move(e);
  return Command(std::move(n));
}

Command Command::seq(Command first, Command second) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kSeq;
  n->first = std::make_shared<const Command>(std::move(first));
  n->second = std::make_shared<const Command>(std::move(second));
  return Command(std::move(n));
}

Command Command::seq(std::initializer_list<Command> commands) {
  if (commands.size() == 0) return skip();
  std::vector<Command> cs(commands);
  Command out = cs.back();
  for (auto it = cs.rbegin() + 1; it != cs.rend(); ++it) out = seq(*it, out);
  return out;
}

Command Command::observe(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kObserve;
  n->expr = std::move(e);
  return Command(std::move(n));
}

Command Command::ite(Expr guard, Command then_branch, Command else_branch) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kIte;
  n->expr = std::move(guard);
  n->first = std::make_shared<const Command>(std::move(then_branch));
  n->second = std::make_shared<const Command>(std::move(else_branch));
  return Command(std::move(n));
}

Command Command::choice(Expr p, Command left, Command right) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kChoice;
  n->expr = std::move(p);
  n->first = std::make_shared<const Command>(std::move(left));
  n->second = std::make_shared<const Command>(std::move(right));
  return Command(std::move(n));
}

Command Command::uniform(Expr range, Symbol x, Command body) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kUniform;
  n->expr = std::move(range);
  n->var = x;
  n->first = std::make_shared<const Command>(std::move(body));
  return Command(std::move(n));
}

Command Command::loop(Expr guard, Command body) {
  auto n = std::make_shared<Node>();
  n->kind = CommandKind::kWhile;
  n->expr = std::move(guard);
  n->first = std::make_shared<const Command>(std::move(body));
  return Command(std::move(n));
}

bool operator==(const Command& a, const Command& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case CommandKind::kSkip: return true;
    case CommandKind::kAssign: return a.variable() == b.variable() && a.expr() == b.expr();
    case CommandKind::kSeq: return a.first() == b.first() && a.second() == b.second();
    case CommandKind::kObserve: return a.expr() == b.expr();
    case CommandKind::kIte:
    case CommandKind::kChoice:
      return a.expr() == b.expr() && a.first() == b.first() && a.second() == b.second();
    case CommandKind::kUniform:
      return a.variable() == b.variable() && a.expr() == b.expr() && a.body() == b.body();
    case CommandKind::kWhile: return a.expr() == b.expr() && a.body() == b.body();
  }
  return false;
}

State state_update(const State& s, Symbol x, Value v) { return s.update(x, std::move(v)); }

namespace {

void collect_vars(const Command& c, VarSet& out) {
  switch (c.kind()) {
    case CommandKind::kSkip: return;
    case CommandKind::kAssign:
      out.insert(c.variable());
      collect_free_vars(c.expr(), out);
      return;
    case CommandKind::kSeq:
      collect_vars(c.first(), out);
      collect_vars(c.second(), out);
      return;
    case CommandKind::kObserve: collect_free_vars(c.expr(), out); return;
    case CommandKind::kIte:
    case CommandKind::kChoice:
      collect_free_vars(c.expr(), out);
      collect_vars(c.first(), out);
      collect_vars(c.second(), out);
      return;
    case CommandKind::kUniform:
      collect_free_vars(c.expr(), out);
      out.insert(c.variable());
      collect_vars(c.body(), out);
      return;
    case CommandKind::kWhile:
      collect_free_vars(c.expr(), out);
      collect_vars(c.body(), out);
      return;
  }
}

template <class Pred>
bool any_node(const Command& c, Pred pred) {
  if (pred(c)) return true;
  switch (c.kind()) {
    case CommandKind::kSeq:
    case CommandKind::kIte:
    case CommandKind::kChoice:
      return any_node(c.first(), pred) || any_node(c.second(), pred);
    case CommandKind::kUniform:
    case CommandKind::kWhile:
      return any_node(c.body(), pred);
    default:
      return false;
  }
}

VarSet set_union(VarSet a, const VarSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

}  // namespace

VarSet all_vars(const Command& c) {
  VarSet out;
  collect_vars(c, out);
  return out;
}

bool contains_loop(const Command& c) {
  return any_node(c, [](const Command& n) { return n.kind() == CommandKind::kWhile; });
}

bool contains_observe(const Command& c) {
  return any_node(c, [](const Command& n) { return n.kind() == CommandKind::kObserve; });
}

VarSet live_in(const Command& c, const VarSet& out) { return Liveness().in(c, out); }

VarSet Liveness::in(const Command& c, const VarSet& out) {
  switch (c.kind()) {
    case CommandKind::kSkip: return out;
    case CommandKind::kAssign: {
      VarSet in = out;
      in.erase(c.variable());
      collect_free_vars(c.expr(), in);
      return in;
    }
    case CommandKind::kSeq: return this->in(c.first(), this->in(c.second(), out));
    case CommandKind::kObserve: {
      VarSet in = out;
      collect_free_vars(c.expr(), in);
      return in;
    }
    case CommandKind::kIte:
    case CommandKind::kChoice: {
      VarSet in = set_union(this->in(c.first(), out), this->in(c.second(), out));
      collect_free_vars(c.expr(), in);
      return in;
    }
    case CommandKind::kUniform: {
      VarSet in = this->in(c.body(), out);
      in.erase(c.variable());
      collect_free_vars(c.expr(), in);
      return in;
    }
    case CommandKind::kWhile: {
      auto key = std::make_pair(c.id(), out);
      if (auto it = loops_.find(key); it != loops_.end()) return it->second;
      VarSet head = out;
      collect_free_vars(c.expr(), head);
      for (;;) {
        VarSet next = set_union(head, this->in(c.body(), head));
        if (next == head) break;
        head = std::move(next);
      }
      loops_.emplace(std::move(key), head);
      return head;
    }
  }
  return out;
}

LoopKeys::LoopKeys(const Command& program, const VarSet& live_out) {
  Liveness live;
  analyse(program, live_out, live);
}

const VarSet* LoopKeys::find(const Command& loop) const {
  auto it = keys_.find(loop.id());
  return it == keys_.end() ? nullptr : &it->second;
}

VarSet LoopKeys::analyse(const Command& c, const VarSet& out, Liveness& live) {
  switch (c.kind()) {
    case CommandKind::kSeq: return analyse(c.first(), analyse(c.second(), out, live), live);
    case CommandKind::kIte:
    case CommandKind::kChoice: {
      VarSet in = set_union(analyse(c.first(), out, live), analyse(c.second(), out, live));
      collect_free_vars(c.expr(), in);
      return in;
    }
    case CommandKind::kUniform: {
      VarSet in = analyse(c.body(), out, live);
      in.erase(c.variable());
      collect_free_vars(c.expr(), in);
      return in;
    }
    case CommandKind::kWhile: {
      const VarSet head = live.in(c, out);
      // Record keys (and nested loop keys) against the fixed point.
      VarSet key = analyse(c.body(), head, live);
      auto [it, inserted] = keys_.try_emplace(c.id(), key);
      if (!inserted) it->second.insert(key.begin(), key.end());
      return head;
    }
    default: return live.in(c, out);
  }
}

}  // namespace zar
