#include "zar/fixpoint.hpp"

#include "zar/error.hpp"

#include <pthread.h>

#include <exception>
#include <unordered_map>
#include <vector>

namespace zar {

namespace {

struct AbortClosedForm {
  const void* token;
};

using StateTable = std::unordered_map<State, ExtReal, StateHash>;

State project(const State& s, const VarSet* keys) {
  return keys == nullptr ? s : s.restrict(*keys);
}

class Solver {
 public:
  Solver(const LoopSpec& loop, const State& init, Mode mode, const FixpointConfig& cfg, SolveStats& stats)
      : loop_(loop), init_(init), mode_(mode), cfg_(cfg), stats_(stats) {}

  ExtReal run() {
    ++stats_.loops;
    if (!guard(init_)) return exit_value(init_);
    if (cfg_.closed_form) {
      if (auto v = closed_form()) {
        ++stats_.closed_forms;
        stats_.max_iterations = std::max<std::size_t>(stats_.max_iterations, 1);
        return *v;
      }
    }
    return kleene();
  }

 private:
  struct Iteration {
    Mode mode;
    ExtReal bottom;
    bool real_exit;  // false: exits are worth 1 (termination mass)
    std::vector<StateTable> levels;
  };

  bool guard(const State& s) const { return eval_bool(loop_.guard, s); }

  ExtReal exit_value(const State& s) {
    auto it = exits_.find(s);
    if (it != exits_.end()) return it->second;
    ExtReal v = loop_.exit(s);
    exits_.emplace(s, v);
    return v;
  }

  ExtReal at(Iteration& it, std::size_t k, const State& s) {
    if (!guard(s)) return it.real_exit ? exit_value(s) : ExtReal(1);
    if (k == 0) return it.bottom;
    if (it.levels.size() <= k) it.levels.resize(k + 1);
    State key = project(s, loop_.key_vars);
    {
      auto& table = it.levels[k];
      auto found = table.find(key);
      if (found != table.end()) return found->second;
    }
    auto cont = [&](const State& t) { return at(it, k - 1, t); };
    ExtReal v = loop_.step(s, cont, it.mode);
    it.levels[k].emplace(std::move(key), v);
    return v;
  }

  // All guard-true states share the initial key, so the loop value v solves
  // v = A + r v with A the value of one iteration that stops at the head and
  // r the probability of returning to the head.
  std::optional<ExtReal> closed_form() {
    const State key0 = project(init_, loop_.key_vars);
    auto check = [&](const State& s) {
      if (project(s, loop_.key_vars) != key0) throw AbortClosedForm{this};
    };
    auto stop = [&](const State& s) -> ExtReal {
      if (!guard(s)) return exit_value(s);
      check(s);
      return ExtReal(0);
    };
    auto back = [&](const State& s) -> ExtReal {
      if (!guard(s)) return ExtReal(0);
      check(s);
      return ExtReal(1);
    };
    ExtReal a;
    ExtReal r;
    try {
      a = loop_.step(init_, stop, mode_);
      r = loop_.step(init_, back, Mode{});
    } catch (const AbortClosedForm& abort) {
      if (abort.token != this) throw;
      return std::nullopt;
    }
    if (a.is_infinite()) return a;
    if (ExtReal(1) <= r) return ExtReal(mode_.liberal ? 1 : 0);
    return ExtReal(a.value() / (1 - r.value()));
  }

  ExtReal kleene() {
    Iteration main{mode_, ExtReal(mode_.liberal ? 1 : 0), true, {}};
    Iteration term{Mode{false, true}, ExtReal(0), false, {}};
    const ExtReal tol(cfg_.tolerance);
    ExtReal prev = main.bottom;
    for (std::size_t n = 1; n <= cfg_.max_iters; ++n) {
      ExtReal v = at(main, n, init_);
      if (mode_.liberal ? prev < v : v < prev) ++stats_.monotonicity_violations;
      if (distance(v, prev) <= tol) {
        ExtReal t = at(term, n, init_);
        ExtReal residual = ExtReal(1) <= t ? ExtReal(0) : ExtReal(1) - t;
        if (residual <= tol) {
          stats_.max_iterations = std::max(stats_.max_iterations, n);
          return v;
        }
      }
      prev = std::move(v);
    }
    ++stats_.unconverged;
    stats_.max_iterations = std::max(stats_.max_iterations, cfg_.max_iters);
    return prev;
  }

  const LoopSpec& loop_;
  const State& init_;
  Mode mode_;
  const FixpointConfig& cfg_;
  SolveStats& stats_;
  StateTable exits_;
};

}  // namespace

ExtReal solve_loop(const LoopSpec& loop, const State& init, Mode mode, const FixpointConfig& cfg,
                   SolveStats& stats) {
  if (cfg.max_iters == 0) throw Error(ErrorKind::kInternal, "max_iters must be positive");
  return Solver(loop, init, mode, cfg, stats).run();
}

void run_with_large_stack(const std::function<void()>& fn) {
  struct Job {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, std::size_t{1} << 30);
  pthread_t thread;
  auto entry = [](void* p) -> void* {
    auto* j = static_cast<Job*>(p);
    try {
      (*j->fn)();
    } catch (...) {
      j->error = std::current_exception();
    }
    return nullptr;
  };
  if (pthread_create(&thread, &attr, entry, &job) != 0) {
    pthread_attr_destroy(&attr);
    fn();
    return;
  }
  pthread_attr_destroy(&attr);
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

}  // namespace zar
