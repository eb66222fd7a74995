#include "zar/sampler.hpp"

#include "zar/error.hpp"

#include <unordered_map>

namespace zar {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (index * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

SeededPrng::SeededPrng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

namespace {
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t SeededPrng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

bool SeededPrng::next_bit() {
  if (remaining_ == 0) {
    buffer_ = next_u64();
    remaining_ = 64;
  }
  --remaining_;
  return (buffer_ >> remaining_) & 1;
}

FixedStream::FixedStream(std::vector<bool> bits, bool cyclic) : bits_(std::move(bits)), cyclic_(cyclic) {}

FixedStream FixedStream::parse(std::string_view text, bool cyclic) {
  std::vector<bool> bits;
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(c == '1');
  }
  return FixedStream(std::move(bits), cyclic);
}

bool FixedStream::next_bit() {
  if (pos_ >= bits_.size()) {
    if (!cyclic_ || bits_.empty()) throw Error(ErrorKind::kExhausted, "bit stream exhausted");
    pos_ = 0;
  }
  return bits_[pos_++];
}

Sampler::Sampler(Tree t, std::uint64_t max_steps, std::size_t cache_limit)
    : tree_(std::move(t)), max_steps_(max_steps), cache_limit_(cache_limit) {}

Tree Sampler::expand(const Generator& g, const State& s) {
  if (g.id() == Generator::leaf().id()) return Tree::leaf(s);
  Key key{g.id(), s};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second.second;
  Tree t = g(s);
  if (cache_.size() >= cache_limit_) cache_.clear();
  cache_.emplace(std::move(key), std::make_pair(g, t));
  return t;
}

RunResult Sampler::run_open(BitSource& src) {
  RunResult r;
  stack_.clear();
  Tree cur = tree_;
  while (true) {
    if (++r.steps > max_steps_) {
      r.status = RunStatus::kStepBudgetExceeded;
      return r;
    }
    switch (cur.kind()) {
      case TreeKind::kFail:
        r.status = RunStatus::kFailed;
        return r;
      case TreeKind::kChoice: {
        ++r.bits;
        Tree next = src.next_bit() ? cur.left() : cur.right();
        cur = std::move(next);
        break;
      }
      case TreeKind::kFix:
        if (eval_bool(cur.guard(), cur.state())) {
          stack_.push_back(cur);
          cur = expand(cur.body(), cur.state());
        } else {
          cur = expand(cur.exit(), cur.state());
        }
        break;
      case TreeKind::kLeaf: {
        if (stack_.empty()) {
          r.status = RunStatus::kTerminated;
          r.state = cur.state();
          return r;
        }
        State s = cur.state();
        const Tree& fix = stack_.back();
        if (eval_bool(fix.guard(), s)) {
          cur = expand(fix.body(), s);
        } else {
          Tree f = fix;
          stack_.pop_back();
          cur = expand(f.exit(), s);
        }
        break;
      }
    }
  }
}

SampleRecord Sampler::sample(BitSource& src, std::optional<std::uint64_t> max_restarts) {
  SampleRecord rec;
  while (true) {
    RunResult r = run_open(src);
    rec.bits_used += r.bits;
    switch (r.status) {
      case RunStatus::kTerminated: rec.value = std::move(r.state); return rec;
      case RunStatus::kStepBudgetExceeded:
        throw Error(ErrorKind::kStepBudgetExceeded, "no result after " + std::to_string(max_steps_) + " steps");
      case RunStatus::kFailed:
        if (max_restarts && rec.restarts >= *max_restarts) {
          throw Error(ErrorKind::kExhausted, "gave up after " + std::to_string(rec.restarts) + " restarts");
        }
        ++rec.restarts;
        break;
    }
  }
}

RunResult run_open(const Tree& t, BitSource& src, std::uint64_t max_steps) {
  return Sampler(t, max_steps).run_open(src);
}

SampleRecord sample(const Tree& t, BitSource& src, std::uint64_t max_steps, std::optional<std::uint64_t> max_restarts) {
  return Sampler(t, max_steps).sample(src, max_restarts);
}

namespace {

struct Frame {
  Tree fix;
  std::shared_ptr<const Frame> parent;
};
using FramePtr = std::shared_ptr<const Frame>;

struct PairHash {
  std::size_t operator()(const std::pair<const void*, const void*>& p) const {
    return hash_combine(std::hash<const void*>{}(p.first), std::hash<const void*>{}(p.second));
  }
};

class Enumerator {
 public:
  Enumerator(int budget, std::uint64_t max_steps) : budget_(budget), max_steps_(max_steps) {}

  Dist run(const Tree& t) {
    add(t, nullptr, Integer(1), 0);
    for (int depth = 0; depth < budget_ && !frontier_.empty(); ++depth) {
      Frontier current;
      current.swap(frontier_);
      for (auto& [key, cfg] : current) {
        add(cfg.tree.left(), cfg.stack, cfg.count, depth + 1);
        add(cfg.tree.right(), cfg.stack, cfg.count, depth + 1);
      }
    }
    for (auto& [key, cfg] : frontier_) dist_.unresolved_mass += weight(cfg.count, budget_);
    return std::move(dist_);
  }

 private:
  struct Config {
    Tree tree;
    FramePtr stack;
    Integer count;
  };
  using Frontier = std::unordered_map<std::pair<const void*, const void*>, Config, PairHash>;

  static Rational weight(const Integer& count, int depth) {
    Integer denom = 1;
    denom <<= depth;
    return Rational(count, denom);
  }

  FramePtr push(const Tree& fix, const FramePtr& parent) {
    auto key = std::make_pair(fix.id(), static_cast<const void*>(parent.get()));
    auto it = frames_.find(key);
    if (it != frames_.end()) return it->second;
    auto f = std::make_shared<const Frame>(Frame{fix, parent});
    frames_.emplace(key, f);
    return f;
  }

  Tree expand(const Generator& g, const State& s) {
    if (g.id() == Generator::leaf().id()) return Tree::leaf(s);
    auto& slot = generated_[g.id()];
    auto it = slot.second.find(s);
    if (it != slot.second.end()) return it->second;
    if (!slot.first) slot.first = g;
    Tree t = g(s);
    slot.second.emplace(s, t);
    return t;
  }

  // Runs deterministic steps until a choice or a terminal.
  void add(Tree t, FramePtr stack, const Integer& count, int depth) {
    for (std::uint64_t steps = 0;; ++steps) {
      if (steps > max_steps_) {
        dist_.unresolved_mass += weight(count, depth);
        return;
      }
      switch (t.kind()) {
        case TreeKind::kFail: dist_.fail_mass += weight(count, depth); return;
        case TreeKind::kChoice: {
          auto key = std::make_pair(t.id(), static_cast<const void*>(stack.get()));
          auto [it, inserted] = frontier_.try_emplace(key, Config{t, stack, count});
          if (!inserted) it->second.count += count;
          return;
        }
        case TreeKind::kFix:
          if (eval_bool(t.guard(), t.state())) {
            stack = push(t, stack);
            t = expand(t.body(), t.state());
          } else {
            t = expand(t.exit(), t.state());
          }
          break;
        case TreeKind::kLeaf: {
          if (!stack) {
            dist_.mass[t.state()] += weight(count, depth);
            return;
          }
          State s = t.state();
          if (eval_bool(stack->fix.guard(), s)) {
            t = expand(stack->fix.body(), s);
          } else {
            FramePtr top = stack;
            stack = top->parent;
            t = expand(top->fix.exit(), s);
          }
          break;
        }
      }
    }
  }

  int budget_;
  std::uint64_t max_steps_;
  Dist dist_;
  Frontier frontier_;
  std::unordered_map<std::pair<const void*, const void*>, FramePtr, PairHash> frames_;
  std::unordered_map<const void*, std::pair<Generator, std::unordered_map<State, Tree, StateHash>>> generated_;
};

}  // namespace

Dist enumerate_paths(const Tree& t, int bit_budget, std::uint64_t max_steps) {
  return Enumerator(bit_budget, max_steps).run(t);
}

template <class K>
IntervalMap<K> conditional_dist(const BasicDist<K>& d) {
  const Rational live = 1 - d.fail_mass;
  if (live - d.unresolved_mass <= 0) throw Error(ErrorKind::kAllMassFails, "no mass on any outcome");
  IntervalMap<K> out;
  for (const auto& [k, m] : d.mass) {
    Rational hi = (m + d.unresolved_mass) / live;
    if (hi > 1) hi = 1;
    out.emplace(k, std::make_pair(m / live, hi));
  }
  return out;
}

template IntervalMap<State> conditional_dist(const Dist&);
template IntervalMap<Value> conditional_dist(const ValueDist&);

}  // namespace zar
