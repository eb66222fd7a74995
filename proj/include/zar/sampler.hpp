#pragma once

#include "zar/cftree.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace zar {

class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual bool next_bit() = 0;
};

/// xoshiro256** seeded by four splitmix64 outputs; bits are taken from each
/// 64-bit output most significant first.
class SeededPrng final : public BitSource {
 public:
  explicit SeededPrng(std::uint64_t seed);
  bool next_bit() override;
  std::uint64_t next_u64();

 private:
  std::uint64_t s_[4];
  std::uint64_t buffer_ = 0;
  int remaining_ = 0;
};

/// splitmix64 step, also used to derive per-chunk seeds.
std::uint64_t splitmix64(std::uint64_t& state);
// Seed for chunk `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Replays a fixed bit sequence; raises Exhausted at its end unless cyclic.
class FixedStream final : public BitSource {
 public:
  explicit FixedStream(std::vector<bool> bits, bool cyclic = false);
  // From text of '0'/'1' characters ('1' is true); other characters ignored.
  static FixedStream parse(std::string_view text, bool cyclic = false);
  bool next_bit() override;
  std::size_t position() const noexcept { return pos_; }

 private:
  std::vector<bool> bits_;
  bool cyclic_;
  std::size_t pos_ = 0;
};

class CountingWrapper final : public BitSource {
 public:
  explicit CountingWrapper(BitSource& inner) : inner_(inner) {}
  bool next_bit() override {
    bool b = inner_.next_bit();
    ++count_;
    return b;
  }
  std::uint64_t count() const noexcept { return count_; }

 private:
  BitSource& inner_;
  std::uint64_t count_ = 0;
};

inline constexpr std::uint64_t kDefaultMaxSteps = 10'000'000;

enum class RunStatus { kTerminated, kFailed, kStepBudgetExceeded };

struct RunResult {
  RunStatus status = RunStatus::kFailed;
  State state;
  std::uint64_t bits = 0;
  std::uint64_t steps = 0;
};

struct SampleRecord {
  State value;
  std::uint64_t bits_used = 0;
  std::uint64_t restarts = 0;
};

/// Executes debiased trees against a bit source; bit true takes the left
/// branch. Generator results are cached per (generator, state), so one
/// Sampler should be reused across many samples of the same tree.
class Sampler {
 public:
  explicit Sampler(Tree t, std::uint64_t max_steps = kDefaultMaxSteps, std::size_t cache_limit = 1 << 18);

  // One attempt; an observation failure ends it.
  RunResult run_open(BitSource& src);
  // Restarts the whole program after each failure. Throws
  // StepBudgetExceeded, or Exhausted after `max_restarts` failures.
  SampleRecord sample(BitSource& src, std::optional<std::uint64_t> max_restarts = std::nullopt);

 private:
  Tree expand(const Generator& g, const State& s);

  struct Key {
    const void* gen;
    State state;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return hash_combine(std::hash<const void*>{}(k.gen), k.state.hash()); }
  };

  Tree tree_;
  std::uint64_t max_steps_;
  std::size_t cache_limit_;
  // Keeps the generator alive so its address is not reused while cached.
  std::unordered_map<Key, std::pair<Generator, Tree>, KeyHash> cache_;
  std::vector<Tree> stack_;
};

RunResult run_open(const Tree& t, BitSource& src, std::uint64_t max_steps = kDefaultMaxSteps);
SampleRecord sample(const Tree& t, BitSource& src, std::uint64_t max_steps = kDefaultMaxSteps,
                    std::optional<std::uint64_t> max_restarts = std::nullopt);

/// Exact distribution over all bit strings of length at most `bit_budget`:
/// a terminal reached after k bits carries 2^-k. Paths that are still open
/// at the budget (or exceed `max_steps` deterministic steps between two
/// bits) count as unresolved.
Dist enumerate_paths(const Tree& t, int bit_budget, std::uint64_t max_steps = kDefaultMaxSteps);

template <class K>
using IntervalMap = std::map<K, std::pair<Rational, Rational>>;

/// Posterior bounds under global rejection: for each outcome,
/// [m / (1 - fail), min(1, (m + unresolved) / (1 - fail))].
template <class K>
IntervalMap<K> conditional_dist(const BasicDist<K>& d);

}  // namespace zar
