#pragma once

#include "zar/command.hpp"
#include "zar/sampler.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace zar {

using Pmf = std::map<Value, double>;

/// Each input must sum to one within 1e-12 (NotNormalized otherwise).
double tv_distance(const Pmf& p, const Pmf& q);
// KL(p_emp || q_true) in nats; infinity when p has mass outside q's support.
double kl_divergence(const Pmf& p_emp, const Pmf& q_true);
double smape(const Pmf& p, const Pmf& q);

Pmf to_pmf(const ValueDist& d);
// Bool reads as 0/1.
double to_double(const Value& v);

struct SampleSet {
  std::vector<Value> values;
  std::vector<std::uint64_t> bits;
  std::vector<std::uint64_t> restarts;

  Pmf empirical() const;
};

inline constexpr std::uint64_t kChunkSize = 4096;

/// Draws n samples of `out` from t. Chunk i of kChunkSize samples uses
/// SeededPrng(derive_seed(seed, i)), so the result does not depend on jobs.
SampleSet draw_samples(const Tree& t, Symbol out, std::uint64_t n, std::uint64_t seed, unsigned jobs = 1,
                       std::uint64_t max_steps = kDefaultMaxSteps);

struct Report {
  std::string param;
  double mean = 0;
  double stddev = 0;
  double tv = 0;
  double kl = 0;
  double smape = 0;
  double bit_mean = 0;
  double bit_stddev = 0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  // How the reference distribution was obtained; not part of to_json.
  std::string reference;
};

nlohmann::json to_json(const Report& r);
std::string csv_header();
std::string csv_row(const Report& r);

/// Reference distribution of `out` from path enumeration, raising the bit
/// budget until the unresolved share drops below `max_unresolved` or the
/// budget reaches `max_budget`. Lower bounds are renormalized.
Pmf oracle_pmf(const Tree& t, Symbol out, std::string* note = nullptr, double max_unresolved = 1e-6,
               int max_budget = 64);

struct ExperimentConfig {
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::uint64_t max_steps = kDefaultMaxSteps;
  std::string param;
};

/// Samples `program` from s0 and compares `out` against `reference`, or
/// against oracle_pmf when none is given.
Report run_experiment(const Command& program, const State& s0, Symbol out, const ExperimentConfig& cfg,
                      const std::optional<Pmf>& reference = std::nullopt);

Report summarize(const SampleSet& samples, const Pmf& reference, const ExperimentConfig& cfg);

}  // namespace zar
