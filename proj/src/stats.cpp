#include "zar/stats.hpp"

#include "zar/compile.hpp"
#include "zar/error.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace zar {

namespace {

void check_normalized(const Pmf& p, const char* name) {
  double sum = 0;
  for (const auto& [v, m] : p) {
    if (m < 0) throw Error(ErrorKind::kNotNormalized, std::string(name) + " has negative mass");
    sum += m;
  }
  if (std::abs(sum - 1) > 1e-12) {
    std::ostringstream os;
    os << name << " sums to " << std::setprecision(17) << sum;
    throw Error(ErrorKind::kNotNormalized, os.str());
  }
}

double at(const Pmf& p, const Value& v) {
  auto it = p.find(v);
  return it == p.end() ? 0.0 : it->second;
}

std::set<Value> support(const Pmf& p, const Pmf& q) {
  std::set<Value> s;
  for (const auto& [v, m] : p) s.insert(v);
  for (const auto& [v, m] : q) s.insert(v);
  return s;
}

}  // namespace

double tv_distance(const Pmf& p, const Pmf& q) {
  check_normalized(p, "p");
  check_normalized(q, "q");
  double sum = 0;
  for (const Value& v : support(p, q)) sum += std::abs(at(p, v) - at(q, v));
  return sum / 2;
}

double kl_divergence(const Pmf& p_emp, const Pmf& q_true) {
  check_normalized(p_emp, "p");
  check_normalized(q_true, "q");
  double sum = 0;
  for (const auto& [v, pv] : p_emp) {
    if (pv == 0) continue;
    double qv = at(q_true, v);
    if (qv == 0) return std::numeric_limits<double>::infinity();
    sum += pv * std::log(pv / qv);
  }
  return std::max(sum, 0.0);
}

double smape(const Pmf& p, const Pmf& q) {
  check_normalized(p, "p");
  check_normalized(q, "q");
  double sum = 0;
  std::size_t cells = 0;
  for (const Value& v : support(p, q)) {
    double a = at(p, v), b = at(q, v);
    if (a == 0 && b == 0) continue;
    sum += std::abs(a - b) / ((a + b) / 2);
    ++cells;
  }
  return cells == 0 ? 0.0 : sum / cells;
}

Pmf to_pmf(const ValueDist& d) {
  Pmf out;
  for (const auto& [v, m] : d.mass) out[v] = zar::to_double(m);
  return out;
}

double to_double(const Value& v) {
  if (v.is_bool()) return v.as_bool() ? 1.0 : 0.0;
  return zar::to_double(v.to_rational());
}

Pmf SampleSet::empirical() const {
  std::map<Value, std::uint64_t> counts;
  for (const Value& v : values) ++counts[v];
  Pmf out;
  for (const auto& [v, c] : counts) out[v] = static_cast<double>(c) / static_cast<double>(values.size());
  return out;
}

SampleSet draw_samples(const Tree& t, Symbol out, std::uint64_t n, std::uint64_t seed, unsigned jobs,
                       std::uint64_t max_steps) {
  SampleSet result;
  result.values.resize(n);
  result.bits.resize(n);
  result.restarts.resize(n);
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    Sampler sampler(t, max_steps);
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        SeededPrng rng(derive_seed(seed, c));
        const std::uint64_t end = std::min(n, (c + 1) * kChunkSize);
        for (std::uint64_t i = c * kChunkSize; i < end; ++i) {
          SampleRecord r = sampler.sample(rng);
          result.values[i] = r.value.lookup(out);
          result.bits[i] = r.bits_used;
          result.restarts[i] = r.restarts;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::uint64_t>(chunks, 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

namespace {

// JSON has no infinity; an infinite KL is written as null.
nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0, 0};
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "inf";
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace

nlohmann::json to_json(const Report& r) {
  return nlohmann::json{{"param", r.param},     {"mean", number(r.mean)},
                        {"stddev", number(r.stddev)}, {"tv", number(r.tv)},
                        {"kl", number(r.kl)},       {"smape", number(r.smape)},
                        {"bit_mean", number(r.bit_mean)}, {"bit_stddev", number(r.bit_stddev)},
                        {"n", r.n},                 {"seed", r.seed}};
}

std::string csv_header() { return "param,mean,stddev,tv,kl,smape,bit_mean,bit_stddev"; }

std::string csv_row(const Report& r) {
  std::ostringstream os;
  os << r.param << ',' << fmt(r.mean) << ',' << fmt(r.stddev) << ',' << fmt(r.tv) << ',' << fmt(r.kl) << ','
     << fmt(r.smape) << ',' << fmt(r.bit_mean) << ',' << fmt(r.bit_stddev);
  return os.str();
}

Pmf oracle_pmf(const Tree& t, Symbol out, std::string* note, double max_unresolved, int max_budget) {
  int budget = 24;
  while (true) {
    Dist d = enumerate_paths(t, budget);
    const Rational live = 1 - d.fail_mass;
    if (live - d.unresolved_mass <= 0) {
      if (d.unresolved_mass == 0 || budget >= max_budget) {
        throw Error(ErrorKind::kAllMassFails, "no outcome within " + std::to_string(budget) + " bits");
      }
    } else if (zar::to_double(d.unresolved_mass / live) <= max_unresolved || budget >= max_budget) {
      ValueDist vd = project(d, out);
      const Rational resolved = live - d.unresolved_mass;
      Pmf p;
      for (const auto& [v, m] : vd.mass) p[v] = zar::to_double(m / resolved);
      if (note) {
        std::ostringstream os;
        os << "enumerate_paths(budget=" << budget << ", unresolved=" << fmt(zar::to_double(d.unresolved_mass / live))
           << ")";
        *note = os.str();
      }
      return p;
    }
    budget = std::min(max_budget, budget + 8);
  }
}

Report summarize(const SampleSet& samples, const Pmf& reference, const ExperimentConfig& cfg) {
  Report r;
  r.param = cfg.param;
  r.n = samples.values.size();
  r.seed = cfg.seed;
  std::vector<double> xs, bits;
  xs.reserve(r.n);
  bits.reserve(r.n);
  for (const Value& v : samples.values) xs.push_back(to_double(v));
  for (auto b : samples.bits) bits.push_back(static_cast<double>(b));
  std::tie(r.mean, r.stddev) = mean_stddev(xs);
  std::tie(r.bit_mean, r.bit_stddev) = mean_stddev(bits);
  Pmf emp = samples.empirical();
  r.tv = tv_distance(emp, reference);
  r.kl = kl_divergence(emp, reference);
  r.smape = smape(emp, reference);
  return r;
}

Report run_experiment(const Command& program, const State& s0, Symbol out, const ExperimentConfig& cfg,
                      const std::optional<Pmf>& reference) {
  Tree t = compile_debiased(program, s0, VarSet{out});
  std::string note = "given";
  Pmf ref = reference ? *reference : oracle_pmf(t, out, &note);
  SampleSet samples = draw_samples(t, out, cfg.n, cfg.seed, cfg.jobs, cfg.max_steps);
  Report r = summarize(samples, ref, cfg);
  r.reference = note;
  return r;
}

}  // namespace zar
