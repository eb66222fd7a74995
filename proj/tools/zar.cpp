#include "zar/compile.hpp"
#include "zar/error.hpp"
#include "zar/parser.hpp"
#include "zar/sampler.hpp"
#include "zar/semantics.hpp"
#include "zar/stats.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using namespace zar;
using nlohmann::json;

enum Exit { kOk = 0, kSyntax = 1, kSemantic = 2, kInternal = 3, kRejected = 4 };

struct Common {
  std::string file;
  std::vector<std::string> params;
};

struct Loaded {
  SourceFile source;
  State init;
};

Loaded load(const Common& c) {
  std::ifstream in(c.file);
  if (!in) throw Error(ErrorKind::kSyntaxError, "cannot read " + c.file);
  std::stringstream ss;
  ss << in.rdbuf();
  Loaded l{parse_source(ss.str()), {}};
  std::vector<std::pair<Symbol, Value>> overrides;
  for (const auto& p : c.params) overrides.push_back(parse_binding(p));
  l.init = l.source.initial_state(overrides);
  return l;
}

Symbol output_var(const Loaded& l, const std::string& flag) {
  if (!flag.empty()) return Symbol(flag);
  if (l.source.out) return *l.source.out;
  throw Error(ErrorKind::kSyntaxError, "no output variable: add `#out x` or pass --out");
}

std::string param_text(const State& s) {
  std::string out;
  for (const auto& [x, v] : s.bindings()) out += (out.empty() ? "" : ",") + x.name() + "=" + to_string(v);
  return out;
}

// "1/1000", "0.001" or "1e-3".
Rational parse_rational(const std::string& text) {
  auto e = text.find_first_of("eE");
  Rational q = parse_binding("q=" + text.substr(0, e)).second.to_rational();
  if (e == std::string::npos) return q;
  int exponent = 0;
  try {
    exponent = std::stoi(text.substr(e + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::kSyntaxError, "bad number " + text);
  }
  for (; exponent > 0; --exponent) q *= 10;
  for (; exponent < 0; ++exponent) q /= 10;
  return q;
}

json bound(const std::optional<ExtReal>& x) {
  if (!x || x->is_infinite()) return nullptr;
  return x->to_double();
}

int run_compile(const Common& c, const std::string& stage, int depth) {
  Loaded l = load(c);
  Tree t = compile(l.source.program, l.init);
  if (stage == "elim") t = elim_choices(t);
  if (stage == "debias") t = debias(elim_choices(t));
  std::cout << dump(t, depth);
  return kOk;
}

int run_infer(const Common& c, const std::string& query, const std::string& event, const std::string& tol,
              std::size_t max_iters) {
  Loaded l = load(c);
  Expectation f = event.empty() ? Expectation::from_expr(parse_expr(query)) : Expectation::indicator(parse_expr(event));
  FixpointConfig cfg;
  cfg.max_iters = max_iters;
  cfg.tolerance = parse_rational(tol);
  if (cfg.tolerance < 0) throw Error(ErrorKind::kSyntaxError, "negative tolerance");
  CwpResult r = cwp(l.source.program, f, l.init, cfg);
  json j;
  j["query"] = event.empty() ? query : event;
  j["value"] = r.lo.is_infinite() ? json(nullptr) : json(r.lo.to_double());
  j["exact"] = to_string(r.lo);
  j["bounds"] = {bound(r.lo), bound(r.hi)};
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

struct Moments {
  double mean = 0, sd = 0;
};

template <class T, class F>
Moments moments(const std::vector<T>& xs, F value) {
  Moments m;
  if (xs.empty()) return m;
  for (const auto& x : xs) m.mean += value(x);
  m.mean /= double(xs.size());
  for (const auto& x : xs) m.sd += (value(x) - m.mean) * (value(x) - m.mean);
  m.sd = std::sqrt(m.sd / double(xs.size()));
  return m;
}

int run_sample(const Common& c, const std::string& out_flag, std::uint64_t n, std::uint64_t seed,
               const std::string& out_file, const std::string& bits, unsigned jobs) {
  Loaded l = load(c);
  Symbol out = output_var(l, out_flag);
  Tree t = compile_debiased(l.source.program, l.init, VarSet{out});
  SampleSet s;
  if (!bits.empty()) {
    FixedStream stream = FixedStream::parse(bits);
    Sampler sampler(t);
    for (std::uint64_t i = 0; i < n; ++i) {
      SampleRecord r = sampler.sample(stream);
      s.values.push_back(r.value.lookup(out));
      s.bits.push_back(r.bits_used);
      s.restarts.push_back(r.restarts);
    }
  } else {
    s = draw_samples(t, out, n, seed, jobs);
  }
  if (!out_file.empty()) {
    std::ofstream os(out_file);
    os << "value\tbits\trestarts\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      os << to_string(s.values[i]) << '\t' << s.bits[i] << '\t' << s.restarts[i] << '\n';
    }
    if (!os) throw Error(ErrorKind::kInternal, "cannot write " + out_file);
  }
  Moments v = moments(s.values, [](const Value& x) { return to_double(x); });
  Moments b = moments(s.bits, [](std::uint64_t x) { return double(x); });
  Moments r = moments(s.restarts, [](std::uint64_t x) { return double(x); });
  json j;
  j["param"] = param_text(l.init);
  j["out"] = out.name();
  j["n"] = s.values.size();
  j["seed"] = bits.empty() ? json(seed) : json(nullptr);
  j["mean"] = v.mean;
  j["stddev"] = v.sd;
  j["bit_mean"] = b.mean;
  j["bit_stddev"] = b.sd;
  j["restart_mean"] = r.mean;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

Pmf read_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kSyntaxError, "cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSyntaxError, path + ": " + e.what());
  }
  Pmf p;
  for (const auto& [key, mass] : j.items()) p[eval_expr(parse_expr(key), State{})] = mass.get<double>();
  return p;
}

int run_validate(const Common& c, const std::string& out_flag, std::uint64_t n, std::uint64_t seed,
                 const std::string& reference, unsigned jobs, double max_tv, int budget) {
  Loaded l = load(c);
  Symbol out = output_var(l, out_flag);
  Tree t = compile_debiased(l.source.program, l.init, VarSet{out});
  std::string note = reference;
  Pmf ref = reference == "oracle" ? oracle_pmf(t, out, &note, 1e-6, budget) : read_reference(reference);
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.jobs = jobs;
  cfg.param = param_text(l.init);
  Report r = summarize(draw_samples(t, out, n, seed, jobs), ref, cfg);
  std::cout << to_json(r).dump(2) << '\n';
  const bool pass = r.tv <= max_tv;
  std::cerr << (pass ? "pass" : "FAIL") << ": tv " << r.tv << (pass ? " <= " : " > ") << max_tv << " against "
            << note << '\n';
  return pass ? kOk : kRejected;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kSyntaxError:
    case ErrorKind::kArityError: return kSyntax;
    case ErrorKind::kInternal: return kInternal;
    default: return kSemantic;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zar: compile, analyse and sample cpGCL programs"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", common.file, "program (.zar)")->required();
    sub->add_option("--param", common.params, "override a #param default, name=value")->take_all();
  };

  std::string stage = "debias";
  int depth = 1;
  auto* compile_cmd = app.add_subcommand("compile", "print the CF tree");
  add_common(compile_cmd);
  compile_cmd->add_option("--stage", stage, "raw, elim or debias")->check(CLI::IsMember({"raw", "elim", "debias"}));
  compile_cmd->add_option("--expand-depth", depth, "Fix nesting levels to expand")->check(CLI::NonNegativeNumber);

  std::string query, event, tol = "1/1000000000";
  std::size_t max_iters = 10000;
  auto* infer_cmd = app.add_subcommand("infer", "conditional expectation by cwp");
  add_common(infer_cmd);
  auto* q = infer_cmd->add_option("--query", query, "numeric expression");
  auto* ev = infer_cmd->add_option("--event", event, "boolean expression");
  q->excludes(ev);
  infer_cmd->add_option("--tol", tol, "convergence tolerance, e.g. 1/1000, 0.001 or 1e-3");
  infer_cmd->add_option("--max-iters", max_iters, "iteration cap per loop")->check(CLI::PositiveNumber);

  std::uint64_t n = 100000, seed = 0;
  std::string out_flag, out_file, bits;
  unsigned jobs = 1;
  auto* sample_cmd = app.add_subcommand("sample", "draw samples with the random-bit sampler");
  add_common(sample_cmd);
  sample_cmd->add_option("-n", n, "sample count");
  sample_cmd->add_option("--seed", seed, "PRNG seed");
  sample_cmd->add_option("-o", out_file, "write records to this file");
  sample_cmd->add_option("--bits", bits, "replay this 0/1 string instead of the PRNG");
  sample_cmd->add_option("--out", out_flag, "variable to report (default: #out)");
  sample_cmd->add_option("-j", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string reference = "oracle";
  double max_tv = 0.01;
  int budget = 64;
  auto* validate_cmd = app.add_subcommand("validate", "compare samples with a reference distribution");
  add_common(validate_cmd);
  validate_cmd->add_option("-n", n, "sample count");
  validate_cmd->add_option("--seed", seed, "PRNG seed");
  validate_cmd->add_option("--reference", reference, "oracle, or a JSON file mapping values to masses");
  validate_cmd->add_option("--out", out_flag, "variable to report (default: #out)");
  validate_cmd->add_option("--max-tv", max_tv, "largest accepted total variation distance");
  validate_cmd->add_option("--budget", budget, "largest bit budget for the oracle")->check(CLI::PositiveNumber);
  validate_cmd->add_option("-j", jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kSyntax;
  }

  try {
    if (*compile_cmd) return run_compile(common, stage, depth);
    if (*infer_cmd) {
      if (query.empty() == event.empty()) throw Error(ErrorKind::kSyntaxError, "give one of --query or --event");
      return run_infer(common, query, event, tol, max_iters);
    }
    if (*sample_cmd) return run_sample(common, out_flag, n, seed, out_file, bits, jobs);
    if (*validate_cmd) return run_validate(common, out_flag, n, seed, reference, jobs, max_tv, budget);
  } catch (const Error& e) {
    std::cerr << "zar: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "zar: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
