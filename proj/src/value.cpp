#include "zar/value.hpp"

#include "zar/error.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <unordered_set>

namespace zar {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTypeError: return "TypeError";
    case ErrorKind::kDivisionByZero: return "DivisionByZero";
    case ErrorKind::kChoiceOutOfRange: return "ChoiceOutOfRange";
    case ErrorKind::kUniformNonPositive: return "UniformNonPositive";
    case ErrorKind::kBoundError: return "BoundError";
    case ErrorKind::kZeroDenominator: return "ZeroDenominator";
    case ErrorKind::kSyntaxError: return "SyntaxError";
    case ErrorKind::kArityError: return "ArityError";
    case ErrorKind::kExhausted: return "Exhausted";
    case ErrorKind::kBiasOutOfRange: return "BiasOutOfRange";
    case ErrorKind::kNonPositive: return "NonPositive";
    case ErrorKind::kNotNormalized: return "NotNormalized";
    case ErrorKind::kAllMassFails: return "AllMassFails";
    case ErrorKind::kStepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorKind::kNegativeExpectation: return "NegativeExpectation";
    case ErrorKind::kInternal: return "Internal";
  }
  return "Unknown";
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw Error(ErrorKind::kDivisionByZero, "zero denominator");
  return Rational(num, den);
}

std::string to_string(const Integer& n) { return n.str(); }

std::string to_string(const Rational& q) {
  const Integer& den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::size_t hash_value(const Integer& n) {
  // Limb-wise hash; cpp_int has no std::hash specialisation in this Boost.
  std::size_t h = n.sign() < 0 ? 0x51ed270b27cd1b4dULL : 0;
  const auto& backend = n.backend();
  const auto* limbs = backend.limbs();
  for (std::size_t i = 0; i < backend.size(); ++i) {
    h = hash_combine(h, std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(limbs[i])));
  }
  return h;
}

namespace {

struct SymbolPool {
  std::mutex mutex;
  std::unordered_set<std::string> names;
};

SymbolPool& pool() {
  static auto* p = new SymbolPool();
  return *p;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
  auto& p = pool();
  std::lock_guard lock(p.mutex);
  name_ = &*p.names.emplace(name).first;
}

Rational Value::to_rational() const {
  switch (kind()) {
    case Kind::kInt: return Rational(as_int());
    case Kind::kRat: return as_rat();
    case Kind::kBool: break;
  }
  throw Error(ErrorKind::kTypeError, "expected a number, got " + to_string(*this));
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return a.v_.index() <=> b.v_.index();
  switch (a.kind()) {
    case Value::Kind::kBool: return a.as_bool() <=> b.as_bool();
    case Value::Kind::kInt:
      if (a.as_int() < b.as_int()) return std::strong_ordering::less;
      if (a.as_int() > b.as_int()) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case Value::Kind::kRat:
      if (a.as_rat() < b.as_rat()) return std::strong_ordering::less;
      if (a.as_rat() > b.as_rat()) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

std::size_t Value::hash() const {
  switch (kind()) {
    case Kind::kBool: return as_bool() ? 0x2545f4914f6cdd1dULL : 0x9e3779b97f4a7c15ULL;
    case Kind::kInt: return hash_value(as_int());
    case Kind::kRat:
      return hash_combine(hash_value(boost::multiprecision::numerator(as_rat())) + 7,
                          hash_value(boost::multiprecision::denominator(as_rat())));
  }
  return 0;
}

std::string_view to_string(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::kBool: return "Bool";
    case Value::Kind::kInt: return "Int";
    case Value::Kind::kRat: return "Rat";
  }
  return "?";
}

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kBool: return v.as_bool() ? "true" : "false";
    case Value::Kind::kInt: return v.as_int().str();
    case Value::Kind::kRat: {
      // Always keep the slash so a Rat never reads back as an Int.
      const auto& q = v.as_rat();
      return boost::multiprecision::numerator(q).str() + "/" +
             boost::multiprecision::denominator(q).str();
    }
  }
  return "?";
}

State::State(std::initializer_list<Binding> bindings) {
  for (const auto& [x, v] : bindings) set(x, v);
}

const Value* State::find(Symbol x) const {
  for (const auto& b : bindings_) {
    if (b.first == x) return &b.second;
  }
  return nullptr;
}

const Value& State::lookup(Symbol x) const {
  static const Value kZero = Value::integer(0);
  const Value* v = find(x);
  return v != nullptr ? *v : kZero;
}

void State::set(Symbol x, Value v) {
  hash_ = 0;
  for (auto& b : bindings_) {
    if (b.first == x) {
      b.second = std::move(v);
      return;
    }
  }
  auto pos = std::lower_bound(bindings_.begin(), bindings_.end(), x,
                              [](const Binding& b, Symbol s) { return b.first < s; });
  bindings_.insert(pos, Binding{x, std::move(v)});
}

State State::restrict(const VarSet& keep) const {
  State out;
  out.bindings_.reserve(std::min(bindings_.size(), keep.size()));
  auto k = keep.begin();
  for (const auto& b : bindings_) {
    while (k != keep.end() && *k < b.first) ++k;
    if (k == keep.end()) break;
    if (*k == b.first) out.bindings_.push_back(b);
  }
  return out;
}

State State::update(Symbol x, Value v) const {
  State out = *this;
  out.set(x, std::move(v));
  return out;
}

std::strong_ordering operator<=>(const State& a, const State& b) {
  const auto& x = a.bindings_;
  const auto& y = b.bindings_;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (auto c = x[i].first <=> y[i].first; c != 0) return c;
    if (auto c = x[i].second <=> y[i].second; c != 0) return c;
  }
  return x.size() <=> y.size();
}

std::size_t State::hash() const {
  std::atomic_ref<std::size_t> cached(hash_);
  if (std::size_t h = cached.load(std::memory_order_relaxed)) return h;
  std::size_t h = bindings_.size();
  for (const auto& [x, v] : bindings_) h = hash_combine(hash_combine(h, x.hash()), v.hash());
  if (h == 0) h = 1;
  cached.store(h, std::memory_order_relaxed);
  return h;
}

bool operator==(const State& a, const State& b) {
  if (a.bindings_.size() != b.bindings_.size()) return false;
  const std::size_t ha = std::atomic_ref<std::size_t>(a.hash_).load(std::memory_order_relaxed);
  const std::size_t hb = std::atomic_ref<std::size_t>(b.hash_).load(std::memory_order_relaxed);
  if (ha != 0 && hb != 0 && ha != hb) return false;
  return a.bindings_ == b.bindings_;
}

std::string to_string(const State& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, v] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += x.name();
    out += " = ";
    out += to_string(v);
  }
  out += "}";
  return out;
}

}  // namespace zar
