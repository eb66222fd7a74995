#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <set>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace zar {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational make_rational(const Integer& num, const Integer& den);
std::string to_string(const Integer& n);
// Renders as "n" when the denominator is one, otherwise "n/d".
std::string to_string(const Rational& q);
double to_double(const Rational& q);
inline bool is_one_half(const Rational& q) {
  return boost::multiprecision::numerator(q) == 1 && boost::multiprecision::denominator(q) == 2;
}
// 0 <= q <= 1 without building temporaries.
inline bool in_unit_interval(const Rational& q) {
  const auto& n = boost::multiprecision::numerator(q);
  return n.sign() >= 0 && n <= boost::multiprecision::denominator(q);
}
std::size_t hash_value(const Integer& n);

/// Interned identifier. Equality is pointer identity; ordering is by name so
/// that anything sorted by symbol prints deterministically.
class Symbol {
 public:
  Symbol() : Symbol(std::string_view{}) {}
  explicit Symbol(std::string_view name);

  const std::string& name() const noexcept { return *name_; }
  bool empty() const noexcept { return name_->empty(); }
  // Reserved identifiers (leading "__") never appear in user programs.
  bool reserved() const noexcept { return name_->rfind("__", 0) == 0; }

  friend bool operator==(Symbol a, Symbol b) noexcept { return a.name_ == b.name_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) noexcept {
    if (a.name_ == b.name_) return std::strong_ordering::equal;
    return *a.name_ <=> *b.name_;
  }

  std::size_t hash() const noexcept { return std::hash<const void*>{}(name_); }

 private:
  const std::string* name_;
};

using VarSet = std::set<Symbol>;

class Value {
 public:
  enum class Kind { kBool, kInt, kRat };

  Value() : v_(Integer(0)) {}
  static Value boolean(bool b) { return Value(Repr(b)); }
  static Value integer(Integer n) { return Value(Repr(std::move(n))); }
  static Value integer(long long n) { return Value(Repr(Integer(n))); }
  static Value rational(Rational q) { return Value(Repr(std::move(q))); }

  Kind kind() const noexcept { return static_cast<Kind>(v_.index()); }
  bool is_bool() const noexcept { return kind() == Kind::kBool; }
  bool is_int() const noexcept { return kind() == Kind::kInt; }
  bool is_rat() const noexcept { return kind() == Kind::kRat; }
  bool is_numeric() const noexcept { return !is_bool(); }

  bool as_bool() const { return std::get<bool>(v_); }
  const Integer& as_int() const { return std::get<Integer>(v_); }
  const Rational& as_rat() const { return std::get<Rational>(v_); }
  // Numeric view; Int n becomes n/1. Throws TypeError on Bool.
  Rational to_rational() const;

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  std::size_t hash() const;

 private:
  using Repr = std::variant<bool, Integer, Rational>;
  explicit Value(Repr r) : v_(std::move(r)) {}
  Repr v_;
};

std::string_view to_string(Value::Kind kind);
std::string to_string(const Value& v);

/// Program state: a finite map from identifiers to values, kept sorted by
/// symbol name. Updates return a new state.
class State {
 public:
  using Binding = std::pair<Symbol, Value>;

  State() = default;
  State(std::initializer_list<Binding> bindings);

  // Unbound identifiers read as Int(0).
  const Value& lookup(Symbol x) const;
  const Value* find(Symbol x) const;
  bool contains(Symbol x) const { return find(x) != nullptr; }
  State update(Symbol x, Value v) const;
  void set(Symbol x, Value v);
  // The bindings of variables in `keep`.
  State restrict(const VarSet& keep) const;

  const std::vector<Binding>& bindings() const noexcept { return bindings_; }
  std::size_t size() const noexcept { return bindings_.size(); }
  bool empty() const noexcept { return bindings_.empty(); }

  friend bool operator==(const State& a, const State& b);
  friend std::strong_ordering operator<=>(const State& a, const State& b);

  // Computed once per state; safe to call concurrently.
  std::size_t hash() const;

 private:
  std::vector<Binding> bindings_;
  mutable std::size_t hash_ = 0;  // 0 until computed
};

std::string to_string(const State& s);

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

inline std::size_t hash_combine(std::size_t seed, std::size_t h) {
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace zar

template <>
struct std::hash<zar::Symbol> {
  std::size_t operator()(zar::Symbol s) const noexcept { return s.hash(); }
};
