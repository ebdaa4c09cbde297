// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_VALUE_HPP
#define CQA_VALUE_HPP

#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>

#include "cqa/errors.hpp"

namespace cqa {

/// Arbitrary-precision integer, the carrier of the numeric domain.
/// Integers keep builtin comparisons total and exact.
using Int = boost::multiprecision::cpp_int;

enum class ValueType : std::uint8_t { Num = 0, Sym = 1 };

inline const char* to_string(ValueType t) {
  return t == ValueType::Num ? "num" : "sym";
}

/// A database constant: either an uninterpreted symbol or a number.
/// The two domains are disjoint; a Sym never equals a Num, and two Syms
/// are equal exactly when their names are identical.
class Value {
public:
  static Value sym(std::string name) { return Value(std::move(name)); }
  static Value num(Int n) { return Value(std::move(n)); }
  static Value num(long long n) { return Value(Int(n)); }

  ValueType type() const noexcept {
    return std::holds_alternative<Int>(v_) ? ValueType::Num : ValueType::Sym;
  }
  bool is_sym() const noexcept { return type() == ValueType::Sym; }
  bool is_num() const noexcept { return type() == ValueType::Num; }

  const std::string& sym_name() const { return std::get<std::string>(v_); }
  const Int& num_value() const { return std::get<Int>(v_); }

  bool operator==(const Value& o) const { return v_ == o.v_; }
  bool operator!=(const Value& o) const { return !(*this == o); }

  // Canonical total order: all numbers before all symbols, numbers by
  // value, symbols bytewise. Used for the canonical tuple order.
  bool operator<(const Value& o) const {
    if (type() != o.type()) return type() < o.type();
    if (is_num()) return num_value() < o.num_value();
    return sym_name() < o.sym_name();
  }
  bool operator<=(const Value& o) const { return !(o < *this); }
  bool operator>(const Value& o) const { return o < *this; }
  bool operator>=(const Value& o) const { return !(*this < o); }

  std::size_t hash() const {
    std::size_t seed = static_cast<std::size_t>(type());
    if (is_num()) {
      boost::hash_combine(seed, boost::hash<Int>()(num_value()));
    } else {
      boost::hash_combine(seed, std::hash<std::string>()(sym_name()));
    }
    return seed;
  }

  /// Unquoted display form ("Brown", "-42").
  std::string str() const {
    return is_num() ? num_value().str() : sym_name();
  }

private:
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(Int n) : v_(std::move(n)) {}

  std::variant<Int, std::string> v_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

inline std::ostream& operator<<(std::ostream& os, const Value& v) {
  return os << v.str();
}

/// True when the token spells an integer (optional leading '-', digits).
inline bool looks_numeric(const std::string& token) {
  std::size_t i = (token.size() > 1 && token[0] == '-') ? 1 : 0;
  if (i >= token.size()) return false;
  for (; i < token.size(); ++i)
    if (token[i] < '0' || token[i] > '9') return false;
  return true;
}

/// Bare-token typing rule: digit strings (with optional leading '-') are
/// numbers, everything else is a symbol. Quoting elsewhere forces Sym.
inline Value value_from_bare_token(const std::string& token) {
  if (looks_numeric(token)) return Value::num(Int(token));
  return Value::sym(token);
}

}  // namespace cqa

#endif  // CQA_VALUE_HPP
