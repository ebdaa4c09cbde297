// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_TERM_HPP
#define CQA_TERM_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "cqa/errors.hpp"
#include "cqa/value.hpp"

namespace cqa {

/// A term is a variable (by name) or a constant.
class Term {
public:
  static Term var(std::string name) { return Term(Var{std::move(name)}); }
  static Term constant(Value v) { return Term(std::move(v)); }

  bool is_var() const { return std::holds_alternative<Var>(t_); }
  bool is_const() const { return !is_var(); }
  const std::string& var_name() const { return std::get<Var>(t_).name; }
  const Value& value() const { return std::get<Value>(t_); }

  bool operator==(const Term& o) const {
    if (is_var() != o.is_var()) return false;
    return is_var() ? var_name() == o.var_name() : value() == o.value();
  }

  std::string str() const {
    if (is_var()) return var_name();
    if (value().is_num()) return value().str();
    return "'" + value().sym_name() + "'";
  }

private:
  struct Var {
    std::string name;
  };
  explicit Term(Var v) : t_(std::move(v)) {}
  explicit Term(Value v) : t_(std::move(v)) {}
  std::variant<Var, Value> t_;
};

using Binding = std::map<std::string, Value>;

/// Term under a binding; nullopt when the term is an unbound variable.
inline std::optional<Value> resolve(const Term& t, const Binding& binding) {
  if (t.is_const()) return t.value();
  auto it = binding.find(t.var_name());
  if (it == binding.end()) return std::nullopt;
  return it->second;
}

enum class BuiltinOp { Eq, Ne, Lt, Gt, Le, Ge };

inline const char* to_string(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::Eq: return "=";
    case BuiltinOp::Ne: return "!=";
    case BuiltinOp::Lt: return "<";
    case BuiltinOp::Gt: return ">";
    case BuiltinOp::Le: return "<=";
    case BuiltinOp::Ge: return ">=";
  }
  return "?";
}

inline bool is_order_op(BuiltinOp op) {
  return op != BuiltinOp::Eq && op != BuiltinOp::Ne;
}

inline BuiltinOp negate(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::Eq: return BuiltinOp::Ne;
    case BuiltinOp::Ne: return BuiltinOp::Eq;
    case BuiltinOp::Lt: return BuiltinOp::Ge;
    case BuiltinOp::Gt: return BuiltinOp::Le;
    case BuiltinOp::Le: return BuiltinOp::Gt;
    case BuiltinOp::Ge: return BuiltinOp::Lt;
  }
  return op;
}

/// Comparison of two same-typed constants. Order comparisons are only
/// defined on numbers.
inline bool eval_builtin(BuiltinOp op, const Value& lhs, const Value& rhs) {
  if (lhs.type() != rhs.type())
    throw TypeError("builtin compares a sym with a num");
  if (is_order_op(op) && lhs.is_sym())
    throw TypeError(std::string("order comparison '") + to_string(op) +
                    "' applied to symbols");
  switch (op) {
    case BuiltinOp::Eq: return lhs == rhs;
    case BuiltinOp::Ne: return lhs != rhs;
    case BuiltinOp::Lt: return lhs.num_value() < rhs.num_value();
    case BuiltinOp::Gt: return lhs.num_value() > rhs.num_value();
    case BuiltinOp::Le: return lhs.num_value() <= rhs.num_value();
    case BuiltinOp::Ge: return lhs.num_value() >= rhs.num_value();
  }
  return false;
}

/// An atomic comparison between two terms.
struct BuiltinAtom {
  BuiltinOp op;
  Term lhs;
  Term rhs;

  bool operator==(const BuiltinAtom& o) const {
    return op == o.op && lhs == o.lhs && rhs == o.rhs;
  }

  /// Evaluates under a binding; nullopt while either side is unbound.
  std::optional<bool> try_eval(const Binding& binding) const {
    auto l = resolve(lhs, binding);
    auto r = resolve(rhs, binding);
    if (!l || !r) return std::nullopt;
    return eval_builtin(op, *l, *r);
  }

  bool eval(const Binding& binding) const {
    auto res = try_eval(binding);
    if (!res)
      throw InvalidArgument("builtin atom " + str() +
                            " has an unbound variable");
    return *res;
  }

  std::string str() const {
    return lhs.str() + " " + to_string(op) + " " + rhs.str();
  }
};

}  // namespace cqa

#endif  // CQA_TERM_HPP
