// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_EVAL_HPP
#define CQA_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/model.hpp"
#include "cqa/query.hpp"

namespace cqa {

namespace detail {

/// Tarskian evaluation with quantifiers ranging over the instance's
/// active domain, restricted to a variable's inferred type when known.
class Evaluator {
public:
  Evaluator(const Instance& instance,
            const std::map<std::string, std::optional<ValueType>>& var_types)
      : instance_(instance), var_types_(var_types) {
    for (const Value& v : active_domain(instance)) {
      domain_.push_back(v);
      (v.is_num() ? nums_ : syms_).push_back(v);
    }
  }

  bool eval(const QueryPtr& q, Binding& binding) const {
    if (auto* r = std::get_if<RelAtom>(&q->node)) {
      std::vector<Value> vals;
      vals.reserve(r->terms.size());
      for (const Term& t : r->terms) {
        auto v = resolve(t, binding);
        if (!v)
          throw InvalidArgument("unbound variable '" + t.var_name() +
                                "' in relation atom");
        vals.push_back(*v);
      }
      return instance_.contains(Tuple(std::move(vals)));
    }
    if (auto* b = std::get_if<BuiltinAtom>(&q->node)) {
      auto v = b->try_eval(binding);
      if (!v)
        throw InvalidArgument("unbound variable in builtin atom " + b->str());
      return *v;
    }
    if (auto* n = std::get_if<Not>(&q->node)) return !eval(n->body, binding);
    if (auto* a = std::get_if<And>(&q->node))
      return eval(a->lhs, binding) && eval(a->rhs, binding);
    if (auto* o = std::get_if<Or>(&q->node))
      return eval(o->lhs, binding) || eval(o->rhs, binding);
    if (auto* im = std::get_if<Implies>(&q->node))
      return !eval(im->lhs, binding) || eval(im->rhs, binding);
    if (auto* e = std::get_if<Exists>(&q->node))
      return quantify(e->vars, 0, e->body, binding, /*exists=*/true);
    const auto& f = std::get<Forall>(q->node);
    return quantify(f.vars, 0, f.body, binding, /*exists=*/false);
  }

private:
  const std::vector<Value>& range_of(const std::string& var) const {
    auto it = var_types_.find(var);
    if (it != var_types_.end() && it->second)
      return *it->second == ValueType::Num ? nums_ : syms_;
    return domain_;
  }

  bool quantify(const std::vector<std::string>& vars, std::size_t i,
                const QueryPtr& body, Binding& binding, bool exists) const {
    if (i == vars.size()) return eval(body, binding);
    for (const Value& v : range_of(vars[i])) {
      binding.insert_or_assign(vars[i], v);
      bool r = quantify(vars, i + 1, body, binding, exists);
      binding.erase(vars[i]);
      if (r == exists) return exists;
    }
    return !exists;
  }

  const Instance& instance_;
  const std::map<std::string, std::optional<ValueType>>& var_types_;
  std::vector<Value> domain_, nums_, syms_;
};

}  // namespace detail

/// Evaluates a query in a single instance under the given binding of its
/// free variables (the "one world" semantics; no repairs involved).
inline bool eval_fo(const Instance& instance, const AnalyzedQuery& q,
                    const Binding& binding = {}) {
  for (const std::string& v : q.free)
    if (!binding.count(v))
      throw InvalidArgument("no binding for free variable '" + v + "'");
  detail::Evaluator ev(instance, q.var_types);
  Binding scratch = binding;
  return ev.eval(q.root, scratch);
}

}  // namespace cqa

#endif  // CQA_EVAL_HPP
