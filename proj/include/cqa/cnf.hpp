// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_CNF_HPP
#define CQA_CNF_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/query.hpp"

namespace cqa {

/// A ground clause: a disjunction of relation literals over constant
/// tuples. Builtin literals are evaluated away during conversion, so
/// none remain here. Literal lists are sorted and duplicate-free.
struct GroundClause {
  std::vector<Tuple> positives;
  std::vector<Tuple> negatives;

  bool operator==(const GroundClause& o) const {
    return positives == o.positives && negatives == o.negatives;
  }
  bool operator<(const GroundClause& o) const {
    if (positives != o.positives) return positives < o.positives;
    return negatives < o.negatives;
  }
  bool empty() const { return positives.empty() && negatives.empty(); }
};

namespace detail {

// One ground literal during conversion: a signed relation atom or an
// already-evaluated builtin truth value.
struct CnfLiteral {
  std::optional<Tuple> atom;  // nullopt: builtin, see `truth`
  bool positive = true;
  bool truth = false;
};

using CnfClause = std::vector<CnfLiteral>;

inline Tuple ground_rel_tuple(const RelAtom& r) {
  std::vector<Value> vals;
  vals.reserve(r.terms.size());
  for (const Term& t : r.terms) {
    if (t.is_var())
      throw InvalidArgument("CNF conversion requires a ground sentence");
    vals.push_back(t.value());
  }
  return Tuple(std::move(vals));
}

// Negation normal form over ground atoms; quantifiers are rejected.
inline std::vector<CnfClause> to_clauses(const QueryPtr& q, bool positive) {
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    return {{CnfLiteral{ground_rel_tuple(*r), positive, false}}};
  }
  if (auto* b = std::get_if<BuiltinAtom>(&q->node)) {
    bool v = b->eval(Binding{});
    return {{CnfLiteral{std::nullopt, true, positive ? v : !v}}};
  }
  if (auto* n = std::get_if<Not>(&q->node))
    return to_clauses(n->body, !positive);
  if (auto* im = std::get_if<Implies>(&q->node)) {
    QueryPtr expanded = mk_or(mk_not(im->lhs), im->rhs);
    return to_clauses(expanded, positive);
  }
  bool conjunctive;
  QueryPtr lhs, rhs;
  if (auto* a = std::get_if<And>(&q->node)) {
    conjunctive = positive;
    lhs = a->lhs;
    rhs = a->rhs;
  } else if (auto* o = std::get_if<Or>(&q->node)) {
    conjunctive = !positive;
    lhs = o->lhs;
    rhs = o->rhs;
  } else {
    throw InvalidArgument("CNF conversion requires a quantifier-free query");
  }
  std::vector<CnfClause> left = to_clauses(lhs, positive);
  std::vector<CnfClause> right = to_clauses(rhs, positive);
  if (conjunctive) {
    left.insert(left.end(), right.begin(), right.end());
    return left;
  }
  // Disjunction: distribute over the two clause lists.
  std::vector<CnfClause> out;
  out.reserve(left.size() * right.size());
  for (const CnfClause& l : left)
    for (const CnfClause& r : right) {
      CnfClause merged = l;
      merged.insert(merged.end(), r.begin(), r.end());
      out.push_back(std::move(merged));
    }
  return out;
}

}  // namespace detail

/// Converts a ground quantifier-free sentence into an equivalent clause
/// list. Builtin literals are evaluated and dropped (a true one makes
/// its clause trivially true), tautological clauses are removed, and
/// duplicate literals and clauses are merged. An empty clause in the
/// output means the sentence is unsatisfiable; an empty clause list
/// means it is valid.
inline std::vector<GroundClause> to_cnf(const QueryPtr& q) {
  std::vector<GroundClause> out;
  for (const detail::CnfClause& raw : detail::to_clauses(q, true)) {
    GroundClause clause;
    bool trivially_true = false;
    for (const detail::CnfLiteral& lit : raw) {
      if (!lit.atom) {
        if (lit.truth) {
          trivially_true = true;
          break;
        }
        continue;  // false builtin disjunct: drop the literal
      }
      (lit.positive ? clause.positives : clause.negatives)
          .push_back(*lit.atom);
    }
    if (trivially_true) continue;
    auto dedupe = [](std::vector<Tuple>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(clause.positives);
    dedupe(clause.negatives);
    // R(t) | !R(t) is a tautology.
    bool tautology = false;
    for (const Tuple& t : clause.positives)
      if (std::binary_search(clause.negatives.begin(),
                             clause.negatives.end(), t)) {
        tautology = true;
        break;
      }
    if (tautology) continue;
    out.push_back(std::move(clause));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Clause list of the sentence's negation.
inline std::vector<GroundClause> to_cnf_negated(const QueryPtr& q) {
  return to_cnf(mk_not(q));
}

}  // namespace cqa

#endif  // CQA_CNF_HPP
