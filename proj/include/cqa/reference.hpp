// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_REFERENCE_HPP
#define CQA_REFERENCE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cqa/constraints.hpp"
#include "cqa/errors.hpp"
#include "cqa/model.hpp"
#include "cqa/query.hpp"

// Definition-level reference implementations, deliberately written
// without the library's join indexes, hypergraphs or search machinery.
// They exist to cross-check the real implementations in the test and
// selftest suites, so they stay naive: plain odometer loops over all
// substitutions and powerset scans over all subsets.

namespace cqa::reference {

/// Direct satisfaction check of one denial constraint: enumerate every
/// assignment of literals to tuples with an odometer and test it whole.
inline bool satisfies_denial(const Instance& instance,
                             const DenialConstraint& c) {
  const std::size_t m = c.literals.size();
  const std::size_t n = instance.size();
  if (n == 0) return true;
  std::vector<std::size_t> pick(m, 0);
  while (true) {
    // Build the substitution for this assignment, if consistent.
    Binding binding;
    bool consistent = true;
    for (std::size_t li = 0; li < m && consistent; ++li) {
      const Tuple& t = instance.tuples()[pick[li]];
      const auto& pattern = c.literals[li];
      for (std::size_t p = 0; p < pattern.size(); ++p) {
        const Term& term = pattern[p];
        if (term.is_const()) {
          if (!(term.value() == t.at(p))) {
            consistent = false;
            break;
          }
        } else {
          auto [it, inserted] = binding.emplace(term.var_name(), t.at(p));
          if (!inserted && !(it->second == t.at(p))) {
            consistent = false;
            break;
          }
        }
      }
    }
    if (consistent) {
      bool builtins_hold = true;
      for (const BuiltinAtom& b : c.builtins)
        if (!b.eval(binding)) {
          builtins_hold = false;
          break;
        }
      if (builtins_hold) return false;  // a violating substitution exists
    }
    // Odometer step.
    std::size_t i = 0;
    while (i < m && ++pick[i] == n) pick[i++] = 0;
    if (i == m) break;
  }
  return true;
}

inline bool satisfies_all(const Instance& instance, const ConstraintSet& cs) {
  for (const DenialConstraint& c : cs.denials())
    if (!satisfies_denial(instance, c)) return false;
  return true;
}

/// Textbook FD check: any two tuples agreeing on X agree on Y.
inline bool satisfies_fd_directly(const Instance& instance, const FD& fd) {
  const auto& tuples = instance.tuples();
  for (std::size_t i = 0; i < tuples.size(); ++i)
    for (std::size_t j = 0; j < tuples.size(); ++j) {
      bool agree_lhs = true;
      for (std::size_t a : fd.lhs)
        if (!(tuples[i].at(a) == tuples[j].at(a))) {
          agree_lhs = false;
          break;
        }
      if (!agree_lhs) continue;
      for (std::size_t a : fd.rhs)
        if (!(tuples[i].at(a) == tuples[j].at(a))) return false;
    }
  return true;
}

/// All repairs straight from the definition: consistent subsets maximal
/// among the consistent subsets. Exponential twice over; keep instances
/// at or below ~16 tuples.
inline std::vector<std::vector<std::size_t>> powerset_repairs(
    const Instance& instance, const ConstraintSet& cs) {
  const std::size_t n = instance.size();
  if (n > 20)
    throw BudgetError("powerset repair scan is limited to 20 tuples");
  std::vector<std::uint32_t> consistent_masks;
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n); ++mask) {
    std::vector<std::size_t> ids;
    for (std::size_t v = 0; v < n; ++v)
      if ((mask >> v) & 1) ids.push_back(v);
    if (satisfies_all(instance.restrict_to(ids), cs))
      consistent_masks.push_back(mask);
  }
  std::vector<std::vector<std::size_t>> repairs;
  for (std::uint32_t mask : consistent_masks) {
    bool maximal = true;
    for (std::uint32_t other : consistent_masks)
      if (other != mask && (other & mask) == mask) {
        maximal = false;
        break;
      }
    if (maximal) {
      std::vector<std::size_t> ids;
      for (std::size_t v = 0; v < n; ++v)
        if ((mask >> v) & 1) ids.push_back(v);
      repairs.push_back(std::move(ids));
    }
  }
  return repairs;
}

/// Evaluates a ground quantifier-free formula in an explicit world: a
/// relation atom holds iff its tuple is in the set.
inline bool eval_in_world(const QueryPtr& q, const std::set<Tuple>& world) {
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    std::vector<Value> vals;
    for (const Term& t : r->terms) {
      if (t.is_var())
        throw InvalidArgument("world evaluation needs a ground formula");
      vals.push_back(t.value());
    }
    return world.count(Tuple(std::move(vals))) > 0;
  }
  if (auto* b = std::get_if<BuiltinAtom>(&q->node)) return b->eval({});
  if (auto* n = std::get_if<Not>(&q->node))
    return !eval_in_world(n->body, world);
  if (auto* a = std::get_if<And>(&q->node))
    return eval_in_world(a->lhs, world) && eval_in_world(a->rhs, world);
  if (auto* o = std::get_if<Or>(&q->node))
    return eval_in_world(o->lhs, world) || eval_in_world(o->rhs, world);
  if (auto* im = std::get_if<Implies>(&q->node))
    return !eval_in_world(im->lhs, world) || eval_in_world(im->rhs, world);
  throw InvalidArgument("world evaluation needs a quantifier-free formula");
}

/// Ground relation atoms mentioned anywhere in a formula.
inline std::set<Tuple> mentioned_ground_atoms(const QueryPtr& q) {
  std::set<Tuple> out;
  detail::visit_atoms(
      q,
      [&](const RelAtom& r) {
        std::vector<Value> vals;
        for (const Term& t : r.terms) {
          if (t.is_var()) return;
          vals.push_back(t.value());
        }
        out.insert(Tuple(std::move(vals)));
      },
      [](const BuiltinAtom&) {});
  return out;
}

}  // namespace cqa::reference

#endif  // CQA_REFERENCE_HPP
