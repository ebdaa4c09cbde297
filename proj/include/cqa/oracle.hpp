// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_ORACLE_HPP
#define CQA_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/eval.hpp"
#include "cqa/hypergraph.hpp"
#include "cqa/query.hpp"

// Exponential-time ground truth. Everything here is exact or raises
// BudgetError; there is no sampling and no silent truncation.

namespace cqa {

/// Tri-state verdict of consistent query answering for sentences.
enum class AnswerStatus { ConsistentlyTrue, ConsistentlyFalse, Undetermined };

inline const char* to_string(AnswerStatus s) {
  switch (s) {
    case AnswerStatus::ConsistentlyTrue: return "consistently-true";
    case AnswerStatus::ConsistentlyFalse: return "consistently-false";
    case AnswerStatus::Undetermined: return "undetermined";
  }
  return "?";
}

struct OracleOptions {
  std::size_t node_budget = std::size_t(1) << 20;  // visited search nodes
  std::size_t edge_budget = ConflictHypergraph::kDefaultEdgeBudget;
};

/// Optional run metadata reported by the oracle entry points.
struct OracleRunStats {
  std::size_t repairs_seen = 0;
};

/// Evaluates a formula containing only builtin atoms and connectives.
inline bool eval_builtin_only(const QueryPtr& q, const Binding& binding) {
  if (std::get_if<RelAtom>(&q->node))
    throw InvalidArgument("expected a builtin-only formula");
  if (auto* b = std::get_if<BuiltinAtom>(&q->node)) return b->eval(binding);
  if (auto* n = std::get_if<Not>(&q->node))
    return !eval_builtin_only(n->body, binding);
  if (auto* a = std::get_if<And>(&q->node))
    return eval_builtin_only(a->lhs, binding) &&
           eval_builtin_only(a->rhs, binding);
  if (auto* o = std::get_if<Or>(&q->node))
    return eval_builtin_only(o->lhs, binding) ||
           eval_builtin_only(o->rhs, binding);
  if (auto* im = std::get_if<Implies>(&q->node))
    return !eval_builtin_only(im->lhs, binding) ||
           eval_builtin_only(im->rhs, binding);
  throw InvalidArgument("expected a quantifier-free builtin-only formula");
}

namespace detail {

/// Backtracking enumeration of the maximal independent sets of a
/// materialized conflict hypergraph. Vertices are decided in canonical
/// order with an include/exclude branch; a leaf is emitted when every
/// excluded vertex is blocked (adding it back would complete an edge).
/// Each maximal independent set is visited exactly once.
///
/// Two propagation rules keep the tree small without losing leaves:
/// an excluded vertex whose blocking edges are all dead (another member
/// excluded) prunes the branch, and one with a single live blocking edge
/// forces that edge's undecided members in.
///
/// `pre_excluded` vertices are forced out up front; they still must end
/// up blocked, so the enumeration yields exactly the maximal independent
/// sets (w.r.t. the full vertex set) that avoid them.
class RepairSearch {
public:
  RepairSearch(const ConflictHypergraph& hg, std::size_t node_budget)
      : hg_(hg), node_budget_(node_budget) {
    if (hg.mode() != HgMode::Materialized)
      throw InvalidArgument(
          "repair enumeration requires a materialized hypergraph");
    status_.assign(hg.vertex_count(), St::Undecided);
  }

  void pre_exclude(const std::vector<VertexId>& vs) {
    for (VertexId v : vs) status_.at(v) = St::Out;
  }

  /// Runs the search; the sink returns false to stop early. Returns
  /// false when the sink stopped the enumeration.
  bool run(const std::function<bool(const Repair&)>& sink) {
    std::vector<VertexId> trail;
    if (!propagate(trail)) return true;
    bool keep_going = descend(sink);
    undo(trail);
    return keep_going;
  }

  std::size_t nodes_visited() const { return nodes_; }

private:
  enum class St : std::uint8_t { Undecided, In, Out };

  bool descend(const std::function<bool(const Repair&)>& sink) {
    if (++nodes_ > node_budget_)
      throw BudgetError("repair search exceeded its node budget of " +
                        std::to_string(node_budget_) + " nodes");
    std::optional<VertexId> v = pick_branch_vertex();
    if (!v) {
      // Propagation keeps every excluded vertex blockable, and with all
      // vertices decided blockable means blocked, so this is a leaf.
      Repair r;
      for (VertexId u = 0; u < status_.size(); ++u)
        if (status_[u] == St::In) r.vertex_ids.push_back(u);
      return sink(r);
    }
    if (can_include(*v)) {
      status_[*v] = St::In;
      if (!descend(sink)) {
        status_[*v] = St::Undecided;
        return false;
      }
      status_[*v] = St::Undecided;
    }
    status_[*v] = St::Out;
    std::vector<VertexId> trail;
    if (propagate_from_exclusion(*v, trail)) {
      if (!descend(sink)) {
        undo(trail);
        status_[*v] = St::Undecided;
        return false;
      }
    }
    undo(trail);
    status_[*v] = St::Undecided;
    return true;
  }

  // Fail-first branch choice: an undecided member of a live blocking
  // edge of the excluded vertex with the fewest live edges. Deciding
  // such vertices either blocks that vertex or kills one of its few
  // options, so contradictions surface early. Falls back to canonical
  // order when no excluded vertex involves an undecided one.
  std::optional<VertexId> pick_branch_vertex() const {
    std::optional<VertexId> best;
    std::size_t best_lives = 0;
    for (VertexId u = 0; u < status_.size(); ++u) {
      if (status_[u] != St::Out) continue;
      std::size_t lives = 0;
      VertexId candidate = 0;
      bool has_candidate = false;
      for (std::size_t e : hg_.incident_edge_ids(u)) {
        bool alive = true;
        for (VertexId w : hg_.edges()[e])
          if (w != u && status_[w] == St::Out) {
            alive = false;
            break;
          }
        if (!alive) continue;
        ++lives;
        if (!has_candidate)
          for (VertexId w : hg_.edges()[e])
            if (w != u && status_[w] == St::Undecided) {
              candidate = w;
              has_candidate = true;
              break;
            }
      }
      if (has_candidate && (!best || lives < best_lives)) {
        best = candidate;
        best_lives = lives;
        if (best_lives <= 2) break;  // cannot get more constrained
      }
    }
    if (best) return best;
    for (VertexId v = 0; v < status_.size(); ++v)
      if (status_[v] == St::Undecided) return v;
    return std::nullopt;
  }

  void undo(const std::vector<VertexId>& trail) {
    for (VertexId w : trail) status_[w] = St::Undecided;
  }

  // No edge through v has all of its other members already included.
  bool can_include(VertexId v) const {
    for (std::size_t e : hg_.incident_edge_ids(v)) {
      bool others_in = true;
      for (VertexId u : hg_.edges()[e])
        if (u != v && status_[u] != St::In) {
          others_in = false;
          break;
        }
      if (others_in) return false;
    }
    return true;
  }

  // The unique live blocking edge of an excluded vertex, if any: an
  // incident edge none of whose other members is excluded. Returns
  // {dead, forced}: `dead` when no live edge remains (prune), `forced`
  // as the edge id to force when exactly one remains.
  struct LiveScan {
    bool dead = false;
    std::optional<std::size_t> forced;
  };
  LiveScan scan_excluded(VertexId v) const {
    LiveScan result;
    std::size_t live = 0;
    for (std::size_t e : hg_.incident_edge_ids(v)) {
      bool alive = true;
      for (VertexId u : hg_.edges()[e])
        if (u != v && status_[u] == St::Out) {
          alive = false;
          break;
        }
      if (alive) {
        if (++live > 1) {
          result.forced.reset();  // more than one option: nothing to do
          return result;
        }
        result.forced = e;
      }
    }
    if (live == 0) {
      result.dead = true;
      result.forced.reset();
    } else {
      // Exactly one live edge: keep `forced` unless it is already
      // fully included (then v is blocked and nothing needs forcing).
      bool needs_force = false;
      for (VertexId u : hg_.edges()[*result.forced])
        if (u != v && status_[u] == St::Undecided) needs_force = true;
      if (!needs_force) result.forced.reset();
    }
    return result;
  }

  // Re-establishes the invariant that every excluded vertex has a live
  // blocking edge, forcing single-option members in. Returns false on
  // contradiction; `trail` collects the forced inclusions.
  bool propagate(std::vector<VertexId>& trail) {
    std::vector<VertexId> worklist;
    for (VertexId v = 0; v < status_.size(); ++v)
      if (status_[v] == St::Out) worklist.push_back(v);
    return settle(std::move(worklist), trail);
  }

  bool propagate_from_exclusion(VertexId v, std::vector<VertexId>& trail) {
    // Only v and excluded vertices sharing an edge with v are affected.
    std::vector<VertexId> worklist{v};
    for (std::size_t e : hg_.incident_edge_ids(v))
      for (VertexId u : hg_.edges()[e])
        if (u != v && status_[u] == St::Out) worklist.push_back(u);
    return settle(std::move(worklist), trail);
  }

  bool settle(std::vector<VertexId> worklist, std::vector<VertexId>& trail) {
    while (!worklist.empty()) {
      VertexId v = worklist.back();
      worklist.pop_back();
      if (status_[v] != St::Out) continue;
      LiveScan scan = scan_excluded(v);
      if (scan.dead) return false;
      if (!scan.forced) continue;
      for (VertexId w : hg_.edges()[*scan.forced]) {
        if (w == v || status_[w] != St::Undecided) continue;
        // w must be included to block v; if that would complete an
        // edge, no completion of this branch exists.
        if (!can_include(w)) return false;
        status_[w] = St::In;
        trail.push_back(w);
      }
      // Inclusions never change another excluded vertex's live edges,
      // so no rescan is needed here.
    }
    return true;
  }

  const ConflictHypergraph& hg_;
  std::size_t node_budget_;
  std::size_t nodes_ = 0;
  std::vector<St> status_;
};

}  // namespace detail

/// Streams every repair (maximal independent set) exactly once, in the
/// deterministic include-first order. The sink returns false to stop.
inline void enumerate_repairs(const ConflictHypergraph& hg,
                              const std::function<bool(const Repair&)>& sink,
                              const OracleOptions& options = {}) {
  detail::RepairSearch search(hg, options.node_budget);
  search.run(sink);
}

/// All repairs, materialized into a vector.
inline std::vector<Repair> all_repairs(const ConflictHypergraph& hg,
                                       const OracleOptions& options = {}) {
  std::vector<Repair> out;
  enumerate_repairs(hg, [&](const Repair& r) {
    out.push_back(r);
    return true;
  }, options);
  return out;
}

/// Exact repair count as a product over connected components of the
/// hypergraph; exponentially many repairs are countable as long as each
/// component stays within the node budget.
inline Int count_repairs(const ConflictHypergraph& hg,
                         const OracleOptions& options = {}) {
  Int total = 1;
  for (const std::vector<VertexId>& comp : hg.components()) {
    // Collect the component's edges in local vertex numbering.
    std::map<VertexId, std::size_t> local;
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = i;
    std::vector<std::vector<std::size_t>> local_edges;
    std::vector<std::size_t> seen_edge_ids;
    for (VertexId v : comp)
      for (std::size_t e : hg.incident_edge_ids(v)) seen_edge_ids.push_back(e);
    std::sort(seen_edge_ids.begin(), seen_edge_ids.end());
    seen_edge_ids.erase(
        std::unique(seen_edge_ids.begin(), seen_edge_ids.end()),
        seen_edge_ids.end());
    for (std::size_t e : seen_edge_ids) {
      std::vector<std::size_t> le;
      for (VertexId u : hg.edges()[e]) le.push_back(local.at(u));
      std::sort(le.begin(), le.end());
      local_edges.push_back(std::move(le));
    }
    // Count maximal independent sets of the component by the same
    // include/exclude search, locally.
    std::size_t nodes = 0;
    std::vector<std::uint8_t> st(comp.size(), 0);  // 0 undecided 1 in 2 out
    std::vector<std::vector<std::size_t>> inc(comp.size());
    for (std::size_t e = 0; e < local_edges.size(); ++e)
      for (std::size_t u : local_edges[e]) inc[u].push_back(e);
    Int count = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t v) {
      if (++nodes > options.node_budget)
        throw BudgetError("repair counting exceeded its node budget of " +
                          std::to_string(options.node_budget) + " nodes");
      if (v == comp.size()) {
        for (std::size_t u = 0; u < comp.size(); ++u) {
          if (st[u] != 2) continue;
          bool blocked = false;
          for (std::size_t e : inc[u]) {
            bool others_in = true;
            for (std::size_t w : local_edges[e])
              if (w != u && st[w] != 1) {
                others_in = false;
                break;
              }
            if (others_in) {
              blocked = true;
              break;
            }
          }
          if (!blocked) return;
        }
        ++count;
        return;
      }
      bool includable = true;
      for (std::size_t e : inc[v]) {
        bool others_in = true;
        for (std::size_t w : local_edges[e])
          if (w != v && st[w] != 1) {
            others_in = false;
            break;
          }
        if (others_in) {
          includable = false;
          break;
        }
      }
      if (includable) {
        st[v] = 1;
        rec(v + 1);
      }
      st[v] = 2;
      rec(v + 1);
      st[v] = 0;
    };
    rec(0);
    total *= count;
  }
  return total;
}

/// True iff some repair falsifies the closed sentence. Single positive
/// existential literals get a specialized exact search (find a maximal
/// independent set avoiding every tuple matching the literal); other
/// sentences fall back to exhaustive repair enumeration with
/// short-circuiting.
inline bool exists_falsifying_repair(const Instance& instance,
                                     const ConstraintSet& cs,
                                     const AnalyzedQuery& sentence,
                                     const OracleOptions& options = {}) {
  if (!sentence.is_sentence())
    throw InvalidArgument("falsifying-repair search needs a closed sentence");
  ConflictHypergraph hg(instance, cs, HgMode::Materialized,
                        options.edge_budget);
  if (sentence.fragment == Fragment::SingleLiteralExistential) {
    const SingleLiteralShape& shape = *sentence.single_literal;
    // Tuples whose presence alone makes the sentence true.
    std::vector<VertexId> matching;
    for (VertexId v = 0; v < instance.size(); ++v) {
      const Tuple& t = instance.tuples()[v];
      if (!shape.phi) {
        matching.push_back(v);
        continue;
      }
      Binding b;
      for (std::size_t p = 0; p < shape.tuple_vars.size(); ++p)
        b.emplace(shape.tuple_vars[p], t.at(p));
      if (eval_builtin_only(shape.phi, b)) matching.push_back(v);
    }
    detail::RepairSearch search(hg, options.node_budget);
    search.pre_exclude(matching);
    bool found = false;
    search.run([&](const Repair&) {
      found = true;
      return false;
    });
    return found;
  }
  bool found = false;
  enumerate_repairs(hg, [&](const Repair& r) {
    if (!eval_fo(r.materialize(instance), sentence)) {
      found = true;
      return false;
    }
    return true;
  }, options);
  return found;
}

/// Folds the sentence's truth value over every repair.
inline AnswerStatus oracle_status(const Instance& instance,
                                  const ConstraintSet& cs,
                                  const AnalyzedQuery& sentence,
                                  const OracleOptions& options = {},
                                  OracleRunStats* stats = nullptr) {
  if (!sentence.is_sentence())
    throw InvalidArgument("oracle_status needs a closed sentence");
  ConflictHypergraph hg(instance, cs, HgMode::Materialized,
                        options.edge_budget);
  bool seen_true = false, seen_false = false;
  enumerate_repairs(hg, [&](const Repair& r) {
    if (stats) ++stats->repairs_seen;
    (eval_fo(r.materialize(instance), sentence) ? seen_true : seen_false) =
        true;
    return !(seen_true && seen_false);
  }, options);
  if (seen_true && !seen_false) return AnswerStatus::ConsistentlyTrue;
  if (seen_false && !seen_true) return AnswerStatus::ConsistentlyFalse;
  return AnswerStatus::Undetermined;
}

/// Typed active-domain candidates for the query's free variables, in
/// canonical order per variable.
inline std::vector<std::vector<Value>> candidate_values(
    const Instance& instance, const AnalyzedQuery& query) {
  std::vector<std::vector<Value>> out;
  std::vector<Value> full;
  for (const Value& v : active_domain(instance)) full.push_back(v);
  for (const std::string& var : query.free) {
    auto it = query.var_types.find(var);
    if (it != query.var_types.end() && it->second)
      out.push_back(active_domain_of_type(instance, *it->second));
    else
      out.push_back(full);
  }
  return out;
}

/// Brute-force consistent answers of an open query: every binding of
/// active-domain values (typed per variable) whose grounding is true in
/// all repairs. Answer rows follow the free-variable order.
inline std::vector<Tuple> oracle_answers(const Instance& instance,
                                         const ConstraintSet& cs,
                                         const AnalyzedQuery& query,
                                         const OracleOptions& options = {},
                                         OracleRunStats* stats = nullptr) {
  if (query.is_sentence())
    throw InvalidArgument("oracle_answers needs at least one free variable");
  ConflictHypergraph hg(instance, cs, HgMode::Materialized,
                        options.edge_budget);
  std::vector<Instance> repair_instances;
  enumerate_repairs(hg, [&](const Repair& r) {
    repair_instances.push_back(r.materialize(instance));
    return true;
  }, options);
  if (stats) stats->repairs_seen = repair_instances.size();

  std::vector<std::vector<Value>> candidates =
      candidate_values(instance, query);
  std::vector<Tuple> answers;
  std::vector<std::size_t> pick(query.free.size(), 0);
  Binding binding;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == query.free.size()) {
      std::optional<AnalyzedQuery> grounded;
      try {
        grounded = ground(query, binding);
      } catch (const TypeError&) {
        return;  // ill-typed candidate for an untyped variable
      }
      for (const Instance& ri : repair_instances)
        if (!eval_fo(ri, *grounded)) return;
      std::vector<Value> row;
      for (const std::string& var : query.free) row.push_back(binding.at(var));
      answers.emplace_back(std::move(row));
      return;
    }
    for (const Value& v : candidates[i]) {
      binding.insert_or_assign(query.free[i], v);
      walk(i + 1);
      binding.erase(query.free[i]);
    }
  };
  walk(0);
  std::sort(answers.begin(), answers.end());
  return answers;
}

}  // namespace cqa

#endif  // CQA_ORACLE_HPP
