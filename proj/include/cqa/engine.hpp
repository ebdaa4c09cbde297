// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_ENGINE_HPP
#define CQA_ENGINE_HPP

#include <algorithm>
#include <chrono>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqa/cnf.hpp"
#include "cqa/constraints.hpp"
#include "cqa/errors.hpp"
#include "cqa/eval.hpp"
#include "cqa/hypergraph.hpp"
#include "cqa/oracle.hpp"
#include "cqa/query.hpp"
#include "cqa/rewrite.hpp"

namespace cqa {

// ---------------------------------------------------------------------------
// Quantifier-free engine (polynomial in the data)
//
// A ground sentence in CNF is true in every repair iff every clause is.
// A single ground clause C = R(s1)|..|R(sm) | !R(t1)|..|!R(tn) fails in
// some repair iff that repair contains all ti and none of the si. Such
// a repair exists iff
//   (a) every ti is in r,
//   (b) no tuple is both an si and a ti, and
//   (c) for the si present in r one can choose incident edges Ei whose
//       remaining vertices, together with the ti, contain no edge;
// the chosen Ei - {si} block si out of every maximal extension, and the
// absent si are in no repair anyway. The edge choice is a backtracking
// search of depth <= clause size, so the whole check is polynomial in
// the database for a fixed query.

/// Decides whether some repair falsifies the ground clause.
inline bool clause_refutable(const ConflictHypergraph& hg,
                             const GroundClause& clause) {
  const Instance& instance = hg.instance();
  std::vector<Tuple> negatives = clause.negatives;
  std::sort(negatives.begin(), negatives.end());

  // (a) the clause's negated tuples must all survive into the repair.
  std::vector<VertexId> base;
  for (const Tuple& t : negatives) {
    auto id = instance.index_of(t);
    if (!id) return false;
    base.push_back(*id);
  }

  // (b) a tuple required both in and out makes the negation unsatisfiable.
  for (const Tuple& t : clause.positives)
    if (std::binary_search(negatives.begin(), negatives.end(), t))
      return false;

  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  if (!hg.is_independent(base)) return false;

  // (c) pick one incident edge per positive tuple still in r.
  struct Target {
    VertexId vertex;
    std::vector<Edge> edges;
  };
  std::vector<Target> targets;
  for (const Tuple& t : clause.positives) {
    auto id = instance.index_of(t);
    if (!id) continue;  // not in r: no repair contains it
    std::vector<Edge> edges = hg.edges_containing(*id);
    if (edges.empty()) return false;  // isolated: in every repair
    targets.push_back(Target{*id, std::move(edges)});
  }
  std::sort(targets.begin(), targets.end(),
            [](const Target& a, const Target& b) {
              if (a.edges.size() != b.edges.size())
                return a.edges.size() < b.edges.size();
              return a.vertex < b.vertex;
            });

  std::function<bool(std::size_t, std::vector<VertexId>)> choose =
      [&](std::size_t depth, std::vector<VertexId> picked) -> bool {
    if (depth == targets.size()) return true;
    const Target& target = targets[depth];
    for (const Edge& e : target.edges) {
      std::vector<VertexId> next = picked;
      for (VertexId u : e)
        if (u != target.vertex) next.push_back(u);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      // Incremental fail-fast: the candidate set must stay edge-free.
      if (!hg.is_independent(next)) continue;
      if (choose(depth + 1, std::move(next))) return true;
    }
    return false;
  };
  return choose(0, base);
}

/// True iff the ground quantifier-free sentence (given as clauses) is
/// true in every repair. `threads` > 1 checks clauses in parallel.
inline bool qfree_clauses_consistent_true(
    const ConflictHypergraph& hg, const std::vector<GroundClause>& clauses,
    unsigned threads = 1) {
  if (threads <= 1 || clauses.size() <= 1) {
    for (const GroundClause& c : clauses)
      if (clause_refutable(hg, c)) return false;
    return true;
  }
  std::vector<std::future<bool>> futures;
  futures.reserve(clauses.size());
  for (const GroundClause& c : clauses)
    futures.push_back(std::async(std::launch::async, [&hg, &c] {
      return clause_refutable(hg, c);
    }));
  bool ok = true;
  for (auto& f : futures)
    if (f.get()) ok = false;
  return ok;
}

/// True iff the ground quantifier-free sentence is true in every repair.
inline bool qfree_consistent_true(const ConflictHypergraph& hg,
                                  const AnalyzedQuery& sentence,
                                  unsigned threads = 1) {
  if (sentence.fragment != Fragment::GroundQuantifierFree)
    throw InvalidArgument(
        "the quantifier-free engine needs a ground quantifier-free sentence");
  return qfree_clauses_consistent_true(hg, to_cnf(sentence.root), threads);
}

/// Tri-state verdict through the quantifier-free engine: the sentence's
/// negation is also quantifier-free, so "false in every repair" runs the
/// same check on it.
inline AnswerStatus qfree_status(const ConflictHypergraph& hg,
                                 const AnalyzedQuery& sentence,
                                 unsigned threads = 1) {
  if (qfree_consistent_true(hg, sentence, threads))
    return AnswerStatus::ConsistentlyTrue;
  if (qfree_clauses_consistent_true(hg, to_cnf_negated(sentence.root),
                                    threads))
    return AnswerStatus::ConsistentlyFalse;
  return AnswerStatus::Undetermined;
}

/// Consistent answers of an open quantifier-free query: typed
/// active-domain bindings whose grounding passes the clause check.
inline std::vector<Tuple> qfree_consistent_answers(
    const ConflictHypergraph& hg, const AnalyzedQuery& query,
    unsigned threads = 1) {
  if (query.fragment != Fragment::OpenQuantifierFree)
    throw InvalidArgument(
        "expected an open quantifier-free query with free variables");
  const Instance& instance = hg.instance();
  std::vector<std::vector<Value>> candidates =
      candidate_values(instance, query);
  std::vector<Tuple> answers;
  Binding binding;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == query.free.size()) {
      std::optional<AnalyzedQuery> grounded;
      try {
        grounded = ground(query, binding);
      } catch (const TypeError&) {
        return;
      }
      if (qfree_clauses_consistent_true(hg, to_cnf(grounded->root),
                                        threads)) {
        std::vector<Value> row;
        for (const std::string& var : query.free)
          row.push_back(binding.at(var));
        answers.emplace_back(std::move(row));
      }
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

// ---------------------------------------------------------------------------
// Strategy dispatcher

enum class Strategy { Auto, QFree, Rewrite, Oracle };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::QFree: return "qfree";
    case Strategy::Rewrite: return "rewrite";
    case Strategy::Oracle: return "oracle";
  }
  return "?";
}

enum class HgChoice { Auto, Materialized, Lazy };

struct EngineOptions {
  Strategy strategy = Strategy::Auto;
  HgChoice hypergraph = HgChoice::Auto;
  std::size_t edge_budget = ConflictHypergraph::kDefaultEdgeBudget;
  std::size_t node_budget = std::size_t(1) << 20;
  unsigned threads = 1;
};

struct EngineStats {
  Fragment fragment = Fragment::General;
  std::string strategy_used;
  std::string hypergraph_mode;
  double seconds = 0.0;
  std::optional<std::size_t> clause_count;
  std::optional<std::size_t> edge_count;      // materialized hypergraph
  std::optional<std::size_t> repair_count;    // oracle path
  std::optional<std::size_t> candidate_count; // open queries
};

/// Outcome of consistent query answering: a tri-state status for
/// sentences, an answer set for open queries, plus run metadata.
struct EngineResult {
  std::optional<AnswerStatus> status;
  std::optional<std::vector<Tuple>> answers;
  EngineStats stats;
};

namespace detail {

inline HgMode pick_hg_mode(HgChoice choice, const Instance& instance) {
  switch (choice) {
    case HgChoice::Materialized: return HgMode::Materialized;
    case HgChoice::Lazy: return HgMode::Lazy;
    case HgChoice::Auto:
      // Small instances materialize; large ones stay lazy so memory is
      // bounded by the instance and its position index.
      return instance.size() <= 5000 ? HgMode::Materialized : HgMode::Lazy;
  }
  return HgMode::Lazy;
}

}  // namespace detail

/// Answers a query with the requested strategy ("auto" routes ground and
/// open quantifier-free queries to the polynomial engine, single-literal
/// existential sentences under exactly one FD to the rewriting, and
/// everything else to the repair-enumeration oracle).
inline EngineResult cqa_answer(const Instance& instance,
                               const ConstraintSet& cs,
                               const AnalyzedQuery& query,
                               const EngineOptions& options = {}) {
  auto started = std::chrono::steady_clock::now();
  EngineResult result;
  result.stats.fragment = query.fragment;

  Strategy strategy = options.strategy;
  if (strategy == Strategy::Auto) {
    if (query.fragment == Fragment::GroundQuantifierFree ||
        query.fragment == Fragment::OpenQuantifierFree)
      strategy = Strategy::QFree;
    else if (query.fragment == Fragment::SingleLiteralExistential &&
             cs.single_fd())
      strategy = Strategy::Rewrite;
    else
      strategy = Strategy::Oracle;
  }
  result.stats.strategy_used = to_string(strategy);

  OracleOptions oracle_options{options.node_budget, options.edge_budget};
  switch (strategy) {
    case Strategy::QFree: {
      if (query.fragment != Fragment::GroundQuantifierFree &&
          query.fragment != Fragment::OpenQuantifierFree)
        throw InvalidArgument(
            std::string("strategy 'qfree' cannot handle a ") +
            to_string(query.fragment) + " query");
      HgMode mode = detail::pick_hg_mode(options.hypergraph, instance);
      ConflictHypergraph hg(instance, cs, mode, options.edge_budget);
      result.stats.hypergraph_mode =
          mode == HgMode::Materialized ? "materialized" : "lazy";
      if (mode == HgMode::Materialized)
        result.stats.edge_count = hg.edges().size();
      if (query.is_sentence()) {
        std::vector<GroundClause> clauses = to_cnf(query.root);
        result.stats.clause_count = clauses.size();
        if (qfree_clauses_consistent_true(hg, clauses, options.threads))
          result.status = AnswerStatus::ConsistentlyTrue;
        else if (qfree_clauses_consistent_true(
                     hg, to_cnf_negated(query.root), options.threads))
          result.status = AnswerStatus::ConsistentlyFalse;
        else
          result.status = AnswerStatus::Undetermined;
      } else {
        std::vector<std::vector<Value>> cand =
            candidate_values(instance, query);
        std::size_t total = 1;
        for (const auto& c : cand) total *= c.size();
        result.stats.candidate_count = total;
        result.answers = qfree_consistent_answers(hg, query, options.threads);
      }
      break;
    }
    case Strategy::Rewrite: {
      auto fd = cs.single_fd();
      if (!fd)
        throw InvalidArgument(
            "strategy 'rewrite' needs a constraint set with exactly one FD");
      if (query.fragment != Fragment::SingleLiteralExistential)
        throw InvalidArgument(
            std::string("strategy 'rewrite' cannot handle a ") +
            to_string(query.fragment) + " query");
      AnalyzedQuery rewritten =
          rewrite_single_fd(*fd, instance.schema(), *query.single_literal);
      if (eval_fo(instance, rewritten)) {
        result.status = AnswerStatus::ConsistentlyTrue;
      } else if (!eval_fo(instance, query)) {
        // A single FD yields no singleton edges, so every tuple lies in
        // some repair; a positive existential sentence false in r is
        // then false in every repair.
        result.status = AnswerStatus::ConsistentlyFalse;
      } else {
        result.status = AnswerStatus::Undetermined;
      }
      result.stats.hypergraph_mode = "none";
      break;
    }
    case Strategy::Oracle: {
      result.stats.hypergraph_mode = "materialized";
      OracleRunStats run;
      if (query.is_sentence()) {
        result.status = oracle_status(instance, cs, query, oracle_options,
                                      &run);
      } else {
        result.answers = oracle_answers(instance, cs, query, oracle_options,
                                        &run);
        std::vector<std::vector<Value>> cand =
            candidate_values(instance, query);
        std::size_t total = 1;
        for (const auto& c : cand) total *= c.size();
        result.stats.candidate_count = total;
      }
      result.stats.repair_count = run.repairs_seen;
      break;
    }
    case Strategy::Auto:
      break;  // resolved above
  }

  result.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();
  return result;
}

}  // namespace cqa

#endif  // CQA_ENGINE_HPP
