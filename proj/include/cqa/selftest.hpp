// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_SELFTEST_HPP
#define CQA_SELFTEST_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cqa/cnf.hpp"
#include "cqa/csv.hpp"
#include "cqa/engine.hpp"
#include "cqa/oracle.hpp"
#include "cqa/reductions.hpp"
#include "cqa/reference.hpp"
#include "cqa/rewrite.hpp"

// Randomized differential suites: the fast engines against the
// exhaustive references, and the hardness generators against their
// brute-force verifiers. Deterministic for a fixed seed.

namespace cqa::selftest {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double seconds = 0.0;
  std::vector<std::string> failure_details;  // capped

  bool passed() const { return failures == 0; }
};

namespace detail {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return rng() % n; }

inline Schema suite_schema() {
  return Schema("R", {{"A", ValueType::Sym},
                      {"B", ValueType::Sym},
                      {"C", ValueType::Num}});
}

inline Value random_value(Rng& rng, ValueType type) {
  static const char* syms[] = {"a", "b", "c", "d"};
  if (type == ValueType::Sym) return Value::sym(syms[pick(rng, 4)]);
  return Value::num(static_cast<long long>(pick(rng, 4)));
}

inline Instance random_instance(Rng& rng, std::size_t max_tuples) {
  Schema schema = suite_schema();
  std::vector<Tuple> tuples;
  std::size_t n = pick(rng, max_tuples + 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Value> vals;
    for (std::size_t p = 0; p < schema.arity(); ++p)
      vals.push_back(random_value(rng, schema.type_of(p)));
    tuples.emplace_back(std::move(vals));
  }
  return Instance(schema, std::move(tuples));
}

// A random denial constraint with up to `max_literals` literals, typed
// variables and random builtin atoms; safe by construction.
inline DenialConstraint random_denial(Rng& rng, const Schema& schema,
                                      std::size_t max_literals) {
  DenialConstraint c;
  std::size_t literal_count = 1 + pick(rng, max_literals);
  std::vector<std::string> sym_vars, num_vars;
  auto var_pool = [&](ValueType t) -> std::vector<std::string>& {
    return t == ValueType::Sym ? sym_vars : num_vars;
  };
  for (std::size_t li = 0; li < literal_count; ++li) {
    std::vector<Term> lit;
    for (std::size_t p = 0; p < schema.arity(); ++p) {
      ValueType t = schema.type_of(p);
      auto& pool = var_pool(t);
      std::size_t roll = pick(rng, 10);
      if (roll < 6 && !pool.empty()) {
        lit.push_back(Term::var(pool[pick(rng, pool.size())]));
      } else if (roll < 9 || pool.size() >= 6) {
        std::string name = (t == ValueType::Sym ? "s" : "n") +
                           std::to_string(pool.size() + 1);
        pool.push_back(name);
        lit.push_back(Term::var(name));
      } else {
        lit.push_back(Term::constant(random_value(rng, t)));
      }
    }
    c.literals.push_back(std::move(lit));
  }
  std::size_t builtin_count = pick(rng, 3);
  for (std::size_t i = 0; i < builtin_count; ++i) {
    bool numeric = !num_vars.empty() && (sym_vars.empty() || rng() % 2);
    auto& pool = numeric ? num_vars : sym_vars;
    if (pool.empty()) break;
    ValueType t = numeric ? ValueType::Num : ValueType::Sym;
    Term lhs = Term::var(pool[pick(rng, pool.size())]);
    Term rhs = (pick(rng, 3) == 0)
                   ? Term::constant(random_value(rng, t))
                   : Term::var(pool[pick(rng, pool.size())]);
    BuiltinOp op;
    if (numeric) {
      static const BuiltinOp ops[] = {BuiltinOp::Eq, BuiltinOp::Ne,
                                      BuiltinOp::Lt, BuiltinOp::Gt,
                                      BuiltinOp::Le, BuiltinOp::Ge};
      op = ops[pick(rng, 6)];
    } else {
      op = pick(rng, 2) ? BuiltinOp::Eq : BuiltinOp::Ne;
    }
    c.builtins.push_back(BuiltinAtom{op, std::move(lhs), std::move(rhs)});
  }
  return c;
}

inline ConstraintSet random_constraints(Rng& rng, const Schema& schema,
                                        std::size_t max_constraints,
                                        std::size_t max_literals) {
  ConstraintSet cs(schema);
  std::size_t n = 1 + pick(rng, max_constraints);
  for (std::size_t i = 0; i < n; ++i) {
    if (pick(rng, 4) == 0) {
      // Sometimes a plain FD instead of a raw denial.
      std::vector<std::size_t> lhs, rhs;
      for (std::size_t p = 0; p < schema.arity(); ++p)
        (pick(rng, 2) ? lhs : rhs).push_back(p);
      if (rhs.empty()) rhs.push_back(lhs.back()), lhs.pop_back();
      if (!lhs.empty() || pick(rng, 4) == 0)
        cs.add_fd(FD{lhs, rhs});
      else
        cs.add_denial(random_denial(rng, schema, max_literals));
    } else {
      cs.add_denial(random_denial(rng, schema, max_literals));
    }
  }
  return cs;
}

// A ground quantifier-free sentence: up to `max_clauses` conjuncts, each
// a disjunction of up to `max_literals` signed relation atoms, biased
// toward tuples actually present in the instance.
inline QueryPtr random_ground_sentence(Rng& rng, const Instance& instance,
                                       std::size_t max_clauses,
                                       std::size_t max_literals) {
  const Schema& schema = instance.schema();
  auto random_atom = [&]() -> QueryPtr {
    std::vector<Term> terms;
    if (!instance.empty() && pick(rng, 10) < 7) {
      const Tuple& t = instance.tuples()[pick(rng, instance.size())];
      for (const Value& v : t.values()) terms.push_back(Term::constant(v));
    } else {
      for (std::size_t p = 0; p < schema.arity(); ++p)
        terms.push_back(Term::constant(random_value(rng, schema.type_of(p))));
    }
    return mk_rel(std::move(terms));
  };
  QueryPtr sentence;
  std::size_t clauses = 1 + pick(rng, max_clauses);
  for (std::size_t ci = 0; ci < clauses; ++ci) {
    QueryPtr clause;
    std::size_t lits = 1 + pick(rng, max_literals);
    for (std::size_t li = 0; li < lits; ++li) {
      QueryPtr atom = random_atom();
      if (rng() % 2) atom = mk_not(atom);
      clause = clause ? mk_or(clause, atom) : atom;
    }
    sentence = sentence ? mk_and(sentence, clause) : clause;
  }
  return sentence;
}

// A builtin-only condition over the schema's attribute names.
inline QueryPtr random_phi(Rng& rng, const Schema& schema) {
  auto random_cmp = [&]() -> QueryPtr {
    std::size_t p = pick(rng, schema.arity());
    ValueType t = schema.type_of(p);
    Term lhs = Term::var(schema.attributes()[p].name);
    Term rhs = Term::constant(random_value(rng, t));
    if (pick(rng, 4) == 0) {
      // Compare two attributes of the same type instead.
      for (std::size_t q = 0; q < schema.arity(); ++q)
        if (q != p && schema.type_of(q) == t) {
          rhs = Term::var(schema.attributes()[q].name);
          break;
        }
    }
    BuiltinOp op;
    if (t == ValueType::Num) {
      static const BuiltinOp ops[] = {BuiltinOp::Eq, BuiltinOp::Ne,
                                      BuiltinOp::Lt, BuiltinOp::Ge};
      op = ops[pick(rng, 4)];
    } else {
      op = pick(rng, 2) ? BuiltinOp::Eq : BuiltinOp::Ne;
    }
    return mk_builtin(op, std::move(lhs), std::move(rhs));
  };
  QueryPtr phi = random_cmp();
  std::size_t extra = pick(rng, 2);
  for (std::size_t i = 0; i < extra; ++i) {
    QueryPtr next = random_cmp();
    phi = (rng() % 2) ? mk_and(phi, next) : mk_or(phi, next);
  }
  if (pick(rng, 5) == 0) phi = mk_not(phi);
  return phi;
}

inline FD random_fd(Rng& rng, const Schema& schema) {
  while (true) {
    std::vector<std::size_t> lhs, rhs;
    for (std::size_t p = 0; p < schema.arity(); ++p) {
      switch (pick(rng, 3)) {
        case 0: lhs.push_back(p); break;
        case 1: rhs.push_back(p); break;
        default: break;
      }
    }
    if (!rhs.empty() && !lhs.empty()) return FD{lhs, rhs};
    if (!rhs.empty() && pick(rng, 8) == 0) return FD{lhs, rhs};  // X empty
  }
}

inline CnfFormula random_cnf(Rng& rng, std::size_t max_vars,
                             std::size_t max_clauses, bool monotone) {
  CnfFormula f;
  f.num_vars = 1 + pick(rng, max_vars);
  std::size_t clauses = 1 + pick(rng, max_clauses);
  for (std::size_t c = 0; c < clauses; ++c) {
    std::vector<int> clause;
    bool positive = rng() % 2;
    std::size_t lits = 1 + pick(rng, 3);
    for (std::size_t l = 0; l < lits; ++l) {
      int v = 1 + int(pick(rng, f.num_vars));
      bool neg = monotone ? !positive : rng() % 2;
      clause.push_back(neg ? -v : v);
    }
    f.clauses.push_back(std::move(clause));
  }
  return f;
}

inline std::string describe_case(const Instance& instance,
                                 const ConstraintSet& cs,
                                 const std::string& query_dsl) {
  std::ostringstream os;
  os << "instance:\n"
     << serialize_instance(instance) << "constraints:\n"
     << cs.str() << "query: " << query_dsl << "\n";
  return os.str();
}

template <typename CaseFn>
SuiteResult run_cases(const std::string& name, std::size_t cases,
                      std::uint64_t seed, unsigned threads, CaseFn&& fn) {
  auto started = std::chrono::steady_clock::now();
  SuiteResult result;
  result.name = name;
  result.cases = cases;
  auto run_one = [&](std::size_t i) -> std::string {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + i);
    return fn(rng);  // empty string means pass
  };
  std::vector<std::string> outcomes(cases);
  if (threads <= 1) {
    for (std::size_t i = 0; i < cases; ++i) outcomes[i] = run_one(i);
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
      futures.push_back(std::async(std::launch::async, [&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= cases) return;
          outcomes[i] = run_one(i);
        }
      }));
    for (auto& f : futures) f.get();
  }
  for (const std::string& detail : outcomes) {
    if (detail.empty()) continue;
    ++result.failures;
    if (result.failure_details.size() < 5)
      result.failure_details.push_back(detail);
  }
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return result;
}

}  // namespace detail

/// Differential suite for the quantifier-free engine: its tri-state
/// verdict must match exhaustive repair enumeration on every case.
inline SuiteResult run_qfree_suite(std::uint64_t seed, std::size_t cases,
                                   unsigned threads = 1) {
  return detail::run_cases(
      "qfree-vs-oracle", cases, seed, threads,
      [](detail::Rng& rng) -> std::string {
        Instance r = detail::random_instance(rng, 10);
        ConstraintSet cs = detail::random_constraints(rng, r.schema(), 2, 3);
        QueryPtr root = detail::random_ground_sentence(rng, r, 3, 3);
        AnalyzedQuery q = analyze_query(root, r.schema());
        EngineOptions opts;
        opts.strategy = Strategy::QFree;
        AnswerStatus engine = *cqa_answer(r, cs, q, opts).status;
        AnswerStatus oracle = oracle_status(r, cs, q);
        if (engine == oracle) return {};
        return "engine=" + std::string(to_string(engine)) +
               " oracle=" + to_string(oracle) + "\n" +
               detail::describe_case(r, cs, to_dsl(q.root, "R"));
      });
}

/// Differential suite for the single-FD rewriting: evaluating the
/// rewritten sentence on the inconsistent instance must match the
/// oracle's consistently-true verdict for the original sentence.
inline SuiteResult run_rewrite_suite(std::uint64_t seed, std::size_t cases,
                                     unsigned threads = 1) {
  return detail::run_cases(
      "rewrite-vs-oracle", cases, seed, threads,
      [](detail::Rng& rng) -> std::string {
        Instance r = detail::random_instance(rng, 10);
        Schema schema = r.schema();
        FD fd = detail::random_fd(rng, schema);
        QueryPtr phi = detail::random_phi(rng, schema);
        // Original sentence: exists t. R(t) & phi(t).
        std::vector<std::string> tuple_vars;
        std::map<std::string, std::string> ren;
        std::vector<Term> atom_terms;
        for (std::size_t p = 0; p < schema.arity(); ++p) {
          std::string v = "t" + std::to_string(p + 1);
          tuple_vars.push_back(v);
          ren[schema.attributes()[p].name] = v;
          atom_terms.push_back(Term::var(v));
        }
        QueryPtr sentence_root = mk_exists(
            tuple_vars,
            mk_and(mk_rel(atom_terms), rename_free_vars(phi, ren)));
        AnalyzedQuery sentence = analyze_query(sentence_root, schema);
        ConstraintSet cs = ConstraintSet::of_fds(schema, {fd});
        AnalyzedQuery rewritten = rewrite_single_fd(fd, schema, phi);
        bool via_rewriting = eval_fo(r, rewritten);
        bool via_oracle =
            oracle_status(r, cs, sentence) == AnswerStatus::ConsistentlyTrue;
        if (via_rewriting == via_oracle) return {};
        return "rewrite=" + std::to_string(via_rewriting) +
               " oracle=" + std::to_string(via_oracle) + "\n" +
               detail::describe_case(r, cs, to_dsl(sentence.root, "R")) +
               "rewritten: " + to_dsl(rewritten.root, "R") + "\n";
      });
}

/// Reduction biconditionals: satisfiability / colorability of the source
/// problem must coincide with the existence of a falsifying repair for
/// the generated triple.
inline SuiteResult run_reduction_suite(std::uint64_t seed,
                                       std::size_t monotone_cases,
                                       std::size_t threesat_cases,
                                       unsigned threads = 1) {
  SuiteResult mono = detail::run_cases(
      "monotone3sat-biconditional", monotone_cases, seed ^ 0xa0, threads,
      [](detail::Rng& rng) -> std::string {
        CnfFormula f = detail::random_cnf(rng, 5, 6, /*monotone=*/true);
        GeneratedProblem gp = gen_monotone3sat(f);
        bool sat = brute_sat(f);
        bool falsifiable =
            exists_falsifying_repair(gp.instance, gp.constraints, gp.query);
        if (sat == falsifiable) return {};
        return "sat=" + std::to_string(sat) +
               " falsifiable=" + std::to_string(falsifiable) + "\n" +
               detail::describe_case(gp.instance, gp.constraints,
                                     gp.query_text);
      });
  SuiteResult ys = detail::run_cases(
      "3sat-yfree-biconditional", threesat_cases, seed ^ 0x51, threads,
      [](detail::Rng& rng) -> std::string {
        CnfFormula f = detail::random_cnf(rng, 5, 6, /*monotone=*/false);
        GeneratedProblem gp = gen_3sat_yfree(f);
        bool sat = brute_sat(f);
        bool falsifiable =
            exists_falsifying_repair(gp.instance, gp.constraints, gp.query);
        if (sat == falsifiable) return {};
        return "sat=" + std::to_string(sat) +
               " falsifiable=" + std::to_string(falsifiable) + "\n" +
               detail::describe_case(gp.instance, gp.constraints,
                                     gp.query_text);
      });
  // All graphs on up to 3 labeled nodes.
  std::vector<UndirectedGraph> graphs;
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> all_edges;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) all_edges.emplace_back(u, v);
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << all_edges.size());
         ++mask) {
      UndirectedGraph g;
      g.n = n;
      for (std::size_t e = 0; e < all_edges.size(); ++e)
        if ((mask >> e) & 1) g.edges.push_back(all_edges[e]);
      graphs.push_back(std::move(g));
    }
  }
  // The graph cases are enumerated, not random.
  SuiteResult col;
  col.name = "3col-biconditional";
  col.cases = graphs.size();
  auto started = std::chrono::steady_clock::now();
  for (const UndirectedGraph& g : graphs) {
    GeneratedProblem gp = gen_3col(g);
    bool colorable = brute_3col(g);
    OracleOptions opts;
    opts.node_budget = std::size_t(1) << 22;
    bool falsifiable =
        exists_falsifying_repair(gp.instance, gp.constraints, gp.query, opts);
    if (colorable != falsifiable) {
      ++col.failures;
      if (col.failure_details.size() < 5)
        col.failure_details.push_back(
            "colorable=" + std::to_string(colorable) +
            " falsifiable=" + std::to_string(falsifiable) + " nodes=" +
            std::to_string(g.n) + " edges=" + std::to_string(g.edges.size()));
    }
  }
  col.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - started)
                    .count();

  SuiteResult combined;
  combined.name = "reduction-biconditionals";
  combined.cases = mono.cases + ys.cases + col.cases;
  combined.failures = mono.failures + ys.failures + col.failures;
  combined.seconds = mono.seconds + ys.seconds + col.seconds;
  for (const auto* part : {&mono, &ys, &col})
    for (const std::string& d : part->failure_details)
      if (combined.failure_details.size() < 5)
        combined.failure_details.push_back(d);
  return combined;
}

/// Structural invariants: repairs coincide with the powerset reference,
/// CNF conversion is equivalent on every world, and the two hypergraph
/// modes agree.
inline SuiteResult run_structural_suite(std::uint64_t seed, std::size_t cases,
                                        unsigned threads = 1) {
  return detail::run_cases(
      "structural-invariants", cases, seed ^ 0x57, threads,
      [](detail::Rng& rng) -> std::string {
        Instance r = detail::random_instance(rng, 12);
        ConstraintSet cs = detail::random_constraints(rng, r.schema(), 2, 3);
        ConflictHypergraph mat(r, cs, HgMode::Materialized);
        ConflictHypergraph lazy(r, cs, HgMode::Lazy);
        OracleOptions opts;
        opts.node_budget = std::size_t(1) << 22;

        std::set<std::vector<VertexId>> enumerated;
        enumerate_repairs(mat, [&](const Repair& rep) {
          enumerated.insert(rep.vertex_ids);
          return true;
        }, opts);
        auto expected = reference::powerset_repairs(r, cs);
        std::set<std::vector<VertexId>> expected_set(expected.begin(),
                                                     expected.end());
        if (enumerated != expected_set)
          return "repairs disagree with powerset reference\n" +
                 detail::describe_case(r, cs, "-");

        for (const auto& ids : enumerated) {
          if (!is_consistent(r.restrict_to(ids), cs))
            return "enumerated repair is inconsistent\n" +
                   detail::describe_case(r, cs, "-");
          if (!mat.is_independent(ids) || !lazy.is_independent(ids))
            return "enumerated repair is not independent\n" +
                   detail::describe_case(r, cs, "-");
        }

        for (VertexId v = 0; v < r.size(); ++v)
          if (mat.edges_containing(v) != lazy.edges_containing(v))
            return "hypergraph modes disagree on edges_containing\n" +
                   detail::describe_case(r, cs, "-");

        QueryPtr sentence = detail::random_ground_sentence(rng, r, 3, 3);
        auto clauses = to_cnf(sentence);
        std::set<Tuple> atoms = reference::mentioned_ground_atoms(sentence);
        std::vector<Tuple> atom_list(atoms.begin(), atoms.end());
        if (atom_list.size() <= 10) {
          for (std::uint32_t mask = 0;
               mask < (std::uint32_t(1) << atom_list.size()); ++mask) {
            std::set<Tuple> world;
            for (std::size_t i = 0; i < atom_list.size(); ++i)
              if ((mask >> i) & 1) world.insert(atom_list[i]);
            bool direct = reference::eval_in_world(sentence, world);
            bool via_cnf = true;
            for (const GroundClause& c : clauses) {
              bool ct = false;
              for (const Tuple& t : c.positives)
                if (world.count(t)) { ct = true; break; }
              if (!ct)
                for (const Tuple& t : c.negatives)
                  if (!world.count(t)) { ct = true; break; }
              if (!ct) { via_cnf = false; break; }
            }
            if (direct != via_cnf)
              return "CNF disagrees with direct evaluation\n" +
                     detail::describe_case(r, cs, to_dsl(sentence, "R"));
          }
        }
        return {};
      });
}

}  // namespace cqa::selftest

#endif  // CQA_SELFTEST_HPP
