// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqa/selftest.hpp"
#include "dpll.hpp"
#include "helpers.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

CnfFormula formula(std::size_t vars, std::vector<std::vector<int>> clauses) {
  return CnfFormula{vars, std::move(clauses)};
}

std::size_t literal_total(const CnfFormula& f) {
  std::size_t n = 0;
  for (const auto& c : f.clauses) n += c.size();
  return n;
}

}  // namespace

TEST_CASE("monotone 3-SAT generator", "[reductions]") {
  SECTION("positive-then-negative clause yields six facts") {
    CnfFormula f = formula(3, {{1, 2, 3}, {-1, -2, -3}});
    GeneratedProblem gp = gen_monotone3sat(f);
    CHECK(gp.instance.size() == 6);
    CHECK(gp.constraints.fds().size() == 1);
    CHECK(brute_sat(f));
    CHECK(exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
    CHECK(oracle_status(gp.instance, gp.constraints, gp.query) !=
          AnswerStatus::ConsistentlyTrue);
  }
  SECTION("contradictory unit clauses are unsatisfiable") {
    CnfFormula f = formula(1, {{1}, {-1}});
    GeneratedProblem gp = gen_monotone3sat(f);
    REQUIRE(gp.instance.size() == 2);
    // Positive clause first (index 1, tag c_prime), negative second.
    CHECK(gp.instance.contains(Tuple(
        {Value::num(1), Value::sym("p1"), Value::sym("c_prime")})));
    CHECK(gp.instance.contains(
        Tuple({Value::num(2), Value::sym("p1"), Value::sym("c")})));
    CHECK_FALSE(brute_sat(f));
    CHECK(oracle_status(gp.instance, gp.constraints, gp.query) ==
          AnswerStatus::ConsistentlyTrue);
  }
  SECTION("the empty formula maps to the empty instance") {
    CnfFormula f = formula(0, {});
    GeneratedProblem gp = gen_monotone3sat(f);
    CHECK(gp.instance.empty());
    CHECK(brute_sat(f));
    CHECK(oracle_status(gp.instance, gp.constraints, gp.query) ==
          AnswerStatus::ConsistentlyFalse);
    CHECK(exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
  }
  SECTION("fact count is the literal total") {
    std::mt19937_64 rng(606060);
    for (int round = 0; round < 30; ++round) {
      cqa::selftest::detail::Rng srng(rng());
      CnfFormula f = cqa::selftest::detail::random_cnf(srng, 5, 6, true);
      // Deduplicate literals the way the generator does.
      std::size_t distinct = 0;
      for (auto clause : f.clauses) {
        std::sort(clause.begin(), clause.end());
        clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
        distinct += clause.size();
      }
      CHECK(gen_monotone3sat(f).instance.size() == distinct);
    }
  }
  SECTION("non-monotone input rejected") {
    CHECK_THROWS_AS(gen_monotone3sat(formula(2, {{1, -2}})), InvalidArgument);
    CHECK_THROWS_AS(gen_monotone3sat(formula(1, {{}})), InvalidArgument);
  }
}

TEST_CASE("3-colorability generator", "[reductions]") {
  SECTION("single vertex: 14 facts, colorable, falsifiable") {
    UndirectedGraph g;
    g.n = 1;
    GeneratedProblem gp = gen_3col(g);
    CHECK(gp.instance.size() == 14);  // 8 'g' + 6 'b'
    CHECK(gp.constraints.fds().size() == 2);
    CHECK(brute_3col(g));
    CHECK(exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
  }
  SECTION("single edge: 28 node facts plus 6 edge facts") {
    UndirectedGraph g;
    g.n = 2;
    g.edges = {{0, 1}};
    GeneratedProblem gp = gen_3col(g);
    CHECK(gp.instance.size() == 34);
    CHECK(brute_3col(g));
    CHECK(exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
  }
  SECTION("fact count closed form on random graphs") {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 10; ++round) {
      std::size_t n = 1 + rng() % 4;
      UndirectedGraph g;
      g.n = n;
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
          if (rng() % 2) g.edges.emplace_back(u, v);
      GeneratedProblem gp = gen_3col(g);
      CHECK(gp.instance.size() == 14 * g.n + 6 * g.edges.size());
    }
  }
  SECTION("self-loops rejected") {
    UndirectedGraph g;
    g.n = 1;
    g.edges = {{0, 0}};
    CHECK_THROWS_AS(gen_3col(g), InvalidArgument);
  }
}

TEST_CASE("3SAT one-denial generator", "[reductions]") {
  SECTION("single positive unit clause") {
    CnfFormula f = formula(1, {{1}});
    GeneratedProblem gp = gen_3sat_yfree(f);
    // 3 facts for the variable, 2 for the clause, 1 occurrence.
    CHECK(gp.instance.size() == 6);
    CHECK(gp.constraints.raw_denial_count() == 1);
    CHECK(brute_sat(f));
    CHECK(exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
  }
  SECTION("contradictory units are consistently true") {
    CnfFormula f = formula(1, {{1}, {-1}});
    GeneratedProblem gp = gen_3sat_yfree(f);
    CHECK_FALSE(brute_sat(f));
    CHECK_FALSE(
        exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
    CHECK(oracle_status(gp.instance, gp.constraints, gp.query) ==
          AnswerStatus::ConsistentlyTrue);
  }
  SECTION("a single wide clause is satisfiable") {
    CnfFormula f = formula(3, {{1, 2, 3}});
    GeneratedProblem gp = gen_3sat_yfree(f);
    CHECK(brute_sat(f));
    CHECK(exists_falsifying_repair(gp.instance, gp.constraints, gp.query));
  }
  SECTION("fact count closed form") {
    CnfFormula f = formula(4, {{1, -2, 3}, {-1, 4}, {2}});
    GeneratedProblem gp = gen_3sat_yfree(f);
    CHECK(gp.instance.size() == 3 * 4 + 2 * 3 + literal_total(f));
  }
  SECTION("oversized or empty clauses rejected") {
    CHECK_THROWS_AS(gen_3sat_yfree(formula(4, {{1, 2, 3, 4}})),
                    InvalidArgument);
    CHECK_THROWS_AS(gen_3sat_yfree(formula(1, {{}})), InvalidArgument);
  }
}

TEST_CASE("generated artifacts round-trip through the DSLs", "[reductions]") {
  std::mt19937_64 rng(7113);
  for (int round = 0; round < 20; ++round) {
    cqa::selftest::detail::Rng srng(rng());
    CnfFormula f = cqa::selftest::detail::random_cnf(srng, 4, 4, round % 2);
    GeneratedProblem gp =
        (round % 2) ? gen_monotone3sat(f) : gen_3sat_yfree(f);
    // Constraints text parses back to the same number of constraints.
    ConstraintSet reparsed =
        parse_constraints(gp.constraints_text, gp.instance.schema());
    CHECK(reparsed.fds().size() == gp.constraints.fds().size());
    CHECK(reparsed.denials().size() == gp.constraints.denials().size());
    // Query text parses back to the same tree.
    AnalyzedQuery q = parse_query(gp.query_text, gp.instance.schema());
    CHECK(to_dsl(q.root, "R") == to_dsl(gp.query.root, "R"));
    // Instance round-trips through CSV.
    Instance back = parse_instance(serialize_instance(gp.instance),
                                   gp.instance.schema());
    CHECK(back.tuples() == gp.instance.tuples());
  }
}

TEST_CASE("brute-force verifiers", "[reductions]") {
  SECTION("classic cases") {
    CHECK_FALSE(brute_sat(formula(1, {{1}, {-1}})));
    CHECK(brute_sat(formula(2, {{1, 2}, {-1, 2}})));
    CHECK_FALSE(brute_sat(formula(1, {{}})));
    CHECK(brute_3col(complete_graph(3)));
    CHECK_FALSE(brute_3col(complete_graph(4)));
  }
  SECTION("budget limits") {
    CnfFormula f;
    f.num_vars = 25;
    f.clauses = {{25}};
    CHECK_THROWS_AS(brute_sat(f), BudgetError);
    CHECK_THROWS_AS(brute_3col(complete_graph(11)), BudgetError);
  }
  SECTION("agrees with an independent DPLL solver") {
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 200; ++round) {
      cqa::selftest::detail::Rng srng(rng());
      CnfFormula f =
          cqa::selftest::detail::random_cnf(srng, 5, 6, round % 3 == 0);
      CHECK(brute_sat(f) == dpll_sat(f));
    }
  }
}

TEST_CASE("reduction biconditionals on random inputs", "[reductions][property]") {
  auto result = cqa::selftest::run_reduction_suite(77, 15, 15);
  INFO((result.failure_details.empty() ? std::string() : result.failure_details[0]));
  CHECK(result.failures == 0);
}

TEST_CASE("input formats", "[reductions]") {
  SECTION("DIMACS") {
    CnfFormula f = parse_dimacs(
        "c a comment\np cnf 3 2\n1 -2 3 0\n-1 2 0\n");
    CHECK(f.num_vars == 3);
    REQUIRE(f.clauses.size() == 2);
    CHECK(f.clauses[0] == std::vector<int>{1, -2, 3});
    CHECK(f.clauses[1] == std::vector<int>{-1, 2});
  }
  SECTION("DIMACS without a header") {
    CnfFormula f = parse_dimacs("1 2 0\n-2 0\n");
    CHECK(f.num_vars == 2);
    CHECK(f.clauses.size() == 2);
  }
  SECTION("edge list") {
    UndirectedGraph g = parse_edge_list("# K3\n0 1\n1 2\n0 2\n");
    CHECK(g.n == 3);
    CHECK(g.edges.size() == 3);
  }
  SECTION("edge list with isolated nodes") {
    UndirectedGraph g = parse_edge_list("nodes 4\n0 1\n");
    CHECK(g.n == 4);
    CHECK(g.edges.size() == 1);
  }
  SECTION("self-loop rejected") {
    CHECK_THROWS_AS(parse_edge_list("1 1\n"), ParseError);
  }
}
