// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "cqa/reference.hpp"
#include "helpers.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

struct Fixture {
  Instance instance;
  ConstraintSet cs;
  Fixture()
      : instance(person_instance()),
        cs(person_constraints(instance.schema())) {}
  AnalyzedQuery q(const std::string& text) const {
    return parse_query(text, instance.schema());
  }
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_tuples) {
  Schema schema("R", {{"A", ValueType::Sym},
                      {"B", ValueType::Sym},
                      {"C", ValueType::Num}});
  const char* syms[] = {"a", "b", "c", "d"};
  std::vector<Tuple> tuples;
  std::size_t n = rng() % (max_tuples + 1);
  for (std::size_t i = 0; i < n; ++i)
    tuples.push_back(Tuple({Value::sym(syms[rng() % 4]),
                            Value::sym(syms[rng() % 4]),
                            Value::num(std::int64_t(rng() % 4))}));
  return Instance(schema, std::move(tuples));
}

ConstraintSet random_constraints(std::mt19937_64& rng, const Schema& schema) {
  static const char* pool[] = {
      "fd: A -> B\n",
      "fd: B -> C\n",
      "denial: R(x,y,n), R(y,x,n2), n > n2\n",
      "denial: R(x,x,n)\n",
      "fd: A, B -> C\n",
  };
  std::string text = pool[rng() % 5];
  if (rng() % 2) text += pool[rng() % 5];
  return parse_constraints(text, schema);
}

}  // namespace

TEST_CASE("repair enumeration on the person instance", "[oracle]") {
  Fixture f;
  ConflictHypergraph hg(f.instance, f.cs, HgMode::Materialized);
  std::vector<Repair> repairs = all_repairs(hg);
  REQUIRE(repairs.size() == 2);
  // One repair per brown tuple, both keeping the green tuple.
  CHECK(repairs[0].vertex_ids == std::vector<VertexId>{0, 2});
  CHECK(repairs[1].vertex_ids == std::vector<VertexId>{1, 2});
  for (const Repair& r : repairs)
    CHECK(is_consistent(r.materialize(f.instance), f.cs));
}

TEST_CASE("repair counts", "[oracle]") {
  SECTION("two-choice family has 2^n repairs") {
    for (std::size_t n = 1; n <= 4; ++n) {
      Instance r = two_choice_family(n);
      ConstraintSet cs = two_choice_constraints(r.schema());
      ConflictHypergraph hg(r, cs, HgMode::Materialized);
      CHECK(all_repairs(hg).size() == (std::size_t(1) << n));
      CHECK(count_repairs(hg) == Int(1) << n);
    }
    for (std::size_t n = 5; n <= 10; ++n) {
      Instance r = two_choice_family(n);
      ConstraintSet cs = two_choice_constraints(r.schema());
      ConflictHypergraph hg(r, cs, HgMode::Materialized);
      CHECK(count_repairs(hg) == Int(1) << n);
    }
  }
  SECTION("a consistent instance has exactly itself") {
    Instance r = parse_instance("A:sym,B:sym,C:num\nx,y,1\n");
    ConstraintSet cs = parse_constraints("fd: A -> B\n", r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    auto repairs = all_repairs(hg);
    REQUIRE(repairs.size() == 1);
    CHECK(repairs[0].vertex_ids == std::vector<VertexId>{0});
  }
  SECTION("empty instance has the empty repair") {
    Instance r = parse_instance("A:sym,B:sym,C:num\n");
    ConstraintSet cs = parse_constraints("fd: A -> B\n", r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    auto repairs = all_repairs(hg);
    REQUIRE(repairs.size() == 1);
    CHECK(repairs[0].vertex_ids.empty());
    CHECK(count_repairs(hg) == 1);
  }
  SECTION("node budget raises a resource error") {
    Instance r = two_choice_family(10);
    ConstraintSet cs = two_choice_constraints(r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    OracleOptions tight;
    tight.node_budget = 50;
    CHECK_THROWS_AS(all_repairs(hg, tight), BudgetError);
  }
}

TEST_CASE("repairs are the maximal independent sets", "[oracle][property]") {
  // Both directions against the powerset reference on random instances.
  std::mt19937_64 rng(901817);
  for (int round = 0; round < 60; ++round) {
    Instance r = random_instance(rng, 9);
    ConstraintSet cs = random_constraints(rng, r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    std::set<std::vector<VertexId>> enumerated;
    enumerate_repairs(hg, [&](const Repair& rep) {
      // Streamed exactly once.
      REQUIRE(enumerated.insert(rep.vertex_ids).second);
      return true;
    });
    auto expected = reference::powerset_repairs(r, cs);
    std::set<std::vector<VertexId>> expected_set(expected.begin(),
                                                 expected.end());
    REQUIRE(enumerated == expected_set);
    for (const auto& ids : enumerated) {
      CHECK(is_consistent(r.restrict_to(ids), cs));
      CHECK(hg.is_independent(ids));
    }
  }
}

TEST_CASE("deletion order minimality", "[oracle][property]") {
  // Every enumerated repair is minimal in the deletion order: no other
  // consistent subset deletes strictly less.
  std::mt19937_64 rng(3141);
  for (int round = 0; round < 25; ++round) {
    Instance r = random_instance(rng, 7);
    ConstraintSet cs = random_constraints(rng, r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    std::vector<Repair> repairs = all_repairs(hg);
    for (const Repair& rep : repairs) {
      std::set<VertexId> kept(rep.vertex_ids.begin(), rep.vertex_ids.end());
      for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << r.size());
           ++mask) {
        std::vector<VertexId> other;
        for (VertexId v = 0; v < r.size(); ++v)
          if ((mask >> v) & 1) other.push_back(v);
        if (!reference::satisfies_all(r.restrict_to(other), cs)) continue;
        // other consistent and deletes no more than rep => equal sets.
        bool superset = true;
        for (VertexId v : rep.vertex_ids)
          if (!((mask >> v) & 1)) {
            superset = false;
            break;
          }
        if (superset)
          CHECK(other.size() == rep.vertex_ids.size());
      }
    }
  }
}

TEST_CASE("falsifying repair search", "[oracle]") {
  Fixture f;
  SECTION("the two-disjunct sentence holds in every repair") {
    CHECK_FALSE(exists_falsifying_repair(
        f.instance, f.cs,
        f.q("Person('Brown','Amherst','115 Klein') | "
            "Person('Brown','Amherst','120 Maple')")));
  }
  SECTION("a single brown fact fails in the other repair") {
    CHECK(exists_falsifying_repair(
        f.instance, f.cs, f.q("Person('Brown','Amherst','115 Klein')")));
  }
  SECTION("tautologies are never falsified") {
    CHECK_FALSE(exists_falsifying_repair(
        f.instance, f.cs,
        f.q("Person('Brown','Amherst','115 Klein') | "
            "!Person('Brown','Amherst','115 Klein')")));
  }
  SECTION("agrees with oracle_status across sentence shapes") {
    const char* sentences[] = {
        "exists n,c,s. Person(n,c,s) & c = 'Amherst'",
        "exists n,c,s. Person(n,c,s) & s = '115 Klein'",
        "Person('Green','Clarence','4000 Transit')",
        "forall n,c,s. Person(n,c,s) -> c = 'Amherst'",
    };
    for (const char* text : sentences) {
      AnalyzedQuery q = f.q(text);
      bool falsifiable = exists_falsifying_repair(f.instance, f.cs, q);
      CHECK(falsifiable ==
            (oracle_status(f.instance, f.cs, q) !=
             AnswerStatus::ConsistentlyTrue));
    }
  }
}

TEST_CASE("oracle status", "[oracle]") {
  Fixture f;
  SECTION("existential brown address") {
    CHECK(oracle_status(f.instance, f.cs,
                        f.q("exists s. Person('Brown','Amherst',s)")) ==
          AnswerStatus::ConsistentlyTrue);
  }
  SECTION("a specific brown address is undetermined") {
    CHECK(oracle_status(f.instance, f.cs,
                        f.q("Person('Brown','Amherst','115 Klein')")) ==
          AnswerStatus::Undetermined);
  }
  SECTION("emptiness is consistently false on the empty instance") {
    Instance empty = parse_instance(
        "# relation: Person\nName:sym,City:sym,Street:sym\n");
    ConstraintSet cs = person_constraints(empty.schema());
    CHECK(oracle_status(empty, cs,
                        parse_query("exists n,c,s. Person(n,c,s)",
                                    empty.schema())) ==
          AnswerStatus::ConsistentlyFalse);
  }
}

TEST_CASE("oracle answers", "[oracle]") {
  Fixture f;
  SECTION("closed-world answer to the full-row query") {
    auto answers =
        oracle_answers(f.instance, f.cs, f.q("Person(n,c,s)"));
    REQUIRE(answers.size() == 1);
    CHECK(answers[0] == green_transit());
  }
  SECTION("projection keeps both names") {
    auto answers =
        oracle_answers(f.instance, f.cs, f.q("exists s. Person(n,c,s)"));
    REQUIRE(answers.size() == 2);
    CHECK(answers[0] == sym_tuple({"Brown", "Amherst"}));
    CHECK(answers[1] == sym_tuple({"Green", "Clarence"}));
  }
  SECTION("empty instance has no answers") {
    Instance empty = parse_instance(
        "# relation: Person\nName:sym,City:sym,Street:sym\n");
    ConstraintSet cs = person_constraints(empty.schema());
    CHECK(oracle_answers(empty, cs,
                         parse_query("Person(n,c,s)", empty.schema()))
              .empty());
  }
}

TEST_CASE("status and falsifying search are two routes to one fact",
          "[oracle][property]") {
  std::mt19937_64 rng(5550123);
  for (int round = 0; round < 40; ++round) {
    Instance r = random_instance(rng, 7);
    ConstraintSet cs = random_constraints(rng, r.schema());
    // A mix of sentence shapes over the random instance.
    std::vector<AnalyzedQuery> sentences;
    sentences.push_back(
        parse_query("exists x,y,n. R(x,y,n) & n >= 2", r.schema()));
    sentences.push_back(parse_query("exists x,y,n. R(x,y,n)", r.schema()));
    sentences.push_back(
        parse_query("forall x,y,n. R(x,y,n) -> n < 3", r.schema()));
    if (!r.empty()) {
      const Tuple& t = r.tuples()[rng() % r.size()];
      std::vector<Term> terms;
      for (const Value& v : t.values()) terms.push_back(Term::constant(v));
      sentences.push_back(analyze_query(mk_rel(terms), r.schema()));
    }
    for (const AnalyzedQuery& q : sentences) {
      bool falsifiable = exists_falsifying_repair(r, cs, q);
      AnswerStatus st = oracle_status(r, cs, q);
      CHECK(falsifiable == (st != AnswerStatus::ConsistentlyTrue));
    }
  }
}
