// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

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
      "fd: A, B -> C\n",
      "denial: R(x,y,n), R(y,x,n2), n > n2\n",
      "denial: R(x,x,n)\n",
      "denial: R(x,y,n), R(x,y2,n2), n >= 3, n2 < 2\n",
  };
  std::string text = pool[rng() % 5];
  if (rng() % 2) text += pool[rng() % 5];
  return parse_constraints(text, schema);
}

}  // namespace

TEST_CASE("hypergraph construction", "[hypergraph]") {
  SECTION("person instance: 3 vertices, 1 edge of size 2") {
    Fixture f;
    ConflictHypergraph hg(f.instance, f.cs, HgMode::Materialized);
    CHECK(hg.vertex_count() == 3);
    REQUIRE(hg.edges().size() == 1);
    CHECK(hg.edges()[0].size() == 2);
    auto st = hg.stats();
    CHECK(st.isolated_vertex_count == 1);
    CHECK(st.edge_size_histogram.at(2) == 1);
  }
  SECTION("two-choice family n=3: 6 vertices, 3 disjoint edges") {
    Instance r = two_choice_family(3);
    ConstraintSet cs = two_choice_constraints(r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    CHECK(hg.vertex_count() == 6);
    REQUIRE(hg.edges().size() == 3);
    for (const Edge& e : hg.edges()) CHECK(e.size() == 2);
    CHECK(hg.components().size() == 3);
  }
  SECTION("consistent instance has no edges") {
    Instance r = parse_instance(
        "# relation: Person\nName:sym,City:sym,Street:sym\n"
        "Green,Clarence,4000 Transit\n");
    ConstraintSet cs = person_constraints(r.schema());
    ConflictHypergraph hg(r, cs, HgMode::Materialized);
    CHECK(hg.edges().empty());
  }
  SECTION("edge budget raises a resource error") {
    Instance r = two_choice_family(40);
    ConstraintSet cs = two_choice_constraints(r.schema());
    CHECK_THROWS_AS(
        ConflictHypergraph(r, cs, HgMode::Materialized, /*edge_budget=*/10),
        BudgetError);
  }
}

TEST_CASE("edges_containing", "[hypergraph]") {
  Fixture f;
  ConflictHypergraph hg(f.instance, f.cs, HgMode::Materialized);
  SECTION("conflicting tuple has one edge") {
    auto edges = hg.edges_containing(brown_klein());
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].size() == 2);
  }
  SECTION("clean tuple has none") {
    CHECK(hg.edges_containing(green_transit()).empty());
  }
  SECTION("non-vertex rejected") {
    CHECK_THROWS_AS(hg.edges_containing(sym_tuple({"x", "y", "z"})),
                    InvalidArgument);
  }
}

TEST_CASE("independence and maximal extension", "[hypergraph]") {
  Fixture f;
  ConflictHypergraph hg(f.instance, f.cs, HgMode::Materialized);
  // Canonical order sorts Brown-Klein before Brown-Maple before Green.
  REQUIRE(f.instance.tuples()[0] == brown_klein());
  REQUIRE(f.instance.tuples()[1] == brown_maple());
  REQUIRE(f.instance.tuples()[2] == green_transit());

  SECTION("the two brown tuples are dependent") {
    CHECK_FALSE(hg.is_independent({0, 1}));
  }
  SECTION("empty set independent") { CHECK(hg.is_independent({})); }
  SECTION("klein with green independent, cross-checked by violations") {
    CHECK(hg.is_independent({0, 2}));
    Instance sub = f.instance.restrict_to({0, 2});
    for (const auto& d : f.cs.denials())
      CHECK(violations(sub, d).empty());
  }
  SECTION("extension from the first brown tuple") {
    Repair r = hg.extend_to_maximal({0});
    CHECK(r.vertex_ids == std::vector<VertexId>{0, 2});
  }
  SECTION("extension is idempotent on maximal sets") {
    Repair r = hg.extend_to_maximal({0, 2});
    CHECK(r.vertex_ids == std::vector<VertexId>{0, 2});
  }
  SECTION("extension of the empty set follows canonical order") {
    Instance r2 = two_choice_family(2);
    ConstraintSet cs2 = two_choice_constraints(r2.schema());
    ConflictHypergraph hg2(r2, cs2, HgMode::Materialized);
    Repair r = hg2.extend_to_maximal({});
    // Greedy scan keeps (a1,b0) and (a2,b0).
    std::vector<Tuple> kept;
    for (VertexId v : r.vertex_ids) kept.push_back(r2.tuples()[v]);
    CHECK(kept == (std::vector<Tuple>{sym_tuple({"a1", "b0"}),
                                      sym_tuple({"a2", "b0"})}));
  }
  SECTION("non-independent seed rejected") {
    CHECK_THROWS_AS(hg.extend_to_maximal({0, 1}), InvalidArgument);
  }
}

TEST_CASE("materialized and lazy modes agree", "[hypergraph][property]") {
  std::mt19937_64 rng(424243);
  for (int round = 0; round < 80; ++round) {
    Instance r = random_instance(rng, 9);
    ConstraintSet cs = random_constraints(rng, r.schema());
    ConflictHypergraph mat(r, cs, HgMode::Materialized);
    ConflictHypergraph lazy(r, cs, HgMode::Lazy);
    for (VertexId v = 0; v < r.size(); ++v) {
      CHECK(mat.edges_containing(v) == lazy.edges_containing(v));
      CHECK(mat.has_incident_edge(v) == lazy.has_incident_edge(v));
    }
    // Random subsets agree on independence.
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<VertexId> s;
      for (VertexId v = 0; v < r.size(); ++v)
        if (rng() % 2) s.push_back(v);
      CHECK(mat.is_independent(s) == lazy.is_independent(s));
    }
  }
}
