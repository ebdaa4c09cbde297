// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "cqa/json_io.hpp"
#include "cqa/reference.hpp"
#include "helpers.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

Schema person_schema() { return person_instance().schema(); }

AnalyzedQuery pq(const std::string& text) {
  return parse_query(text, person_schema());
}

}  // namespace

TEST_CASE("query parsing and fragments", "[queries]") {
  SECTION("ground disjunction") {
    AnalyzedQuery q = pq(
        "Person('Brown','Amherst','115 Klein') | "
        "Person('Brown','Amherst','120 Maple')");
    CHECK(q.fragment == Fragment::GroundQuantifierFree);
    CHECK(q.free.empty());
  }
  SECTION("open query with free variables in first-occurrence order") {
    AnalyzedQuery q = pq("exists s. Person(n,c,s)");
    CHECK(q.fragment == Fragment::General);
    CHECK(q.free == std::vector<std::string>{"n", "c"});
  }
  SECTION("open quantifier-free") {
    AnalyzedQuery q = pq("Person(n,c,s)");
    CHECK(q.fragment == Fragment::OpenQuantifierFree);
    CHECK(q.free == std::vector<std::string>{"n", "c", "s"});
  }
  SECTION("single-literal existential") {
    Schema s("R", {{"A", ValueType::Sym},
                   {"B", ValueType::Num},
                   {"C", ValueType::Sym}});
    AnalyzedQuery q = parse_query("exists x,y,z. R(x,y,z) & y < 5", s);
    CHECK(q.fragment == Fragment::SingleLiteralExistential);
    REQUIRE(q.single_literal.has_value());
    CHECK(q.single_literal->tuple_vars ==
          (std::vector<std::string>{"x", "y", "z"}));
    CHECK(q.single_literal->phi != nullptr);
  }
  SECTION("bare single literal is still the shape") {
    AnalyzedQuery q = pq("exists n,c,s. Person(n,c,s)");
    CHECK(q.fragment == Fragment::SingleLiteralExistential);
    CHECK_FALSE(q.single_literal->phi);
  }
  SECTION("two literals fall back to general") {
    AnalyzedQuery q =
        pq("exists n,c,s,s2. Person(n,c,s) & Person(n,c,s2)");
    CHECK(q.fragment == Fragment::General);
  }
  SECTION("negated literal under exists is general") {
    AnalyzedQuery q = pq("exists n,c,s. !Person(n,c,s)");
    CHECK(q.fragment == Fragment::General);
  }
  SECTION("syntax error carries position") {
    try {
      pq("Person(n,c,");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() >= 1);
    }
  }
  SECTION("arity mismatch rejected") {
    CHECK_THROWS_AS(pq("Person(n,c)"), TypeError);
  }
  SECTION("type clash rejected") {
    CHECK_THROWS_AS(pq("Person(n,c,s) & n < 5"), TypeError);
    CHECK_THROWS_AS(pq("Person(n,c,5)"), TypeError);
  }
  SECTION("unknown relation rejected") {
    CHECK_THROWS_AS(pq("People(n,c,s)"), ParseError);
  }
  SECTION("variable reuse across quantifiers rejected") {
    CHECK_THROWS_AS(
        pq("(exists n,c,s. Person(n,c,s)) & (exists n,c2,s2. Person(n,c2,s2))"),
        ParseError);
  }
  SECTION("precedence: implies binds loosest, and over or") {
    Schema s("R", {{"A", ValueType::Num}});
    AnalyzedQuery q = parse_query("1 = 1 & 1 = 2 | 2 = 2 -> 3 = 3", s);
    REQUIRE(std::holds_alternative<Implies>(q.root->node));
    const auto& imp = std::get<Implies>(q.root->node);
    CHECK(std::holds_alternative<Or>(imp.lhs->node));
  }
}

TEST_CASE("query printing round-trips", "[queries]") {
  const char* texts[] = {
      "Person('Brown','Amherst','115 Klein') | Person('Brown','Amherst','120 Maple')",
      "exists s. Person(n,c,s)",
      "exists n,c,s. Person(n,c,s) & (c = 'Amherst' | !(s = 'x'))",
      "forall n,c,s. Person(n,c,s) -> c = 'Amherst'",
      "!(Person(n,c,s) -> Person(n,c,s))",
  };
  for (const char* text : texts) {
    AnalyzedQuery q = pq(text);
    std::string printed = to_dsl(q.root, "Person");
    AnalyzedQuery reparsed = parse_query(printed, person_schema());
    CHECK(to_dsl(reparsed.root, "Person") == printed);
    CHECK(reparsed.fragment == q.fragment);
  }
}

TEST_CASE("query JSON dump", "[queries]") {
  AnalyzedQuery q = pq("exists s. Person(n,c,s)");
  Json j = query_to_json(q.root);
  REQUIRE(j.contains("exists"));
  CHECK(j["exists"]["vars"] == Json::array({"s"}));
  CHECK(j["exists"]["body"].contains("rel"));
}

TEST_CASE("grounding", "[queries]") {
  SECTION("binding free variables yields a sentence") {
    AnalyzedQuery q = pq("exists s. Person(n,c,s)");
    AnalyzedQuery g = ground(
        q, {{"n", Value::sym("Green")}, {"c", Value::sym("Clarence")}});
    CHECK(g.is_sentence());
    CHECK(g.fragment == Fragment::General);
  }
  SECTION("empty substitution leaves a sentence unchanged") {
    AnalyzedQuery q = pq("exists n,c,s. Person(n,c,s)");
    AnalyzedQuery g = ground(q, {});
    CHECK(to_dsl(g.root, "Person") == to_dsl(q.root, "Person"));
  }
  SECTION("missing binding rejected") {
    AnalyzedQuery q = pq("Person(n,c,s)");
    CHECK_THROWS_AS(ground(q, {{"n", Value::sym("Green")}}),
                    InvalidArgument);
  }
  SECTION("value of the wrong type rejected") {
    AnalyzedQuery q = pq("Person(n,c,s)");
    CHECK_THROWS_AS(ground(q, {{"n", Value::num(5)},
                               {"c", Value::sym("x")},
                               {"s", Value::sym("y")}}),
                    TypeError);
  }
}

TEST_CASE("to_cnf", "[queries][cnf]") {
  SECTION("the two-disjunct sentence is one clause") {
    AnalyzedQuery q = pq(
        "Person('Brown','Amherst','115 Klein') | "
        "Person('Brown','Amherst','120 Maple')");
    auto clauses = to_cnf(q.root);
    REQUIRE(clauses.size() == 1);
    CHECK(clauses[0].positives.size() == 2);
    CHECK(clauses[0].negatives.empty());
  }
  SECTION("conjunction distributes") {
    Schema s("R", {{"A", ValueType::Sym}});
    AnalyzedQuery q =
        parse_query("R('a') & (R('b') | R('c'))", s);
    auto clauses = to_cnf(q.root);
    CHECK(clauses.size() == 2);
  }
  SECTION("tautological clause dropped") {
    Schema s("R", {{"A", ValueType::Sym}});
    AnalyzedQuery q = parse_query("R('a') | !R('a')", s);
    CHECK(to_cnf(q.root).empty());
  }
  SECTION("true builtin removes its clause, false builtin its literal") {
    Schema s("R", {{"A", ValueType::Num}});
    CHECK(to_cnf(parse_query("R(1) | 1 = 1", s).root).empty());
    auto clauses = to_cnf(parse_query("R(1) | 1 = 2", s).root);
    REQUIRE(clauses.size() == 1);
    CHECK(clauses[0].positives.size() == 1);
    CHECK(to_cnf(parse_query("1 = 2", s).root).size() == 1);  // empty clause
  }
  SECTION("non-ground input rejected") {
    CHECK_THROWS_AS(to_cnf(pq("Person(n,c,s)").root), InvalidArgument);
  }
}

TEST_CASE("CNF conversion is equivalent on every world", "[queries][cnf][property]") {
  // Exhaustive check: for every subset of the mentioned atoms taken as
  // the world, the input formula and its CNF agree.
  std::mt19937_64 rng(771231);
  Schema s("R", {{"A", ValueType::Sym}, {"B", ValueType::Num}});
  const char* names[] = {"a", "b", "c"};
  auto random_formula = [&](auto&& self, int depth) -> QueryPtr {
    if (depth == 0 || rng() % 3 == 0) {
      if (rng() % 5 == 0) {
        long long l = (long long)(rng() % 3), r = (long long)(rng() % 3);
        return mk_builtin(rng() % 2 ? BuiltinOp::Lt : BuiltinOp::Eq,
                          Term::constant(Value::num(l)),
                          Term::constant(Value::num(r)));
      }
      return mk_rel({Term::constant(Value::sym(names[rng() % 3])),
                     Term::constant(Value::num((long long)(rng() % 2)))});
    }
    switch (rng() % 4) {
      case 0: return mk_not(self(self, depth - 1));
      case 1: return mk_and(self(self, depth - 1), self(self, depth - 1));
      case 2: return mk_or(self(self, depth - 1), self(self, depth - 1));
      default:
        return mk_implies(self(self, depth - 1), self(self, depth - 1));
    }
  };
  for (int round = 0; round < 200; ++round) {
    QueryPtr f = random_formula(random_formula, 3);
    auto clauses = to_cnf(f);
    std::set<Tuple> atoms = reference::mentioned_ground_atoms(f);
    std::vector<Tuple> atom_list(atoms.begin(), atoms.end());
    REQUIRE(atom_list.size() <= 10);
    for (std::uint32_t mask = 0;
         mask < (std::uint32_t(1) << atom_list.size()); ++mask) {
      std::set<Tuple> world;
      for (std::size_t i = 0; i < atom_list.size(); ++i)
        if ((mask >> i) & 1) world.insert(atom_list[i]);
      bool direct = reference::eval_in_world(f, world);
      bool via_cnf = true;
      for (const GroundClause& c : clauses) {
        bool clause_true = false;
        for (const Tuple& t : c.positives)
          if (world.count(t)) {
            clause_true = true;
            break;
          }
        if (!clause_true)
          for (const Tuple& t : c.negatives)
            if (!world.count(t)) {
              clause_true = true;
              break;
            }
        if (!clause_true) {
          via_cnf = false;
          break;
        }
      }
      REQUIRE(direct == via_cnf);
    }
  }
}

TEST_CASE("eval_fo", "[queries][eval]") {
  Instance person = person_instance();
  SECTION("ground fact lookup") {
    CHECK(eval_fo(person,
                  pq("Person('Green','Clarence','4000 Transit')")));
    CHECK_FALSE(eval_fo(person, pq("Person('Green','Clarence','x')")));
  }
  SECTION("contradiction is false on any instance") {
    CHECK_FALSE(eval_fo(
        person, pq("exists n,c,s. Person(n,c,s) & !Person(n,c,s)")));
  }
  SECTION("existential over the active domain") {
    CHECK(eval_fo(person, pq("exists n,c,s. Person(n,c,s) & c = 'Amherst'")));
    CHECK_FALSE(
        eval_fo(person, pq("exists n,c,s. Person(n,c,s) & c = 'Boston'")));
  }
  SECTION("universal guarded by the relation") {
    CHECK(eval_fo(person,
                  pq("forall n,c,s. Person(n,c,s) -> "
                     "(c = 'Amherst' | c = 'Clarence')")));
  }
  SECTION("binding covers free variables") {
    AnalyzedQuery q = pq("exists s. Person(n,c,s)");
    CHECK(eval_fo(person, q,
                  {{"n", Value::sym("Brown")}, {"c", Value::sym("Amherst")}}));
    CHECK_FALSE(eval_fo(person, q,
                        {{"n", Value::sym("Brown")},
                         {"c", Value::sym("Clarence")}}));
    CHECK_THROWS_AS(eval_fo(person, q, {{"n", Value::sym("Brown")}}),
                    InvalidArgument);
  }
  SECTION("quantifier-free ground agrees with direct lookup") {
    for (const Tuple& t : person.tuples()) {
      std::vector<Term> terms;
      for (const Value& v : t.values()) terms.push_back(Term::constant(v));
      AnalyzedQuery q = analyze_query(mk_rel(terms), person.schema());
      CHECK(eval_fo(person, q) == person.contains(t));
    }
  }
}
