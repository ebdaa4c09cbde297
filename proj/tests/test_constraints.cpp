// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqa/reference.hpp"
#include "helpers.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

Schema emp_schema() {
  return Schema("Emp", {{"Name", ValueType::Sym},
                        {"Salary", ValueType::Num},
                        {"Manager", ValueType::Sym}});
}

// Salary bounded by the manager's salary.
ConstraintSet salary_constraints() {
  return parse_constraints(
      "denial: Emp(n,s,m), Emp(m,s2,m2), s > s2\n", emp_schema());
}

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

FD random_fd(std::mt19937_64& rng, const Schema& schema) {
  while (true) {
    std::vector<std::size_t> lhs, rhs;
    for (std::size_t p = 0; p < schema.arity(); ++p) {
      switch (rng() % 3) {
        case 0: lhs.push_back(p); break;
        case 1: rhs.push_back(p); break;
        default: break;
      }
    }
    if (!rhs.empty()) return FD{lhs, rhs};
  }
}

}  // namespace

TEST_CASE("constraint DSL parsing", "[constraints]") {
  Instance person = person_instance();
  SECTION("fd line") {
    ConstraintSet cs = person_constraints(person.schema());
    REQUIRE(cs.fds().size() == 1);
    CHECK(cs.fds()[0].lhs == std::vector<std::size_t>{0});
    CHECK(cs.fds()[0].rhs == (std::vector<std::size_t>{1, 2}));
    // One compiled denial per right-hand attribute.
    CHECK(cs.denials().size() == 2);
    CHECK(cs.raw_denial_count() == 0);
  }
  SECTION("denial line with builtin") {
    ConstraintSet cs = salary_constraints();
    REQUIRE(cs.denials().size() == 1);
    CHECK(cs.denials()[0].literals.size() == 2);
    CHECK(cs.denials()[0].builtins.size() == 1);
  }
  SECTION("no relation literal rejected") {
    CHECK_THROWS_AS(parse_constraints("denial: s > s2\n", emp_schema()),
                    ParseError);
  }
  SECTION("unknown attribute rejected") {
    CHECK_THROWS_AS(
        parse_constraints("fd: Nome -> City\n", person.schema()),
        ParseError);
  }
  SECTION("type clash rejected") {
    // Order comparison between sym positions.
    CHECK_THROWS_AS(
        parse_constraints("denial: Emp(n,s,m), n > m\n", emp_schema()),
        ParseError);
  }
  SECTION("unsafe builtin variable rejected") {
    CHECK_THROWS_AS(
        parse_constraints("denial: Emp(n,s,m), s > s9\n", emp_schema()),
        ParseError);
  }
  SECTION("constants allowed inside literals") {
    ConstraintSet cs = parse_constraints(
        "denial: Emp('root', s, m), s > 100\n", emp_schema());
    Instance r = parse_instance(
        "# relation: Emp\nName:sym,Salary:num,Manager:sym\nroot,200,root\n");
    CHECK_FALSE(is_consistent(r, cs));
    Instance ok = parse_instance(
        "# relation: Emp\nName:sym,Salary:num,Manager:sym\nroot,50,root\n");
    CHECK(is_consistent(ok, cs));
  }
  SECTION("comments and blank lines") {
    ConstraintSet cs = parse_constraints("# nothing\n\nfd: Name -> City\n",
                                         person.schema());
    CHECK(cs.fds().size() == 1);
  }
}

TEST_CASE("fd compilation to denial form", "[constraints]") {
  Schema s3("R", {{"A", ValueType::Sym},
                  {"B", ValueType::Sym},
                  {"C", ValueType::Sym}});
  SECTION("one denial per right-hand attribute") {
    auto ds = fd_to_denial(FD{{0}, {1, 2}}, s3);
    REQUIRE(ds.size() == 2);
    for (const auto& d : ds) {
      CHECK(d.literals.size() == 2);
      REQUIRE(d.builtins.size() == 1);
      CHECK(d.builtins[0].op == BuiltinOp::Ne);
      // X position is tied by one shared variable.
      CHECK(d.literals[0][0] == d.literals[1][0]);
    }
  }
  SECTION("compiled form flags the person violation") {
    Instance person = person_instance();
    auto ds = fd_to_denial(FD{{0}, {1, 2}}, person.schema());
    std::set<std::vector<Tuple>> direct;
    for (const auto& d : ds)
      for (const auto& v : violations(person, d)) direct.insert(v);
    REQUIRE(direct.size() == 1);
    CHECK(*direct.begin() ==
          (std::vector<Tuple>{brown_klein(), brown_maple()}));
  }
}

TEST_CASE("violations", "[constraints]") {
  SECTION("person fd: exactly the two brown tuples") {
    Instance person = person_instance();
    ConstraintSet cs = person_constraints(person.schema());
    std::set<std::vector<Tuple>> all;
    for (const auto& d : cs.denials())
      for (const auto& v : violations(person, d)) all.insert(v);
    REQUIRE(all.size() == 1);
    CHECK(*all.begin() == (std::vector<Tuple>{brown_klein(), brown_maple()}));
  }
  SECTION("consistent instance has none") {
    Instance r = parse_instance(
        "# relation: Person\nName:sym,City:sym,Street:sym\n"
        "Brown,Amherst,115 Klein\nGreen,Clarence,4000 Transit\n");
    ConstraintSet cs = person_constraints(r.schema());
    for (const auto& d : cs.denials()) CHECK(violations(r, d).empty());
  }
  SECTION("salary constraint on a two-tuple instance") {
    Instance r = parse_instance(
        "# relation: Emp\nName:sym,Salary:num,Manager:sym\n"
        "a,10,b\nb,5,c\n");
    ConstraintSet cs = salary_constraints();
    auto vs = violations(r, cs.denials()[0]);
    // Hand evaluation: 10 > 5 across the manager link; the naive
    // all-substitutions scan agrees.
    REQUIRE(vs.size() == 1);
    CHECK(vs.begin()->size() == 2);
    CHECK_FALSE(reference::satisfies_denial(r, cs.denials()[0]));
  }
  SECTION("single-literal constraint yields singleton violations") {
    Schema s("R", {{"A", ValueType::Sym},
                   {"B", ValueType::Sym},
                   {"C", ValueType::Sym}});
    ConstraintSet cs = parse_constraints("denial: R(x,x,z)\n", s);
    Instance r = parse_instance("A:sym,B:sym,C:sym\na,a,b\na,b,b\n");
    auto vs = violations(r, cs.denials()[0]);
    REQUIRE(vs.size() == 1);
    CHECK(vs.begin()->size() == 1);
  }
  SECTION("non-injective substitution collapses to a smaller set") {
    // Both literals may map onto the same tuple.
    Schema s("R", {{"A", ValueType::Num}, {"B", ValueType::Num}});
    ConstraintSet cs = parse_constraints("denial: R(x,y), R(y,x), x > y\n", s);
    Instance r = parse_instance("A:num,B:num\n3,1\n1,3\n");
    auto vs = violations(r, cs.denials()[0]);
    REQUIRE(vs.size() == 1);
    CHECK(vs.begin()->size() == 2);
  }
}

TEST_CASE("is_consistent", "[constraints]") {
  Instance person = person_instance();
  ConstraintSet cs = person_constraints(person.schema());
  SECTION("person instance violates its fd") {
    CHECK_FALSE(is_consistent(person, cs));
  }
  SECTION("dropping the first tuple restores consistency") {
    Instance r = person.restrict_to({1, 2});
    REQUIRE(r.size() == 2);
    CHECK(is_consistent(r, cs));
  }
  SECTION("empty instance is vacuously consistent") {
    Instance r = parse_instance(
        "# relation: Person\nName:sym,City:sym,Street:sym\n");
    CHECK(is_consistent(r, cs));
  }
}

TEST_CASE("fd violations match the textbook definition", "[constraints][property]") {
  std::mt19937_64 rng(987501);
  for (int round = 0; round < 120; ++round) {
    Instance r = random_instance(rng, 8);
    FD fd = random_fd(rng, r.schema());
    bool via_denials = true;
    for (const auto& d : fd_to_denial(fd, r.schema()))
      if (!violations(r, d).empty()) via_denials = false;
    CHECK(via_denials == reference::satisfies_fd_directly(r, fd));
  }
}

TEST_CASE("violations are monotone under instance growth", "[constraints][property]") {
  std::mt19937_64 rng(52673);
  Schema schema("R", {{"A", ValueType::Sym},
                      {"B", ValueType::Sym},
                      {"C", ValueType::Num}});
  ConstraintSet cs = parse_constraints(
      "denial: R(x,y,n), R(y,x,n2), n >= n2\nfd: A -> B\n", schema);
  for (int round = 0; round < 60; ++round) {
    Instance big = random_instance(rng, 8);
    // Random sub-instance.
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < big.size(); ++i)
      if (rng() % 2) kept.push_back(i);
    Instance small = big.restrict_to(kept);
    for (const auto& d : cs.denials()) {
      auto vs = violations(small, d);
      auto vb = violations(big, d);
      for (const auto& v : vs) {
        CHECK(vb.count(v) == 1);
        CHECK(v.size() >= 1);
        CHECK(v.size() <= d.literals.size());
      }
    }
  }
}
