// SPDX-License-Identifier: Apache-2.0
// Shared fixtures for the test suites.
#ifndef CQA_TESTS_HELPERS_HPP
#define CQA_TESTS_HELPERS_HPP

#include <string>
#include <vector>

#include "cqa/cqa.hpp"

namespace cqa::testing {

inline const char* kPersonCsv =
    "# relation: Person\n"
    "Name:sym,City:sym,Street:sym\n"
    "Brown,Amherst,115 Klein\n"
    "Brown,Amherst,120 Maple\n"
    "Green,Clarence,4000 Transit\n";

inline Instance person_instance() { return parse_instance(kPersonCsv); }

inline ConstraintSet person_constraints(const Schema& schema) {
  return parse_constraints("fd: Name -> City, Street\n", schema);
}

inline Tuple sym_tuple(const std::vector<std::string>& names) {
  std::vector<Value> vals;
  vals.reserve(names.size());
  for (const std::string& n : names) vals.push_back(Value::sym(n));
  return Tuple(std::move(vals));
}

inline Tuple brown_klein() {
  return sym_tuple({"Brown", "Amherst", "115 Klein"});
}
inline Tuple brown_maple() {
  return sym_tuple({"Brown", "Amherst", "120 Maple"});
}
inline Tuple green_transit() {
  return sym_tuple({"Green", "Clarence", "4000 Transit"});
}

/// The 2n-tuple family with one two-tuple conflict per key: tuples
/// (a_i, b0) and (a_i, b1) for i = 1..n under the FD A -> B, which has
/// exactly 2^n repairs.
inline Instance two_choice_family(std::size_t n) {
  Schema schema("R", {{"A", ValueType::Sym}, {"B", ValueType::Sym}});
  std::vector<Tuple> tuples;
  for (std::size_t i = 1; i <= n; ++i) {
    tuples.push_back(sym_tuple({"a" + std::to_string(i), "b0"}));
    tuples.push_back(sym_tuple({"a" + std::to_string(i), "b1"}));
  }
  return Instance(schema, std::move(tuples));
}

inline ConstraintSet two_choice_constraints(const Schema& schema) {
  return parse_constraints("fd: A -> B\n", schema);
}

}  // namespace cqa::testing

#endif  // CQA_TESTS_HELPERS_HPP
