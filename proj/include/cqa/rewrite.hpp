// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_REWRITE_HPP
#define CQA_REWRITE_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cqa/constraints.hpp"
#include "cqa/errors.hpp"
#include "cqa/query.hpp"

namespace cqa {

// Rewriting engine for the single-FD fragment. A sentence of the shape
//
//   exists t. R(t) & phi(t)        (phi builtin-only)
//
// under exactly one FD X -> Y has a first-order rewriting Q' that is
// true in the original instance iff the sentence is true in every
// repair:
//
//   exists x,y,z forall y1,z1 exists z2
//     [ R(x,y,z) & phi(x,y,z) & (R(x,y1,z1) -> (R(x,y1,z2) & phi(x,y1,z2))) ]
//
// with x on the X positions, y/y1 on the Y positions and z/z1/z2 on the
// remaining positions. Repairs keep, per X-group, exactly one Y-class
// whole, so the sentence holds in all of them iff some X-group has a
// phi-witness in every one of its Y-classes, which is what Q' says.
// Since the schema's attribute order is arbitrary, the relation atoms
// route each variable vector through the attribute permutation.

namespace detail {

inline void check_phi(const QueryPtr& phi, const Schema& schema) {
  if (mentions_relation(phi))
    throw InvalidArgument(
        "the rewriting condition must mention only builtin atoms");
  if (has_quantifier(phi))
    throw InvalidArgument("the rewriting condition must be quantifier-free");
  for (const std::string& v : free_vars(phi))
    if (!schema.index_of(v))
      throw InvalidArgument("condition variable '" + v +
                            "' is not an attribute of relation '" +
                            schema.relation_name() + "'");
}

}  // namespace detail

/// Builds the rewriting Q' for a single FD and a builtin-only condition
/// `phi` whose variables are the schema's attribute names (null phi
/// means "no condition"). The result is a closed query evaluable
/// directly on the inconsistent instance.
inline AnalyzedQuery rewrite_single_fd(const FD& fd, const Schema& schema,
                                       const QueryPtr& phi) {
  if (fd.rhs.empty()) throw InvalidArgument("FD with empty right-hand side");
  for (std::size_t a : fd.lhs)
    if (a >= schema.arity())
      throw InvalidArgument("FD attribute index out of range");
  for (std::size_t a : fd.rhs)
    if (a >= schema.arity())
      throw InvalidArgument("FD attribute index out of range");
  if (phi) detail::check_phi(phi, schema);

  auto member = [](const std::vector<std::size_t>& v, std::size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  // Per-position variable names of the three atom instantiations:
  // witness (x,y,z), universally quantified competitor (x,y1,z1), and
  // the existential completion (x,y1,z2).
  std::vector<std::string> witness(schema.arity()), competitor(schema.arity()),
      completion(schema.arity());
  std::vector<std::string> xs, ys, zs, y1s, z1s, z2s;
  std::size_t xi = 0, yi = 0, zi = 0;
  for (std::size_t p = 0; p < schema.arity(); ++p) {
    if (member(fd.lhs, p)) {
      std::string x = "x" + std::to_string(++xi);
      witness[p] = competitor[p] = completion[p] = x;
      xs.push_back(x);
    } else if (member(fd.rhs, p)) {
      std::string y = "y" + std::to_string(++yi);
      std::string y1 = "u" + std::to_string(yi);
      witness[p] = y;
      competitor[p] = completion[p] = y1;
      ys.push_back(y);
      y1s.push_back(y1);
    } else {
      std::string z = "z" + std::to_string(++zi);
      std::string z1 = "v" + std::to_string(zi);
      std::string z2 = "w" + std::to_string(zi);
      witness[p] = z;
      competitor[p] = z1;
      completion[p] = z2;
      zs.push_back(z);
      z1s.push_back(z1);
      z2s.push_back(z2);
    }
  }

  auto atom_of = [&](const std::vector<std::string>& vars) {
    std::vector<Term> terms;
    terms.reserve(vars.size());
    for (const std::string& v : vars) terms.push_back(Term::var(v));
    return mk_rel(std::move(terms));
  };
  auto phi_of = [&](const std::vector<std::string>& vars) -> QueryPtr {
    if (!phi) return nullptr;
    std::map<std::string, std::string> ren;
    for (std::size_t p = 0; p < schema.arity(); ++p)
      ren[schema.attributes()[p].name] = vars[p];
    return rename_free_vars(phi, ren);
  };

  QueryPtr third = atom_of(completion);
  if (QueryPtr p3 = phi_of(completion)) third = mk_and(third, p3);
  QueryPtr guarded = mk_implies(atom_of(competitor),
                                mk_exists(z2s, std::move(third)));
  QueryPtr matrix = atom_of(witness);
  if (QueryPtr p1 = phi_of(witness)) matrix = mk_and(matrix, p1);
  std::vector<std::string> inner_universal = y1s;
  inner_universal.insert(inner_universal.end(), z1s.begin(), z1s.end());
  matrix = mk_and(matrix, mk_forall(inner_universal, std::move(guarded)));
  std::vector<std::string> outer = xs;
  outer.insert(outer.end(), ys.begin(), ys.end());
  outer.insert(outer.end(), zs.begin(), zs.end());
  QueryPtr root = mk_exists(outer, std::move(matrix));
  return analyze_query(std::move(root), schema);
}

/// Q' for a single-literal existential sentence: extracts phi from the
/// shape, renaming the tuple variables to attribute names.
inline AnalyzedQuery rewrite_single_fd(const FD& fd, const Schema& schema,
                                       const SingleLiteralShape& shape) {
  QueryPtr phi = shape.phi;
  if (phi) {
    std::map<std::string, std::string> ren;
    for (std::size_t p = 0; p < schema.arity(); ++p)
      ren[shape.tuple_vars[p]] = schema.attributes()[p].name;
    phi = rename_free_vars(phi, ren);
  }
  return rewrite_single_fd(fd, schema, phi);
}

}  // namespace cqa

#endif  // CQA_REWRITE_HPP
