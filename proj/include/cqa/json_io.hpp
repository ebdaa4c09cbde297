// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_JSON_IO_HPP
#define CQA_JSON_IO_HPP

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>

#include "cqa/hypergraph.hpp"
#include "cqa/model.hpp"
#include "cqa/query.hpp"

namespace cqa {

using Json = nlohmann::json;

/// Numbers fitting a 64-bit integer stay JSON numbers; anything larger
/// is emitted as a decimal string.
inline Json value_to_json(const Value& v) {
  if (v.is_sym()) return Json(v.sym_name());
  const Int& n = v.num_value();
  if (n >= std::numeric_limits<std::int64_t>::min() &&
      n <= std::numeric_limits<std::int64_t>::max())
    return Json(static_cast<std::int64_t>(n));
  return Json(n.str());
}

inline Json tuple_to_json(const Tuple& t) {
  Json arr = Json::array();
  for (const Value& v : t.values()) arr.push_back(value_to_json(v));
  return arr;
}

inline Json term_to_json(const Term& t) {
  if (t.is_var()) return Json{{"var", t.var_name()}};
  return Json{{"const", value_to_json(t.value())}};
}

/// Structural JSON dump of a query AST, for debugging.
inline Json query_to_json(const QueryPtr& q) {
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    Json terms = Json::array();
    for (const Term& t : r->terms) terms.push_back(term_to_json(t));
    return Json{{"rel", terms}};
  }
  if (auto* b = std::get_if<BuiltinAtom>(&q->node))
    return Json{{"builtin", {{"op", to_string(b->op)},
                             {"lhs", term_to_json(b->lhs)},
                             {"rhs", term_to_json(b->rhs)}}}};
  if (auto* n = std::get_if<Not>(&q->node))
    return Json{{"not", query_to_json(n->body)}};
  if (auto* a = std::get_if<And>(&q->node))
    return Json{{"and", {query_to_json(a->lhs), query_to_json(a->rhs)}}};
  if (auto* o = std::get_if<Or>(&q->node))
    return Json{{"or", {query_to_json(o->lhs), query_to_json(o->rhs)}}};
  if (auto* im = std::get_if<Implies>(&q->node))
    return Json{{"implies", {query_to_json(im->lhs), query_to_json(im->rhs)}}};
  if (auto* e = std::get_if<Exists>(&q->node))
    return Json{{"exists", {{"vars", e->vars}, {"body", query_to_json(e->body)}}}};
  const auto& f = std::get<Forall>(q->node);
  return Json{{"forall", {{"vars", f.vars}, {"body", query_to_json(f.body)}}}};
}

inline Json stats_to_json(const HypergraphStats& st) {
  Json hist = Json::object();
  for (auto [size, count] : st.edge_size_histogram)
    hist[std::to_string(size)] = count;
  return Json{{"vertices", st.vertex_count},
              {"edges", st.edge_count},
              {"edge_size_histogram", hist},
              {"isolated_vertices", st.isolated_vertex_count}};
}

}  // namespace cqa

#endif  // CQA_JSON_IO_HPP
