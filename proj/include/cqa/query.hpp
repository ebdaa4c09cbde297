// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_QUERY_HPP
#define CQA_QUERY_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/model.hpp"
#include "cqa/term.hpp"

namespace cqa {

struct Query;
using QueryPtr = std::shared_ptr<const Query>;

struct RelAtom {
  std::vector<Term> terms;
};
struct Not {
  QueryPtr body;
};
struct And {
  QueryPtr lhs, rhs;
};
struct Or {
  QueryPtr lhs, rhs;
};
struct Implies {
  QueryPtr lhs, rhs;
};
struct Exists {
  std::vector<std::string> vars;
  QueryPtr body;
};
struct Forall {
  std::vector<std::string> vars;
  QueryPtr body;
};

/// One node of a first-order query over the single relation symbol and
/// the builtin comparisons. Trees are immutable and shared freely.
struct Query {
  std::variant<RelAtom, BuiltinAtom, Not, And, Or, Implies, Exists, Forall>
      node;
};

// Node builders.
inline QueryPtr mk_rel(std::vector<Term> terms) {
  return std::make_shared<Query>(Query{RelAtom{std::move(terms)}});
}
inline QueryPtr mk_builtin(BuiltinOp op, Term lhs, Term rhs) {
  return std::make_shared<Query>(
      Query{BuiltinAtom{op, std::move(lhs), std::move(rhs)}});
}
inline QueryPtr mk_builtin(BuiltinAtom atom) {
  return std::make_shared<Query>(Query{std::move(atom)});
}
inline QueryPtr mk_not(QueryPtr body) {
  return std::make_shared<Query>(Query{Not{std::move(body)}});
}
inline QueryPtr mk_and(QueryPtr lhs, QueryPtr rhs) {
  return std::make_shared<Query>(Query{And{std::move(lhs), std::move(rhs)}});
}
inline QueryPtr mk_or(QueryPtr lhs, QueryPtr rhs) {
  return std::make_shared<Query>(Query{Or{std::move(lhs), std::move(rhs)}});
}
inline QueryPtr mk_implies(QueryPtr lhs, QueryPtr rhs) {
  return std::make_shared<Query>(
      Query{Implies{std::move(lhs), std::move(rhs)}});
}
inline QueryPtr mk_exists(std::vector<std::string> vars, QueryPtr body) {
  if (vars.empty()) return body;
  return std::make_shared<Query>(
      Query{Exists{std::move(vars), std::move(body)}});
}
inline QueryPtr mk_forall(std::vector<std::string> vars, QueryPtr body) {
  if (vars.empty()) return body;
  return std::make_shared<Query>(
      Query{Forall{std::move(vars), std::move(body)}});
}

/// Conjunction of many conjuncts (null for the empty conjunction).
inline QueryPtr mk_and_all(const std::vector<QueryPtr>& conjuncts) {
  QueryPtr acc;
  for (const QueryPtr& c : conjuncts) acc = acc ? mk_and(acc, c) : c;
  return acc;
}

// ---------------------------------------------------------------------------
// Structural queries over the AST

namespace detail {

template <typename FAtomRel, typename FAtomBuiltin>
void visit_atoms(const QueryPtr& q, FAtomRel&& on_rel,
                 FAtomBuiltin&& on_builtin) {
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    on_rel(*r);
  } else if (auto* b = std::get_if<BuiltinAtom>(&q->node)) {
    on_builtin(*b);
  } else if (auto* n = std::get_if<Not>(&q->node)) {
    visit_atoms(n->body, on_rel, on_builtin);
  } else if (auto* a = std::get_if<And>(&q->node)) {
    visit_atoms(a->lhs, on_rel, on_builtin);
    visit_atoms(a->rhs, on_rel, on_builtin);
  } else if (auto* o = std::get_if<Or>(&q->node)) {
    visit_atoms(o->lhs, on_rel, on_builtin);
    visit_atoms(o->rhs, on_rel, on_builtin);
  } else if (auto* im = std::get_if<Implies>(&q->node)) {
    visit_atoms(im->lhs, on_rel, on_builtin);
    visit_atoms(im->rhs, on_rel, on_builtin);
  } else if (auto* e = std::get_if<Exists>(&q->node)) {
    visit_atoms(e->body, on_rel, on_builtin);
  } else if (auto* f = std::get_if<Forall>(&q->node)) {
    visit_atoms(f->body, on_rel, on_builtin);
  }
}

inline void collect_free_vars(const QueryPtr& q,
                              std::set<std::string>& bound,
                              std::vector<std::string>& order,
                              std::set<std::string>& seen) {
  auto on_term = [&](const Term& t) {
    if (t.is_var() && !bound.count(t.var_name()) &&
        !seen.count(t.var_name())) {
      seen.insert(t.var_name());
      order.push_back(t.var_name());
    }
  };
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    for (const Term& t : r->terms) on_term(t);
  } else if (auto* b = std::get_if<BuiltinAtom>(&q->node)) {
    on_term(b->lhs);
    on_term(b->rhs);
  } else if (auto* n = std::get_if<Not>(&q->node)) {
    collect_free_vars(n->body, bound, order, seen);
  } else if (auto* a = std::get_if<And>(&q->node)) {
    collect_free_vars(a->lhs, bound, order, seen);
    collect_free_vars(a->rhs, bound, order, seen);
  } else if (auto* o = std::get_if<Or>(&q->node)) {
    collect_free_vars(o->lhs, bound, order, seen);
    collect_free_vars(o->rhs, bound, order, seen);
  } else if (auto* im = std::get_if<Implies>(&q->node)) {
    collect_free_vars(im->lhs, bound, order, seen);
    collect_free_vars(im->rhs, bound, order, seen);
  } else if (auto* e = std::get_if<Exists>(&q->node)) {
    std::vector<std::string> added;
    for (const std::string& v : e->vars)
      if (bound.insert(v).second) added.push_back(v);
    collect_free_vars(e->body, bound, order, seen);
    for (const std::string& v : added) bound.erase(v);
  } else if (auto* f = std::get_if<Forall>(&q->node)) {
    std::vector<std::string> added;
    for (const std::string& v : f->vars)
      if (bound.insert(v).second) added.push_back(v);
    collect_free_vars(f->body, bound, order, seen);
    for (const std::string& v : added) bound.erase(v);
  }
}

}  // namespace detail

/// Free variables in order of first occurrence.
inline std::vector<std::string> free_vars(const QueryPtr& q) {
  std::set<std::string> bound, seen;
  std::vector<std::string> order;
  detail::collect_free_vars(q, bound, order, seen);
  return order;
}

inline bool has_quantifier(const QueryPtr& q) {
  if (std::holds_alternative<Exists>(q->node) ||
      std::holds_alternative<Forall>(q->node))
    return true;
  if (auto* n = std::get_if<Not>(&q->node)) return has_quantifier(n->body);
  if (auto* a = std::get_if<And>(&q->node))
    return has_quantifier(a->lhs) || has_quantifier(a->rhs);
  if (auto* o = std::get_if<Or>(&q->node))
    return has_quantifier(o->lhs) || has_quantifier(o->rhs);
  if (auto* im = std::get_if<Implies>(&q->node))
    return has_quantifier(im->lhs) || has_quantifier(im->rhs);
  return false;
}

inline bool mentions_relation(const QueryPtr& q) {
  bool found = false;
  detail::visit_atoms(
      q, [&](const RelAtom&) { found = true; }, [](const BuiltinAtom&) {});
  return found;
}

// ---------------------------------------------------------------------------
// Typing

/// Infers a type for every variable from relation-literal positions and
/// builtin atoms, and checks all atoms against the schema. Variables
/// whose type cannot be determined map to nullopt.
inline std::map<std::string, std::optional<ValueType>> infer_var_types(
    const QueryPtr& q, const Schema& schema) {
  std::map<std::string, std::optional<ValueType>> types;
  std::vector<const BuiltinAtom*> builtins;
  detail::visit_atoms(
      q,
      [&](const RelAtom& r) {
        if (r.terms.size() != schema.arity())
          throw TypeError("relation atom has " +
                          std::to_string(r.terms.size()) +
                          " terms, schema has arity " +
                          std::to_string(schema.arity()));
        for (std::size_t p = 0; p < r.terms.size(); ++p) {
          ValueType want = schema.type_of(p);
          const Term& t = r.terms[p];
          if (t.is_const()) {
            if (t.value().type() != want)
              throw TypeError("constant " + t.str() + " in a " +
                              std::string(to_string(want)) + " position");
          } else {
            auto& slot = types[t.var_name()];
            if (slot && *slot != want)
              throw TypeError("variable '" + t.var_name() +
                              "' occupies both sym and num positions");
            slot = want;
          }
        }
      },
      [&](const BuiltinAtom& b) {
        builtins.push_back(&b);
        if (b.lhs.is_var()) types.emplace(b.lhs.var_name(), std::nullopt);
        if (b.rhs.is_var()) types.emplace(b.rhs.var_name(), std::nullopt);
      });

  // Propagate builtin typing to a fixpoint: '=' and '!=' link both
  // sides' types, order comparisons force numbers.
  auto term_type = [&](const Term& t) -> std::optional<ValueType> {
    if (t.is_const()) return t.value().type();
    return types[t.var_name()];
  };
  auto assign = [&](const Term& t, ValueType vt, bool& changed) {
    if (t.is_const()) {
      if (t.value().type() != vt)
        throw TypeError("builtin atom compares a sym with a num near " +
                        t.str());
      return;
    }
    auto& slot = types[t.var_name()];
    if (!slot) {
      slot = vt;
      changed = true;
    } else if (*slot != vt) {
      throw TypeError("variable '" + t.var_name() +
                      "' is used as both sym and num");
    }
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const BuiltinAtom* b : builtins) {
      if (is_order_op(b->op)) {
        assign(b->lhs, ValueType::Num, changed);
        assign(b->rhs, ValueType::Num, changed);
      }
      auto lt = term_type(b->lhs), rt = term_type(b->rhs);
      if (lt && !rt) assign(b->rhs, *lt, changed);
      if (rt && !lt) assign(b->lhs, *rt, changed);
      if (lt && rt && *lt != *rt)
        throw TypeError("builtin atom " + b->str() +
                        " compares a sym with a num");
    }
  }
  return types;
}

// ---------------------------------------------------------------------------
// Fragment classification

enum class Fragment {
  GroundQuantifierFree,
  OpenQuantifierFree,
  SingleLiteralExistential,
  General,
};

inline const char* to_string(Fragment f) {
  switch (f) {
    case Fragment::GroundQuantifierFree: return "ground-quantifier-free";
    case Fragment::OpenQuantifierFree: return "open-quantifier-free";
    case Fragment::SingleLiteralExistential:
      return "single-literal-existential";
    case Fragment::General: return "general";
  }
  return "?";
}

/// Shape data of a single-literal existential sentence
/// "exists t. R(t) & phi(t)": the variable at each schema position and
/// the builtin-only condition (null when absent).
struct SingleLiteralShape {
  std::vector<std::string> tuple_vars;
  QueryPtr phi;
};

namespace detail {

inline void flatten_and(const QueryPtr& q, std::vector<QueryPtr>& out) {
  if (auto* a = std::get_if<And>(&q->node)) {
    flatten_and(a->lhs, out);
    flatten_and(a->rhs, out);
  } else {
    out.push_back(q);
  }
}

// Matches "exists v1..vk. R(v1,..,vk) & phi" where the relation atom
// uses each quantified variable exactly once, the quantifier list is
// exactly the atom's variables, and phi mentions only builtins.
inline std::optional<SingleLiteralShape> match_single_literal(
    const QueryPtr& q) {
  const auto* ex = std::get_if<Exists>(&q->node);
  if (!ex) return std::nullopt;
  // Merge directly nested exists blocks.
  std::vector<std::string> vars = ex->vars;
  QueryPtr body = ex->body;
  while (const auto* inner = std::get_if<Exists>(&body->node)) {
    vars.insert(vars.end(), inner->vars.begin(), inner->vars.end());
    body = inner->body;
  }
  std::vector<QueryPtr> conjuncts;
  flatten_and(body, conjuncts);
  const RelAtom* atom = nullptr;
  std::vector<QueryPtr> phi_parts;
  for (const QueryPtr& c : conjuncts) {
    if (auto* r = std::get_if<RelAtom>(&c->node)) {
      if (atom) return std::nullopt;  // more than one relation literal
      atom = r;
    } else {
      if (mentions_relation(c) || has_quantifier(c)) return std::nullopt;
      phi_parts.push_back(c);
    }
  }
  if (!atom) return std::nullopt;
  std::set<std::string> distinct;
  SingleLiteralShape shape;
  for (const Term& t : atom->terms) {
    if (!t.is_var()) return std::nullopt;
    if (!distinct.insert(t.var_name()).second) return std::nullopt;
    shape.tuple_vars.push_back(t.var_name());
  }
  std::set<std::string> quantified(vars.begin(), vars.end());
  if (quantified != distinct || quantified.size() != vars.size())
    return std::nullopt;
  shape.phi = mk_and_all(phi_parts);
  if (shape.phi)
    for (const std::string& v : free_vars(shape.phi))
      if (!quantified.count(v)) return std::nullopt;
  return shape;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Substitution

/// Replaces free occurrences of the substituted variables by constants.
inline QueryPtr substitute(const QueryPtr& q, const Binding& subst) {
  auto sub_term = [&](const Term& t) -> Term {
    if (t.is_var()) {
      auto it = subst.find(t.var_name());
      if (it != subst.end()) return Term::constant(it->second);
    }
    return t;
  };
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    std::vector<Term> terms;
    terms.reserve(r->terms.size());
    for (const Term& t : r->terms) terms.push_back(sub_term(t));
    return mk_rel(std::move(terms));
  }
  if (auto* b = std::get_if<BuiltinAtom>(&q->node))
    return mk_builtin(b->op, sub_term(b->lhs), sub_term(b->rhs));
  if (auto* n = std::get_if<Not>(&q->node))
    return mk_not(substitute(n->body, subst));
  if (auto* a = std::get_if<And>(&q->node))
    return mk_and(substitute(a->lhs, subst), substitute(a->rhs, subst));
  if (auto* o = std::get_if<Or>(&q->node))
    return mk_or(substitute(o->lhs, subst), substitute(o->rhs, subst));
  if (auto* im = std::get_if<Implies>(&q->node))
    return mk_implies(substitute(im->lhs, subst), substitute(im->rhs, subst));
  if (auto* e = std::get_if<Exists>(&q->node)) {
    Binding inner = subst;
    for (const std::string& v : e->vars) inner.erase(v);
    return mk_exists(e->vars, substitute(e->body, inner));
  }
  const auto& f = std::get<Forall>(q->node);
  Binding inner = subst;
  for (const std::string& v : f.vars) inner.erase(v);
  return mk_forall(f.vars, substitute(f.body, inner));
}

/// Renames free variable occurrences (simultaneously, so swaps work).
inline QueryPtr rename_free_vars(const QueryPtr& q,
                                 const std::map<std::string, std::string>& m) {
  auto ren_term = [&](const Term& t) -> Term {
    if (t.is_var()) {
      auto it = m.find(t.var_name());
      if (it != m.end()) return Term::var(it->second);
    }
    return t;
  };
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    std::vector<Term> terms;
    terms.reserve(r->terms.size());
    for (const Term& t : r->terms) terms.push_back(ren_term(t));
    return mk_rel(std::move(terms));
  }
  if (auto* b = std::get_if<BuiltinAtom>(&q->node))
    return mk_builtin(b->op, ren_term(b->lhs), ren_term(b->rhs));
  if (auto* n = std::get_if<Not>(&q->node))
    return mk_not(rename_free_vars(n->body, m));
  if (auto* a = std::get_if<And>(&q->node))
    return mk_and(rename_free_vars(a->lhs, m), rename_free_vars(a->rhs, m));
  if (auto* o = std::get_if<Or>(&q->node))
    return mk_or(rename_free_vars(o->lhs, m), rename_free_vars(o->rhs, m));
  if (auto* im = std::get_if<Implies>(&q->node))
    return mk_implies(rename_free_vars(im->lhs, m),
                      rename_free_vars(im->rhs, m));
  if (auto* e = std::get_if<Exists>(&q->node)) {
    std::map<std::string, std::string> inner = m;
    for (const std::string& v : e->vars) inner.erase(v);
    return mk_exists(e->vars, rename_free_vars(e->body, inner));
  }
  const auto& f = std::get<Forall>(q->node);
  std::map<std::string, std::string> inner = m;
  for (const std::string& v : f.vars) inner.erase(v);
  return mk_forall(f.vars, rename_free_vars(f.body, inner));
}

// ---------------------------------------------------------------------------
// Analysis wrapper

/// A query together with everything derived from it: free variables (in
/// first-occurrence order), inferred variable types, and its fragment.
struct AnalyzedQuery {
  QueryPtr root;
  Schema schema;
  std::vector<std::string> free;
  std::map<std::string, std::optional<ValueType>> var_types;
  Fragment fragment = Fragment::General;
  std::optional<SingleLiteralShape> single_literal;

  bool is_sentence() const { return free.empty(); }
};

/// Validates and classifies a query AST against the schema.
inline AnalyzedQuery analyze_query(QueryPtr root, const Schema& schema) {
  AnalyzedQuery aq{std::move(root), schema,           {},
                   {},              Fragment::General, std::nullopt};
  aq.var_types = infer_var_types(aq.root, schema);
  aq.free = free_vars(aq.root);
  bool quant = has_quantifier(aq.root);
  if (!quant) {
    aq.fragment = aq.free.empty() ? Fragment::GroundQuantifierFree
                                  : Fragment::OpenQuantifierFree;
  } else if (aq.free.empty()) {
    if (auto shape = detail::match_single_literal(aq.root)) {
      aq.fragment = Fragment::SingleLiteralExistential;
      aq.single_literal = std::move(shape);
    } else {
      aq.fragment = Fragment::General;
    }
  } else {
    aq.fragment = Fragment::General;
  }
  return aq;
}

/// Grounds an open query with constants for its free variables.
inline AnalyzedQuery ground(const AnalyzedQuery& q, const Binding& subst) {
  for (const std::string& v : q.free)
    if (!subst.count(v))
      throw InvalidArgument("substitution does not bind free variable '" + v +
                            "'");
  return analyze_query(substitute(q.root, subst), q.schema);
}

// ---------------------------------------------------------------------------
// Printing (re-parseable DSL form)

namespace detail {

// Precedence: implies 1, or 2, and 3, unary 4, atom 5.
inline void print_query(std::ostream& os, const QueryPtr& q,
                        const std::string& rel, int ctx) {
  auto paren = [&](int level, auto&& body) {
    if (level < ctx) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  if (auto* r = std::get_if<RelAtom>(&q->node)) {
    os << rel << "(";
    for (std::size_t i = 0; i < r->terms.size(); ++i) {
      if (i) os << ",";
      os << r->terms[i].str();
    }
    os << ")";
  } else if (auto* b = std::get_if<BuiltinAtom>(&q->node)) {
    os << b->str();
  } else if (auto* n = std::get_if<Not>(&q->node)) {
    os << "!";
    print_query(os, n->body, rel, 5);
  } else if (auto* a = std::get_if<And>(&q->node)) {
    paren(3, [&] {
      print_query(os, a->lhs, rel, 3);
      os << " & ";
      print_query(os, a->rhs, rel, 3);
    });
  } else if (auto* o = std::get_if<Or>(&q->node)) {
    paren(2, [&] {
      print_query(os, o->lhs, rel, 2);
      os << " | ";
      print_query(os, o->rhs, rel, 2);
    });
  } else if (auto* im = std::get_if<Implies>(&q->node)) {
    paren(1, [&] {
      print_query(os, im->lhs, rel, 2);  // implies is right-associative
      os << " -> ";
      print_query(os, im->rhs, rel, 1);
    });
  } else if (auto* e = std::get_if<Exists>(&q->node)) {
    paren(1, [&] {
      os << "exists ";
      for (std::size_t i = 0; i < e->vars.size(); ++i)
        os << (i ? "," : "") << e->vars[i];
      os << ". ";
      print_query(os, e->body, rel, 1);
    });
  } else if (auto* f = std::get_if<Forall>(&q->node)) {
    paren(1, [&] {
      os << "forall ";
      for (std::size_t i = 0; i < f->vars.size(); ++i)
        os << (i ? "," : "") << f->vars[i];
      os << ". ";
      print_query(os, f->body, rel, 1);
    });
  }
}

}  // namespace detail

/// DSL text for a query; parses back to the same tree.
inline std::string to_dsl(const QueryPtr& q,
                          const std::string& relation_name) {
  std::ostringstream os;
  detail::print_query(os, q, relation_name, 1);
  return os.str();
}

}  // namespace cqa

#endif  // CQA_QUERY_HPP
