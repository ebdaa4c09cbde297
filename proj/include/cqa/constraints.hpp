// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_CONSTRAINTS_HPP
#define CQA_CONSTRAINTS_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/lex.hpp"
#include "cqa/model.hpp"
#include "cqa/term.hpp"

namespace cqa {

/// A denial constraint: the negated conjunction of one or more relation
/// literals and a conjunction of builtin atoms over their variables.
/// Literal patterns have one term per schema position.
struct DenialConstraint {
  std::vector<std::vector<Term>> literals;
  std::vector<BuiltinAtom> builtins;

  std::size_t literal_count() const { return literals.size(); }

  std::string str(const std::string& relation_name) const {
    std::ostringstream os;
    os << "denial: ";
    bool first = true;
    for (const auto& lit : literals) {
      if (!first) os << ", ";
      first = false;
      os << relation_name << "(";
      for (std::size_t i = 0; i < lit.size(); ++i) {
        if (i) os << ",";
        os << lit[i].str();
      }
      os << ")";
    }
    for (const auto& b : builtins) os << ", " << b.str();
    return os.str();
  }
};

/// A functional dependency X -> Y, held as attribute positions.
struct FD {
  std::vector<std::size_t> lhs;  // sorted
  std::vector<std::size_t> rhs;  // sorted, nonempty, disjoint from lhs

  std::string str(const Schema& schema) const {
    std::ostringstream os;
    os << "fd: ";
    for (std::size_t i = 0; i < lhs.size(); ++i)
      os << (i ? ", " : "") << schema.attributes()[lhs[i]].name;
    os << " -> ";
    for (std::size_t i = 0; i < rhs.size(); ++i)
      os << (i ? ", " : "") << schema.attributes()[rhs[i]].name;
    return os.str();
  }
};

namespace detail {

// Infers per-variable types from literal positions and checks every
// constant against its position's type.
inline std::map<std::string, ValueType> literal_var_types(
    const std::vector<std::vector<Term>>& literals, const Schema& schema) {
  std::map<std::string, ValueType> types;
  for (const auto& lit : literals) {
    if (lit.size() != schema.arity())
      throw TypeError("relation literal has " + std::to_string(lit.size()) +
                      " terms, schema has arity " +
                      std::to_string(schema.arity()));
    for (std::size_t p = 0; p < lit.size(); ++p) {
      ValueType want = schema.type_of(p);
      if (lit[p].is_const()) {
        if (lit[p].value().type() != want)
          throw TypeError("constant " + lit[p].str() + " in a " +
                          std::string(to_string(want)) + " position");
      } else {
        auto [it, inserted] = types.emplace(lit[p].var_name(), want);
        if (!inserted && it->second != want)
          throw TypeError("variable '" + lit[p].var_name() +
                          "' occupies both sym and num positions");
      }
    }
  }
  return types;
}

inline ValueType type_of_term(const Term& t,
                              const std::map<std::string, ValueType>& types,
                              const char* context) {
  if (t.is_const()) return t.value().type();
  auto it = types.find(t.var_name());
  if (it == types.end())
    throw TypeError("variable '" + t.var_name() + "' in " + context +
                    " does not appear in any relation literal");
  return it->second;
}

}  // namespace detail

/// Validates a denial constraint against a schema: at least one literal,
/// safe builtin variables, consistent typing, order comparisons on
/// numbers only.
inline void validate_constraint(const DenialConstraint& c,
                                const Schema& schema) {
  if (c.literals.empty())
    throw ParseError("constraint has no relation literal");
  auto types = detail::literal_var_types(c.literals, schema);
  for (const BuiltinAtom& b : c.builtins) {
    ValueType lt = detail::type_of_term(b.lhs, types, "builtin atom");
    ValueType rt = detail::type_of_term(b.rhs, types, "builtin atom");
    if (lt != rt)
      throw TypeError("builtin atom " + b.str() +
                      " compares a sym with a num");
    if (is_order_op(b.op) && lt == ValueType::Sym)
      throw TypeError("builtin atom " + b.str() +
                      " applies an order comparison to symbols");
  }
}

/// Compiles an FD into its denial form: one two-literal constraint per
/// right-hand attribute, with the X positions tied by shared variables
/// and a disequality on the attribute.
inline std::vector<DenialConstraint> fd_to_denial(const FD& fd,
                                                  const Schema& schema) {
  if (fd.rhs.empty()) throw InvalidArgument("FD with empty right-hand side");
  for (std::size_t a : fd.lhs)
    for (std::size_t b : fd.rhs)
      if (a == b)
        throw InvalidArgument("FD sides share attribute '" +
                              schema.attributes()[a].name + "'");
  for (std::size_t a : fd.lhs)
    if (a >= schema.arity())
      throw InvalidArgument("FD attribute index out of range");
  for (std::size_t a : fd.rhs)
    if (a >= schema.arity())
      throw InvalidArgument("FD attribute index out of range");
  auto in = [](const std::vector<std::size_t>& v, std::size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  std::vector<DenialConstraint> out;
  for (std::size_t target : fd.rhs) {
    DenialConstraint c;
    std::vector<Term> first, second;
    for (std::size_t p = 0; p < schema.arity(); ++p) {
      std::string idx = std::to_string(p + 1);
      if (in(fd.lhs, p)) {
        first.push_back(Term::var("x" + idx));
        second.push_back(Term::var("x" + idx));
      } else {
        first.push_back(Term::var("y" + idx));
        second.push_back(Term::var("z" + idx));
      }
    }
    c.builtins.push_back(BuiltinAtom{BuiltinOp::Ne,
                                     first[target], second[target]});
    c.literals.push_back(std::move(first));
    c.literals.push_back(std::move(second));
    out.push_back(std::move(c));
  }
  return out;
}

/// All constraints in force over one schema. FDs declared in the DSL are
/// kept both in FD form (for the rewriting engine) and compiled into
/// denial form alongside the raw denial constraints. Immutable after
/// construction.
class ConstraintSet {
public:
  explicit ConstraintSet(Schema schema) : schema_(std::move(schema)) {}

  static ConstraintSet of_fds(const Schema& schema,
                              const std::vector<FD>& fds) {
    ConstraintSet cs(schema);
    for (const FD& fd : fds) cs.add_fd(fd);
    return cs;
  }

  void add_fd(const FD& fd) {
    for (DenialConstraint& d : fd_to_denial(fd, schema_)) {
      validate_constraint(d, schema_);
      denials_.push_back(std::move(d));
    }
    fds_.push_back(fd);
  }

  void add_denial(DenialConstraint c) {
    validate_constraint(c, schema_);
    denials_.push_back(std::move(c));
    ++raw_denial_count_;
  }

  const Schema& schema() const { return schema_; }
  const std::vector<DenialConstraint>& denials() const { return denials_; }
  const std::vector<FD>& fds() const { return fds_; }
  std::size_t raw_denial_count() const { return raw_denial_count_; }

  /// The single FD, when the set consists of exactly one FD and nothing
  /// else — the precondition of the rewriting engine.
  std::optional<FD> single_fd() const {
    if (fds_.size() == 1 && raw_denial_count_ == 0) return fds_[0];
    return std::nullopt;
  }

  std::string str() const {
    std::ostringstream os;
    for (const FD& fd : fds_) os << fd.str(schema_) << "\n";
    std::size_t fd_compiled = denials_.size() - raw_denial_count_;
    for (std::size_t i = fd_compiled; i < denials_.size(); ++i)
      os << denials_[i].str(schema_.relation_name()) << "\n";
    return os.str();
  }

private:
  Schema schema_;
  std::vector<DenialConstraint> denials_;
  std::vector<FD> fds_;
  std::size_t raw_denial_count_ = 0;
};

// ---------------------------------------------------------------------------
// Violation enumeration

namespace detail {

// Backtracking match of all constraint literals onto instance tuples.
// Distinct literals may map to the same tuple; builtins are checked as
// soon as both sides are bound. `sink` receives the sorted, deduplicated
// tuple-id set of each match and returns false to stop early.
class ViolationScan {
public:
  ViolationScan(const Instance& instance, const DenialConstraint& c,
                const std::function<bool(const std::vector<std::size_t>&)>& sink)
      : instance_(instance), c_(c), sink_(sink) {}

  // `candidates`: tuple ids each literal may range over (canonical order).
  bool run(const std::vector<std::size_t>& candidates) {
    chosen_.assign(c_.literals.size(), 0);
    return place(0, candidates);
  }

private:
  bool place(std::size_t li, const std::vector<std::size_t>& candidates) {
    if (li == c_.literals.size()) {
      std::vector<std::size_t> edge(chosen_);
      std::sort(edge.begin(), edge.end());
      edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
      return sink_(edge);
    }
    for (std::size_t id : candidates) {
      std::vector<std::string> bound;
      if (try_bind(li, id, bound)) {
        chosen_[li] = id;
        bool keep_going = place(li + 1, candidates);
        unbind(bound);
        if (!keep_going) return false;
      } else {
        unbind(bound);
      }
    }
    return true;
  }

  bool try_bind(std::size_t li, std::size_t tuple_id,
                std::vector<std::string>& bound) {
    const Tuple& t = instance_.tuples()[tuple_id];
    const auto& pattern = c_.literals[li];
    for (std::size_t p = 0; p < pattern.size(); ++p) {
      const Term& term = pattern[p];
      const Value& v = t.at(p);
      if (term.is_const()) {
        if (!(term.value() == v)) return false;
      } else {
        auto it = binding_.find(term.var_name());
        if (it == binding_.end()) {
          binding_.emplace(term.var_name(), v);
          bound.push_back(term.var_name());
        } else if (!(it->second == v)) {
          return false;
        }
      }
    }
    // Builtins whose variables are now all bound must already hold.
    for (const BuiltinAtom& b : c_.builtins) {
      auto r = b.try_eval(binding_);
      if (r && !*r) return false;
    }
    return true;
  }

  void unbind(const std::vector<std::string>& names) {
    for (const std::string& n : names) binding_.erase(n);
  }

  const Instance& instance_;
  const DenialConstraint& c_;
  const std::function<bool(const std::vector<std::size_t>&)>& sink_;
  Binding binding_;
  std::vector<std::size_t> chosen_;
};

inline std::vector<std::size_t> all_tuple_ids(const Instance& instance) {
  std::vector<std::size_t> ids(instance.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

}  // namespace detail

/// Streams every violating tuple-id set of one constraint (possibly with
/// repeats across substitutions). The sink returns false to stop.
inline void for_each_violation(
    const Instance& instance, const DenialConstraint& c,
    const std::function<bool(const std::vector<std::size_t>&)>& sink) {
  detail::ViolationScan scan(instance, c, sink);
  scan.run(detail::all_tuple_ids(instance));
}

/// Violations with every literal restricted to the given tuple ids.
inline void for_each_violation_within(
    const Instance& instance, const DenialConstraint& c,
    const std::vector<std::size_t>& candidate_ids,
    const std::function<bool(const std::vector<std::size_t>&)>& sink) {
  detail::ViolationScan scan(instance, c, sink);
  scan.run(candidate_ids);
}

/// The set of tuple sets that jointly violate the constraint under some
/// substitution, deduplicated. Materializes everything; meant for small
/// instances — the conflict hypergraph offers indexed on-demand access.
inline std::set<std::vector<Tuple>> violations(const Instance& instance,
                                               const DenialConstraint& c) {
  std::set<std::vector<Tuple>> out;
  for_each_violation(instance, c, [&](const std::vector<std::size_t>& ids) {
    std::vector<Tuple> ts;
    ts.reserve(ids.size());
    for (std::size_t id : ids) ts.push_back(instance.tuples()[id]);
    out.insert(std::move(ts));
    return true;
  });
  return out;
}

/// True iff no constraint in the set has a violation.
inline bool is_consistent(const Instance& instance, const ConstraintSet& cs) {
  for (const DenialConstraint& c : cs.denials()) {
    bool violated = false;
    for_each_violation(instance, c, [&](const std::vector<std::size_t>&) {
      violated = true;
      return false;
    });
    if (violated) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Constraint DSL
//
//   fd: Name -> City, Street
//   denial: Emp(n,s,m), Emp(m,s2,m2), s > s2
//
// One constraint per line; '#' lines are comments. Bare identifiers in
// literals are variables; constants are quoted or numeric.

namespace detail {

inline Term parse_term_token(const Token& tok) {
  switch (tok.kind) {
    case TokKind::Ident: return Term::var(tok.text);
    case TokKind::Quoted: return Term::constant(Value::sym(tok.text));
    case TokKind::Number: return Term::constant(Value::num(Int(tok.text)));
    default:
      throw ParseError("expected a term, got '" + tok.text + "'", tok.line,
                       tok.column);
  }
}

inline DenialConstraint parse_denial_body(const std::string& body,
                                          const Schema& schema,
                                          std::size_t line_no) {
  std::vector<Token> toks = tokenize(body, line_no);
  std::size_t pos = 0;
  auto peek = [&]() -> const Token& { return toks[pos]; };
  auto next = [&]() -> const Token& { return toks[pos++]; };

  DenialConstraint c;
  while (peek().kind != TokKind::End) {
    if (peek().kind == TokKind::Ident && toks[pos + 1].kind == TokKind::LParen) {
      const Token& rel = next();
      if (rel.text != schema.relation_name())
        throw ParseError("unknown relation '" + rel.text + "', expected '" +
                             schema.relation_name() + "'",
                         rel.line, rel.column);
      next();  // (
      std::vector<Term> terms;
      while (true) {
        terms.push_back(parse_term_token(next()));
        if (peek().kind == TokKind::Comma) {
          next();
          continue;
        }
        break;
      }
      if (peek().kind != TokKind::RParen)
        throw ParseError("expected ')'", peek().line, peek().column);
      next();
      c.literals.push_back(std::move(terms));
    } else {
      Term lhs = parse_term_token(next());
      if (peek().kind != TokKind::CmpOp)
        throw ParseError("expected a comparison operator", peek().line,
                         peek().column);
      BuiltinOp op = builtin_op_from_text(next().text);
      Term rhs = parse_term_token(next());
      c.builtins.push_back(BuiltinAtom{op, std::move(lhs), std::move(rhs)});
    }
    if (peek().kind == TokKind::Comma) {
      next();
      continue;
    }
    if (peek().kind != TokKind::End)
      throw ParseError("expected ',' or end of line", peek().line,
                       peek().column);
  }
  if (c.literals.empty())
    throw ParseError("denial constraint has no relation literal", line_no);
  return c;
}

inline FD parse_fd_body(const std::string& body, const Schema& schema,
                        std::size_t line_no) {
  std::size_t arrow = body.find("->");
  if (arrow == std::string::npos)
    throw ParseError("fd line is missing '->'", line_no);
  auto parse_side = [&](const std::string& side,
                        bool allow_empty) -> std::vector<std::size_t> {
    std::vector<std::size_t> idx;
    std::istringstream ss(side);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::string name = trim(item);
      if (name.empty()) continue;
      auto i = schema.index_of(name);
      if (!i)
        throw ParseError("unknown attribute '" + name + "'", line_no);
      idx.push_back(*i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    if (idx.empty() && !allow_empty)
      throw ParseError("fd has an empty right-hand side", line_no);
    return idx;
  };
  FD fd;
  fd.lhs = parse_side(body.substr(0, arrow), /*allow_empty=*/true);
  fd.rhs = parse_side(body.substr(arrow + 2), /*allow_empty=*/false);
  for (std::size_t a : fd.lhs)
    for (std::size_t b : fd.rhs)
      if (a == b)
        throw ParseError("attribute '" + schema.attributes()[a].name +
                             "' appears on both sides of the fd",
                         line_no);
  return fd;
}

}  // namespace detail

/// Parses the constraint DSL against a schema.
inline ConstraintSet parse_constraints(const std::string& dsl_text,
                                       const Schema& schema) {
  ConstraintSet cs(schema);
  std::istringstream in(dsl_text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.rfind("fd:", 0) == 0) {
      cs.add_fd(detail::parse_fd_body(stripped.substr(3), schema, line_no));
    } else if (stripped.rfind("denial:", 0) == 0) {
      try {
        cs.add_denial(
            detail::parse_denial_body(stripped.substr(7), schema, line_no));
      } catch (const TypeError& e) {
        throw ParseError(e.what(), line_no);
      }
    } else {
      throw ParseError("expected 'fd:' or 'denial:'", line_no);
    }
  }
  return cs;
}

}  // namespace cqa

#endif  // CQA_CONSTRAINTS_HPP
