// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_QUERY_PARSER_HPP
#define CQA_QUERY_PARSER_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/lex.hpp"
#include "cqa/query.hpp"

// Query grammar (lowest to highest precedence):
//
//   query  := implies
//   implies := or ('->' implies)?
//   or      := and ('|' and)*
//   and     := unary ('&' unary)*
//   unary   := '!' unary | quantified | atom
//   quantified := ('exists'|'forall') var (',' var)* '.' implies
//   atom    := Rel '(' term (',' term)* ')' | term cmp term | '(' implies ')'
//
// Quantifier bodies extend as far to the right as possible. Constants
// are quoted ('Brown') or numeric (42); bare identifiers are variables.
// Each variable name may be bound at most once per query; reusing a free
// variable's name in a quantifier is rejected.

namespace cqa {

namespace detail {

class QueryParser {
public:
  QueryParser(std::vector<Token> toks, const Schema& schema)
      : toks_(std::move(toks)), schema_(schema) {}

  QueryPtr parse() {
    QueryPtr q = parse_implies();
    expect(TokKind::End, "end of query");
    check_variable_reuse(q);
    return q;
  }

private:
  const Token& peek(std::size_t off = 0) const {
    std::size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  void expect(TokKind k, const char* what) {
    if (peek().kind != k)
      throw ParseError(std::string("expected ") + what + ", got '" +
                           (peek().kind == TokKind::End ? "<end>"
                                                        : peek().text) +
                           "'",
                       peek().line, peek().column);
    next();
  }

  static bool is_keyword(const Token& t, const char* kw) {
    return t.kind == TokKind::Ident && t.text == kw;
  }

  QueryPtr parse_implies() {
    QueryPtr lhs = parse_or();
    if (peek().kind == TokKind::Arrow) {
      next();
      return mk_implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  QueryPtr parse_or() {
    QueryPtr q = parse_and();
    while (peek().kind == TokKind::Pipe) {
      next();
      q = mk_or(std::move(q), parse_and());
    }
    return q;
  }

  QueryPtr parse_and() {
    QueryPtr q = parse_unary();
    while (peek().kind == TokKind::Amp) {
      next();
      q = mk_and(std::move(q), parse_unary());
    }
    return q;
  }

  QueryPtr parse_unary() {
    if (peek().kind == TokKind::Bang) {
      next();
      return mk_not(parse_unary());
    }
    if (is_keyword(peek(), "exists") || is_keyword(peek(), "forall")) {
      bool exists = peek().text == "exists";
      next();
      std::vector<std::string> vars;
      while (true) {
        if (peek().kind != TokKind::Ident)
          throw ParseError("expected a variable name", peek().line,
                           peek().column);
        if (peek().text == "exists" || peek().text == "forall")
          throw ParseError("'" + peek().text + "' is a reserved word",
                           peek().line, peek().column);
        vars.push_back(next().text);
        if (peek().kind == TokKind::Comma) {
          next();
          continue;
        }
        break;
      }
      expect(TokKind::Dot, "'.' after the quantified variables");
      QueryPtr body = parse_implies();
      return exists ? mk_exists(std::move(vars), std::move(body))
                    : mk_forall(std::move(vars), std::move(body));
    }
    return parse_atom();
  }

  QueryPtr parse_atom() {
    const Token& t = peek();
    if (t.kind == TokKind::LParen) {
      next();
      QueryPtr q = parse_implies();
      expect(TokKind::RParen, "')'");
      return q;
    }
    if (t.kind == TokKind::Ident && peek(1).kind == TokKind::LParen) {
      const Token& rel = next();
      if (rel.text != schema_.relation_name())
        throw ParseError("unknown relation '" + rel.text + "', expected '" +
                             schema_.relation_name() + "'",
                         rel.line, rel.column);
      next();  // (
      std::vector<Term> terms;
      while (true) {
        terms.push_back(parse_term());
        if (peek().kind == TokKind::Comma) {
          next();
          continue;
        }
        break;
      }
      expect(TokKind::RParen, "')'");
      return mk_rel(std::move(terms));
    }
    // Builtin comparison.
    Term lhs = parse_term();
    if (peek().kind != TokKind::CmpOp)
      throw ParseError("expected a comparison operator", peek().line,
                       peek().column);
    BuiltinOp op = builtin_op_from_text(next().text);
    Term rhs = parse_term();
    return mk_builtin(op, std::move(lhs), std::move(rhs));
  }

  Term parse_term() {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Ident:
        if (t.text == "exists" || t.text == "forall")
          throw ParseError("'" + t.text + "' is a reserved word", t.line,
                           t.column);
        return Term::var(next().text);
      case TokKind::Quoted:
        return Term::constant(Value::sym(next().text));
      case TokKind::Number:
        return Term::constant(Value::num(Int(next().text)));
      default:
        throw ParseError("expected a term, got '" + t.text + "'", t.line,
                         t.column);
    }
  }

  // Every variable name has one role per query: bound once by one
  // quantifier, or free. Keeps name-based typing and substitution
  // unambiguous.
  void check_variable_reuse(const QueryPtr& q) {
    std::set<std::string> bound;
    std::set<std::string> frees;
    for (const std::string& v : free_vars(q)) frees.insert(v);
    walk(q, bound, frees);
  }

  void walk(const QueryPtr& q, std::set<std::string>& bound_anywhere,
            const std::set<std::string>& frees) {
    if (auto* e = std::get_if<Exists>(&q->node)) {
      bind(e->vars, bound_anywhere, frees);
      walk(e->body, bound_anywhere, frees);
    } else if (auto* f = std::get_if<Forall>(&q->node)) {
      bind(f->vars, bound_anywhere, frees);
      walk(f->body, bound_anywhere, frees);
    } else if (auto* n = std::get_if<Not>(&q->node)) {
      walk(n->body, bound_anywhere, frees);
    } else if (auto* a = std::get_if<And>(&q->node)) {
      walk(a->lhs, bound_anywhere, frees);
      walk(a->rhs, bound_anywhere, frees);
    } else if (auto* o = std::get_if<Or>(&q->node)) {
      walk(o->lhs, bound_anywhere, frees);
      walk(o->rhs, bound_anywhere, frees);
    } else if (auto* im = std::get_if<Implies>(&q->node)) {
      walk(im->lhs, bound_anywhere, frees);
      walk(im->rhs, bound_anywhere, frees);
    }
  }

  void bind(const std::vector<std::string>& vars,
            std::set<std::string>& bound_anywhere,
            const std::set<std::string>& frees) {
    for (const std::string& v : vars) {
      if (!bound_anywhere.insert(v).second)
        throw ParseError("variable '" + v +
                         "' is bound by more than one quantifier");
      if (frees.count(v))
        throw ParseError("variable '" + v +
                         "' is used both free and quantified");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Schema& schema_;
};

}  // namespace detail

/// Parses query text and analyzes it against the schema.
inline AnalyzedQuery parse_query(const std::string& text,
                                 const Schema& schema) {
  detail::QueryParser parser(tokenize(text), schema);
  QueryPtr root = parser.parse();
  return analyze_query(std::move(root), schema);
}

}  // namespace cqa

#endif  // CQA_QUERY_PARSER_HPP
