// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_LEX_HPP
#define CQA_LEX_HPP

#include <cctype>
#include <string>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/term.hpp"
#include "cqa/value.hpp"

// Shared tokenizer for the constraint DSL and the query grammar.

namespace cqa {
namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

enum class TokKind {
  Ident,     // bare identifier (variable, keyword, attribute, relation)
  Number,    // integer literal, optional leading '-'
  Quoted,    // 'sym' or "sym" constant
  LParen,
  RParen,
  Comma,
  Dot,
  Amp,       // &
  Pipe,      // |
  Bang,      // !
  Arrow,     // ->
  CmpOp,     // = == != < > <= >=
  End,
};

struct Token {
  TokKind kind;
  std::string text;      // identifier, digits, quoted content, or operator
  std::size_t line = 1;
  std::size_t column = 1;
};

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Tokenizes a full text. `line0` offsets reported line numbers so that
/// per-line parsers can report positions in the enclosing file.
inline std::vector<Token> tokenize(const std::string& text,
                                   std::size_t line0 = 1) {
  std::vector<Token> toks;
  std::size_t line = line0, col = 1;
  std::size_t i = 0;
  auto push = [&](TokKind k, std::string t, std::size_t c) {
    toks.push_back(Token{k, std::move(t), line, c});
  };
  while (i < text.size()) {
    char c = text[i];
    std::size_t tok_col = col;
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '\'' || c == '"') {
      char q = c;
      std::string content;
      ++i;
      ++col;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == q) {
          if (i + 1 < text.size() && text[i + 1] == q) {
            content += q;
            i += 2;
            col += 2;
            continue;
          }
          ++i;
          ++col;
          closed = true;
          break;
        }
        if (text[i] == '\n')
          throw ParseError("unterminated quoted constant", line, tok_col);
        content += text[i];
        ++i;
        ++col;
      }
      if (!closed)
        throw ParseError("unterminated quoted constant", line, tok_col);
      push(TokKind::Quoted, std::move(content), tok_col);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::string digits;
      if (c == '-') {
        digits += '-';
        ++i;
        ++col;
      }
      while (i < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i]))) {
        digits += text[i];
        ++i;
        ++col;
      }
      push(TokKind::Number, std::move(digits), tok_col);
      continue;
    }
    if (is_ident_start(c)) {
      std::string ident;
      while (i < text.size() && is_ident_char(text[i])) {
        ident += text[i];
        ++i;
        ++col;
      }
      push(TokKind::Ident, std::move(ident), tok_col);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < text.size() && text[i + 1] == b;
    };
    if (two('-', '>')) { push(TokKind::Arrow, "->", tok_col); i += 2; col += 2; continue; }
    if (two('!', '=')) { push(TokKind::CmpOp, "!=", tok_col); i += 2; col += 2; continue; }
    if (two('<', '=')) { push(TokKind::CmpOp, "<=", tok_col); i += 2; col += 2; continue; }
    if (two('>', '=')) { push(TokKind::CmpOp, ">=", tok_col); i += 2; col += 2; continue; }
    if (two('=', '=')) { push(TokKind::CmpOp, "=", tok_col); i += 2; col += 2; continue; }
    switch (c) {
      case '(': push(TokKind::LParen, "(", tok_col); break;
      case ')': push(TokKind::RParen, ")", tok_col); break;
      case ',': push(TokKind::Comma, ",", tok_col); break;
      case '.': push(TokKind::Dot, ".", tok_col); break;
      case '&': push(TokKind::Amp, "&", tok_col); break;
      case '|': push(TokKind::Pipe, "|", tok_col); break;
      case '!': push(TokKind::Bang, "!", tok_col); break;
      case '=': push(TokKind::CmpOp, "=", tok_col); break;
      case '<': push(TokKind::CmpOp, "<", tok_col); break;
      case '>': push(TokKind::CmpOp, ">", tok_col); break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         line, tok_col);
    }
    ++i;
    ++col;
  }
  toks.push_back(Token{TokKind::End, "", line, col});
  return toks;
}

inline BuiltinOp builtin_op_from_text(const std::string& s) {
  if (s == "=") return BuiltinOp::Eq;
  if (s == "!=") return BuiltinOp::Ne;
  if (s == "<") return BuiltinOp::Lt;
  if (s == ">") return BuiltinOp::Gt;
  if (s == "<=") return BuiltinOp::Le;
  if (s == ">=") return BuiltinOp::Ge;
  throw ParseError("unknown comparison operator '" + s + "'");
}

}  // namespace cqa

#endif  // CQA_LEX_HPP
