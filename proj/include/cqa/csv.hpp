// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_CSV_HPP
#define CQA_CSV_HPP

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/lex.hpp"
#include "cqa/model.hpp"

// Relation instances as CSV. The header carries the column types
// ("Name:sym,Salary:num"); '#'-prefixed lines are comments. A comment of
// the form "# relation: Person" names the relation (default "R").
// Cells: bare digit strings are numbers, anything else is a symbol, and
// quoting ('...' or "...") forces a symbol. Duplicate rows collapse.

namespace cqa {
namespace detail {

// Splits one CSV record on commas outside quotes. Doubling a quote
// character inside a quoted cell escapes it.
inline std::vector<std::string> split_csv_line(const std::string& line,
                                               std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote != 0) {
      if (c == quote) {
        if (i + 1 < line.size() && line[i + 1] == quote) {
          cur += c;
          ++i;
        } else {
          quote = 0;
          cur += c;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
      cur += c;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quote != 0)
    throw ParseError("unterminated quote", line_no);
  cells.push_back(cur);
  return cells;
}

// A trimmed cell to a Value: quoted text is a Sym verbatim, bare tokens
// follow the digit rule.
inline Value parse_cell(const std::string& raw, std::size_t line_no,
                        std::size_t col_no) {
  std::string cell = trim(raw);
  if (cell.size() >= 2 && (cell.front() == '"' || cell.front() == '\'') &&
      cell.back() == cell.front()) {
    char q = cell.front();
    std::string inner = cell.substr(1, cell.size() - 2);
    std::string unescaped;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == q && i + 1 < inner.size() && inner[i + 1] == q) ++i;
      unescaped += inner[i];
    }
    return Value::sym(unescaped);
  }
  if (cell.empty())
    throw ParseError("empty cell", line_no, col_no);
  return value_from_bare_token(cell);
}

}  // namespace detail

/// Parses the header and rows into an Instance, deriving the schema from
/// the `name:type` header. Row order is not preserved (set semantics).
inline Instance parse_instance(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  std::string relation_name = "R";
  std::optional<Schema> schema;
  std::vector<Tuple> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    if (stripped[0] == '#') {
      static const std::string kRelKey = "relation:";
      std::string body = detail::trim(stripped.substr(1));
      if (body.rfind(kRelKey, 0) == 0 && !schema)
        relation_name = detail::trim(body.substr(kRelKey.size()));
      continue;
    }
    std::vector<std::string> cells = detail::split_csv_line(line, line_no);
    if (!schema) {
      std::vector<Attribute> attrs;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        std::string cell = detail::trim(cells[c]);
        std::size_t colon = cell.rfind(':');
        if (colon == std::string::npos)
          throw ParseError("header cell '" + cell +
                               "' is missing a ':sym' or ':num' type tag",
                           line_no, c + 1);
        std::string name = detail::trim(cell.substr(0, colon));
        std::string type = detail::trim(cell.substr(colon + 1));
        if (name.empty())
          throw ParseError("empty attribute name", line_no, c + 1);
        if (type == "sym")
          attrs.push_back({name, ValueType::Sym});
        else if (type == "num")
          attrs.push_back({name, ValueType::Num});
        else
          throw ParseError("unknown attribute type '" + type +
                               "' (expected sym or num)",
                           line_no, c + 1);
      }
      schema.emplace(relation_name, std::move(attrs));
      continue;
    }
    if (cells.size() != schema->arity())
      throw ParseError("row has " + std::to_string(cells.size()) +
                           " cells, schema has arity " +
                           std::to_string(schema->arity()),
                       line_no);
    std::vector<Value> vals;
    vals.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      Value v = detail::parse_cell(cells[c], line_no, c + 1);
      if (v.type() != schema->type_of(c))
        throw ParseError("cell '" + detail::trim(cells[c]) + "' is a " +
                             std::string(to_string(v.type())) +
                             " but attribute '" +
                             schema->attributes()[c].name + "' expects " +
                             to_string(schema->type_of(c)),
                         line_no, c + 1);
      vals.push_back(std::move(v));
    }
    rows.emplace_back(std::move(vals));
  }
  if (!schema) throw ParseError("missing header row");
  return Instance(*schema, std::move(rows));
}

/// Parses against a known schema; the header must match it exactly.
inline Instance parse_instance(const std::string& csv_text,
                               const Schema& schema) {
  Instance parsed = parse_instance(csv_text);
  if (!(parsed.schema() == schema)) {
    if (parsed.schema().arity() != schema.arity())
      throw ParseError("header arity " +
                       std::to_string(parsed.schema().arity()) +
                       " does not match schema arity " +
                       std::to_string(schema.arity()));
    for (std::size_t i = 0; i < schema.arity(); ++i)
      if (!(parsed.schema().attributes()[i] == schema.attributes()[i]))
        throw ParseError("unknown header '" +
                         parsed.schema().attributes()[i].name + ":" +
                         to_string(parsed.schema().attributes()[i].type) +
                         "', expected '" + schema.attributes()[i].name + ":" +
                         to_string(schema.type_of(i)) + "'");
    throw ParseError("relation name '" + parsed.schema().relation_name() +
                     "' does not match expected '" + schema.relation_name() +
                     "'");
  }
  return parsed;
}

namespace detail {

inline std::string serialize_cell(const Value& v) {
  if (v.is_num()) return v.num_value().str();
  const std::string& name = v.sym_name();
  bool needs_quotes = name.empty() || looks_numeric(name) ||
                      name.find(',') != std::string::npos ||
                      name.find('"') != std::string::npos ||
                      name.find('\'') != std::string::npos ||
                      name.find('#') != std::string::npos ||
                      name != trim(name);
  if (!needs_quotes) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Inverse of parse_instance, modulo row order.
inline std::string serialize_instance(const Instance& instance) {
  std::ostringstream out;
  out << "# relation: " << instance.schema().relation_name() << "\n";
  const auto& attrs = instance.schema().attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) out << ",";
    out << attrs[i].name << ":" << to_string(attrs[i].type);
  }
  out << "\n";
  for (const Tuple& t : instance.tuples()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out << ",";
      out << detail::serialize_cell(t.at(i));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace cqa

#endif  // CQA_CSV_HPP
