// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_REDUCTIONS_HPP
#define CQA_REDUCTIONS_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cqa/constraints.hpp"
#include "cqa/errors.hpp"
#include "cqa/model.hpp"
#include "cqa/query_parser.hpp"

// Executable hardness constructions: generators mapping SAT and coloring
// inputs to (instance, constraints, query) triples whose consistent
// answer encodes the source problem, plus small exhaustive verifiers to
// close the loop in tests.

namespace cqa {

/// Propositional CNF with 1-based variable indices; a negative literal
/// is a negated variable.
struct CnfFormula {
  std::size_t num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

/// Every clause is all-positive or all-negative (and nonempty).
inline bool is_monotone(const CnfFormula& f) {
  for (const auto& clause : f.clauses) {
    if (clause.empty()) return false;
    bool pos = false, neg = false;
    for (int lit : clause) (lit > 0 ? pos : neg) = true;
    if (pos && neg) return false;
  }
  return true;
}

/// Simple undirected graph on vertices 0..n-1.
struct UndirectedGraph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // u < v, unique
};

inline UndirectedGraph complete_graph(std::size_t n) {
  UndirectedGraph g;
  g.n = n;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  return g;
}

/// A generated consistent-query-answering problem. The constraint and
/// query texts round-trip through the DSL parsers by construction.
struct GeneratedProblem {
  Instance instance;
  ConstraintSet constraints;
  AnalyzedQuery query;
  std::string constraints_text;
  std::string query_text;
};

namespace detail {

inline std::vector<std::vector<int>> dedupe_clause_literals(
    const std::vector<std::vector<int>>& clauses) {
  std::vector<std::vector<int>> out;
  out.reserve(clauses.size());
  for (const auto& clause : clauses) {
    std::vector<int> c = clause;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    out.push_back(std::move(c));
  }
  return out;
}

inline GeneratedProblem finish(Schema schema, std::vector<Tuple> facts,
                               std::string constraints_text,
                               std::string query_text) {
  Instance instance(schema, std::move(facts));
  ConstraintSet cs = parse_constraints(constraints_text, schema);
  AnalyzedQuery query = parse_query(query_text, schema);
  return GeneratedProblem{std::move(instance), std::move(cs),
                          std::move(query), std::move(constraints_text),
                          std::move(query_text)};
}

}  // namespace detail

/// Monotone-3SAT construction: the key FD A -> BC over R(A:num, B:sym,
/// C:sym). Positive clauses take indices 1..m, negative ones m+1..l;
/// each clause contributes one fact per literal, tagged 'c_prime' for
/// positive clauses and 'c' for negative ones. The formula is
/// satisfiable iff some repair falsifies
///   exists x,y,z. R(x,y,'c') & R(z,y,'c_prime').
inline GeneratedProblem gen_monotone3sat(const CnfFormula& f) {
  std::vector<std::vector<int>> clauses =
      detail::dedupe_clause_literals(f.clauses);
  std::vector<const std::vector<int>*> positives, negatives;
  for (const auto& clause : clauses) {
    if (clause.empty())
      throw InvalidArgument("monotone formula has an empty clause");
    bool pos = clause.front() > 0;
    for (int lit : clause)
      if ((lit > 0) != pos)
        throw InvalidArgument(
            "formula is not monotone: a clause mixes positive and negative "
            "literals");
    (pos ? positives : negatives).push_back(&clause);
  }
  Schema schema("R", {{"A", ValueType::Num},
                      {"B", ValueType::Sym},
                      {"C", ValueType::Sym}});
  std::vector<Tuple> facts;
  long long index = 0;
  for (const auto* clause : positives) {
    ++index;
    for (int lit : *clause)
      facts.push_back(Tuple({Value::num(index),
                             Value::sym("p" + std::to_string(lit)),
                             Value::sym("c_prime")}));
  }
  for (const auto* clause : negatives) {
    ++index;
    for (int lit : *clause)
      facts.push_back(Tuple({Value::num(index),
                             Value::sym("p" + std::to_string(-lit)),
                             Value::sym("c")}));
  }
  return detail::finish(schema, std::move(facts), "fd: A -> B, C\n",
                        "exists x,y,z. R(x,y,'c') & R(z,y,'c_prime')");
}

/// 3-colorability construction: a 10-vertex gadget per node (v_e and
/// v_e_prime for e in {m,n,r,g,b}) with 8 'g' facts per node, 6 'b'
/// facts per node over the distinct {r,g,b} pairs, and 3 'b' facts per
/// edge direction, under the two key FDs A -> BC and B -> AC. The graph
/// is 3-colorable iff some repair falsifies exists x,y. R(x,y,'b').
inline GeneratedProblem gen_3col(const UndirectedGraph& h) {
  for (auto [u, v] : h.edges) {
    if (u >= h.n || v >= h.n)
      throw InvalidArgument("edge endpoint out of range");
    if (u == v) throw InvalidArgument("self-loops are not allowed");
  }
  auto plain = [](std::size_t node, char e) {
    return Value::sym("v" + std::to_string(node) + "_" + std::string(1, e));
  };
  auto primed = [](std::size_t node, char e) {
    return Value::sym("v" + std::to_string(node) + "_" + std::string(1, e) +
                      "_prime");
  };
  const Value g = Value::sym("g"), b = Value::sym("b");
  std::vector<Tuple> facts;
  static constexpr std::pair<char, char> kGreenPairs[] = {
      {'m', 'r'}, {'m', 'b'}, {'n', 'b'}, {'n', 'g'},
      {'r', 'm'}, {'b', 'm'}, {'b', 'n'}, {'g', 'n'}};
  static constexpr char kColors[] = {'r', 'g', 'b'};
  for (std::size_t v = 0; v < h.n; ++v) {
    for (auto [from, to] : kGreenPairs)
      facts.push_back(Tuple({plain(v, from), primed(v, to), g}));
    for (char e1 : kColors)
      for (char e2 : kColors)
        if (e1 != e2)
          facts.push_back(Tuple({plain(v, e1), primed(v, e2), b}));
  }
  for (auto [u, v] : h.edges)
    for (char e : kColors) {
      facts.push_back(Tuple({plain(v, e), primed(u, e), b}));
      facts.push_back(Tuple({plain(u, e), primed(v, e), b}));
    }
  Schema schema("R", {{"A", ValueType::Sym},
                      {"B", ValueType::Sym},
                      {"C", ValueType::Sym}});
  return detail::finish(schema, std::move(facts),
                        "fd: A -> B, C\nfd: B -> A, C\n",
                        "exists x,y. R(x,y,'b')");
}

/// 3SAT construction under one denial constraint. Per variable i the
/// gadget a_i -> b_i ('p'), b_i -> d_i ('g'), b_i -> c_i ('b'); per
/// clause j the gadget e_j -> f_j ('p'), e_j -> g_j ('g'); and one
/// d_i -> e_j fact per literal occurrence, 'g' when positive and 'b'
/// when negated. The constraint forbids an incoming edge at a vertex
/// that has two outgoing edges of different colors. The formula is
/// satisfiable iff some repair falsifies exists x,y. R(x,y,'p').
inline GeneratedProblem gen_3sat_yfree(const CnfFormula& f) {
  std::vector<std::vector<int>> clauses =
      detail::dedupe_clause_literals(f.clauses);
  std::size_t num_vars = f.num_vars;
  for (const auto& clause : clauses) {
    if (clause.empty()) throw InvalidArgument("formula has an empty clause");
    if (clause.size() > 3)
      throw InvalidArgument("clause has more than 3 literals");
    for (int lit : clause)
      num_vars = std::max(num_vars, std::size_t(std::abs(lit)));
  }
  auto name = [](char prefix, std::size_t i) {
    return Value::sym(std::string(1, prefix) + std::to_string(i));
  };
  const Value p = Value::sym("p"), g = Value::sym("g"), b = Value::sym("b");
  std::vector<Tuple> facts;
  for (std::size_t i = 1; i <= num_vars; ++i) {
    facts.push_back(Tuple({name('a', i), name('b', i), p}));
    facts.push_back(Tuple({name('b', i), name('d', i), g}));
    facts.push_back(Tuple({name('b', i), name('c', i), b}));
  }
  for (std::size_t j = 1; j <= clauses.size(); ++j) {
    facts.push_back(Tuple({name('e', j), name('f', j), p}));
    facts.push_back(Tuple({name('e', j), name('g', j), g}));
    for (int lit : clauses[j - 1])
      facts.push_back(Tuple({name('d', std::size_t(std::abs(lit))),
                             name('e', j), lit > 0 ? g : b}));
  }
  Schema schema("R", {{"A", ValueType::Sym},
                      {"B", ValueType::Sym},
                      {"C", ValueType::Sym}});
  return detail::finish(
      schema, std::move(facts),
      "denial: R(x,y,s), R(y,z,s2), R(y,w,s3), s2 != s3\n",
      "exists x,y. R(x,y,'p')");
}

// ---------------------------------------------------------------------------
// Exhaustive verifiers

/// Satisfiability by full assignment enumeration; at most 24 variables.
inline bool brute_sat(const CnfFormula& f) {
  std::size_t num_vars = f.num_vars;
  for (const auto& clause : f.clauses)
    for (int lit : clause)
      num_vars = std::max(num_vars, std::size_t(std::abs(lit)));
  if (num_vars > 24)
    throw BudgetError("brute-force SAT is limited to 24 variables");
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << num_vars);
       ++mask) {
    bool all = true;
    for (const auto& clause : f.clauses) {
      bool sat = false;
      for (int lit : clause) {
        std::size_t v = std::size_t(std::abs(lit)) - 1;
        bool value = (mask >> v) & 1;
        if (value == (lit > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

/// 3-colorability by exhaustive coloring; at most 10 nodes.
inline bool brute_3col(const UndirectedGraph& h) {
  if (h.n > 10)
    throw BudgetError("brute-force 3-coloring is limited to 10 nodes");
  std::vector<std::vector<std::size_t>> adj(h.n);
  for (auto [u, v] : h.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> color(h.n, -1);
  std::function<bool(std::size_t)> assign = [&](std::size_t v) -> bool {
    if (v == h.n) return true;
    for (int c = 0; c < 3; ++c) {
      bool ok = true;
      for (std::size_t u : adj[v])
        if (color[u] == c) {
          ok = false;
          break;
        }
      if (ok) {
        color[v] = c;
        if (assign(v + 1)) return true;
        color[v] = -1;
      }
    }
    return false;
  };
  return assign(0);
}

// ---------------------------------------------------------------------------
// Input formats

/// DIMACS CNF: 'c' comment lines, optional 'p cnf <vars> <clauses>'
/// header, clauses as 0-terminated literal runs.
inline CnfFormula parse_dimacs(const std::string& text) {
  CnfFormula f;
  std::istringstream in(text);
  std::string line;
  std::vector<int> current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c" || first[0] == 'c' || first[0] == '#') continue;
    if (first == "p") {
      std::string fmt;
      std::size_t vars = 0, clauses = 0;
      if (!(ls >> fmt >> vars >> clauses) || fmt != "cnf")
        throw ParseError("malformed DIMACS problem line", line_no);
      f.num_vars = vars;
      continue;
    }
    ls.clear();
    ls.str(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        f.clauses.push_back(current);
        current.clear();
      } else {
        current.push_back(lit);
        f.num_vars =
            std::max(f.num_vars, std::size_t(std::abs(lit)));
      }
    }
    if (ls.fail() && !ls.eof())
      throw ParseError("malformed DIMACS literal", line_no);
  }
  if (!current.empty()) f.clauses.push_back(current);
  return f;
}

/// Whitespace edge list: an optional 'nodes N' line, then 'u v' edges
/// over 0-based vertex numbers. '#' lines are comments.
inline UndirectedGraph parse_edge_list(const std::string& text) {
  UndirectedGraph g;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') continue;
    if (first == "nodes") {
      std::size_t n = 0;
      if (!(ls >> n)) throw ParseError("malformed nodes line", line_no);
      g.n = std::max(g.n, n);
      continue;
    }
    std::size_t u = 0, v = 0;
    try {
      u = std::stoull(first);
    } catch (...) {
      throw ParseError("malformed edge line", line_no);
    }
    if (!(ls >> v)) throw ParseError("malformed edge line", line_no);
    if (u == v) throw ParseError("self-loops are not allowed", line_no);
    g.n = std::max({g.n, u + 1, v + 1});
    edges.insert({std::min(u, v), std::max(u, v)});
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

}  // namespace cqa

#endif  // CQA_REDUCTIONS_HPP
