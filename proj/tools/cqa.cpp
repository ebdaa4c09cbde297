// SPDX-License-Identifier: Apache-2.0
//
// Consistent query answering over inconsistent single-relation databases:
// command-line front end. All logic lives in the headers under
// include/cqa; this file only marshals arguments and formats output.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cqa/cqa.hpp"
#include "cqa/json_io.hpp"
#include "cqa/selftest.hpp"

namespace {

using namespace cqa;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write file '" + path + "'");
  out << content;
}

struct CommonArgs {
  std::string instance_path;
  std::string constraints_path;
  std::string query_text;
  std::string query_file;
  std::string format = "json";
  std::string strategy = "auto";
  std::string hypergraph = "auto";
  std::size_t edge_budget = ConflictHypergraph::kDefaultEdgeBudget;
  std::size_t node_budget = std::size_t(1) << 20;
  unsigned threads = 1;
  bool timings = false;
};

Instance load_instance(const CommonArgs& args) {
  return parse_instance(read_file(args.instance_path));
}

ConstraintSet load_constraints(const CommonArgs& args, const Schema& schema) {
  return parse_constraints(read_file(args.constraints_path), schema);
}

std::string load_query_text(const CommonArgs& args) {
  if (!args.query_text.empty()) return args.query_text;
  if (!args.query_file.empty()) return read_file(args.query_file);
  throw InvalidArgument("provide a query with --query or --query-file");
}

Strategy strategy_from(const std::string& s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "qfree") return Strategy::QFree;
  if (s == "rewrite") return Strategy::Rewrite;
  if (s == "oracle") return Strategy::Oracle;
  throw InvalidArgument("unknown strategy '" + s + "'");
}

HgChoice hg_from(const std::string& s) {
  if (s == "auto") return HgChoice::Auto;
  if (s == "materialized") return HgChoice::Materialized;
  if (s == "lazy") return HgChoice::Lazy;
  throw InvalidArgument("unknown hypergraph mode '" + s + "'");
}

EngineOptions engine_options(const CommonArgs& args) {
  EngineOptions opts;
  opts.strategy = strategy_from(args.strategy);
  opts.hypergraph = hg_from(args.hypergraph);
  opts.edge_budget = args.edge_budget;
  opts.node_budget = args.node_budget;
  opts.threads = args.threads;
  return opts;
}

Json stats_json(const EngineStats& st, bool timings) {
  Json j;
  j["fragment"] = to_string(st.fragment);
  if (!st.hypergraph_mode.empty()) j["hypergraph"] = st.hypergraph_mode;
  if (st.clause_count) j["clauses"] = *st.clause_count;
  if (st.edge_count) j["edges"] = *st.edge_count;
  if (st.repair_count) j["repairs"] = *st.repair_count;
  if (st.candidate_count) j["candidates"] = *st.candidate_count;
  if (timings) j["seconds"] = st.seconds;
  return j;
}

void print_answer_table(const EngineResult& result,
                        const std::vector<std::string>& free_vars) {
  if (result.status) {
    std::cout << "status: " << to_string(*result.status) << "\n";
    return;
  }
  const auto& answers = *result.answers;
  std::vector<std::size_t> width(free_vars.size());
  for (std::size_t c = 0; c < free_vars.size(); ++c)
    width[c] = free_vars[c].size();
  std::vector<std::vector<std::string>> rows;
  for (const Tuple& t : answers) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < t.size(); ++c) {
      row.push_back(t.at(c).str());
      width[c] = std::max(width[c], row.back().size());
    }
    rows.push_back(std::move(row));
  }
  auto pad = [&](const std::string& s, std::size_t w) {
    std::cout << s << std::string(w - s.size() + 2, ' ');
  };
  for (std::size_t c = 0; c < free_vars.size(); ++c)
    pad(free_vars[c], width[c]);
  std::cout << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) pad(row[c], width[c]);
    std::cout << "\n";
  }
  std::cout << "(" << answers.size() << " answers)\n";
}

int cmd_check(const CommonArgs& args) {
  Instance instance = load_instance(args);
  ConstraintSet cs = load_constraints(args, instance.schema());
  bool consistent = is_consistent(instance, cs);
  if (args.format == "table")
    std::cout << "consistent: " << (consistent ? "true" : "false") << "\n";
  else
    std::cout << Json{{"consistent", consistent}}.dump() << "\n";
  return kExitOk;
}

int cmd_repairs(const CommonArgs& args, bool enumerate, bool count) {
  Instance instance = load_instance(args);
  ConstraintSet cs = load_constraints(args, instance.schema());
  ConflictHypergraph hg(instance, cs, HgMode::Materialized,
                        args.edge_budget);
  OracleOptions opts;
  opts.node_budget = args.node_budget;
  opts.edge_budget = args.edge_budget;
  if (count) {
    Int n = count_repairs(hg, opts);
    if (args.format == "table") {
      std::cout << "repairs: " << n.str() << "\n";
    } else {
      Json j;
      if (n <= Int(std::numeric_limits<std::int64_t>::max()))
        j["repairs"] = static_cast<std::int64_t>(n);
      else
        j["repairs"] = n.str();
      std::cout << j.dump() << "\n";
    }
    return kExitOk;
  }
  if (!enumerate)
    throw InvalidArgument("repairs needs --enumerate or --count");
  enumerate_repairs(hg, [&](const Repair& r) {
    Json line = Json::array();
    for (VertexId v : r.vertex_ids)
      line.push_back(tuple_to_json(instance.tuples()[v]));
    std::cout << line.dump() << "\n";
    return true;
  }, opts);
  return kExitOk;
}

int cmd_answer(const CommonArgs& args) {
  Instance instance = load_instance(args);
  ConstraintSet cs = load_constraints(args, instance.schema());
  AnalyzedQuery query = parse_query(load_query_text(args), instance.schema());
  EngineResult result = cqa_answer(instance, cs, query, engine_options(args));
  if (args.format == "table") {
    print_answer_table(result, query.free);
    return kExitOk;
  }
  Json j;
  if (result.status) {
    j["status"] = to_string(*result.status);
  } else {
    Json arr = Json::array();
    for (const Tuple& t : *result.answers) arr.push_back(tuple_to_json(t));
    j["answers"] = arr;
    j["free_vars"] = query.free;
  }
  j["strategy"] = result.stats.strategy_used;
  j["stats"] = stats_json(result.stats, args.timings);
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_rewrite(const CommonArgs& args, const std::string& fd_text,
                const std::string& phi_text) {
  Instance instance = load_instance(args);
  const Schema& schema = instance.schema();
  FD fd = cqa::detail::parse_fd_body(fd_text, schema, 1);
  QueryPtr phi;
  if (!phi_text.empty()) phi = parse_query(phi_text, schema).root;
  AnalyzedQuery rewritten = rewrite_single_fd(fd, schema, phi);
  std::string dsl = to_dsl(rewritten.root, schema.relation_name());
  if (args.format == "table")
    std::cout << dsl << "\n";
  else
    std::cout << Json{{"query", dsl}}.dump() << "\n";
  return kExitOk;
}

int cmd_hypergraph(const CommonArgs& args, bool stats, bool minimize) {
  Instance instance = load_instance(args);
  ConstraintSet cs = load_constraints(args, instance.schema());
  if (!stats) throw InvalidArgument("hypergraph needs --stats");
  ConflictHypergraph hg(instance, cs, HgMode::Materialized,
                        args.edge_budget);
  std::cout << stats_to_json(hg.stats(minimize)).dump() << "\n";
  return kExitOk;
}

int cmd_gen(const std::string& kind, const std::string& input_path,
            const std::string& out_prefix, bool large,
            std::size_t node_budget) {
  std::string input = read_file(input_path);
  std::optional<GeneratedProblem> gp;
  std::optional<bool> source_answer;  // satisfiable / colorable
  std::string source_key;
  if (kind == "monotone3sat" || kind == "yfree") {
    CnfFormula f = parse_dimacs(input);
    gp = (kind == "monotone3sat") ? gen_monotone3sat(f) : gen_3sat_yfree(f);
    source_key = "source_satisfiable";
    if (!large) source_answer = brute_sat(f);
  } else if (kind == "threecol") {
    UndirectedGraph g = parse_edge_list(input);
    gp = gen_3col(g);
    source_key = "source_colorable";
    if (!large) source_answer = brute_3col(g);
  } else {
    throw InvalidArgument("unknown reduction '" + kind +
                          "' (monotone3sat, threecol, yfree)");
  }
  std::string csv_path = out_prefix + ".csv";
  std::string constraints_path = out_prefix + ".constraints";
  std::string query_path = out_prefix + ".query";
  write_file(csv_path, serialize_instance(gp->instance));
  write_file(constraints_path, gp->constraints_text);
  write_file(query_path, gp->query_text + "\n");

  Json j;
  j["facts"] = gp->instance.size();
  j["files"] = Json::array({csv_path, constraints_path, query_path});
  if (large) {
    j["verified"] = "skipped";
    std::cout << j.dump() << "\n";
    return kExitOk;
  }
  j[source_key] = *source_answer;
  try {
    OracleOptions opts;
    opts.node_budget = node_budget;
    bool falsifiable = exists_falsifying_repair(gp->instance, gp->constraints,
                                                gp->query, opts);
    j["falsifying_repair"] = falsifiable;
    bool verified = (falsifiable == *source_answer);
    j["verified"] = verified;
    std::cout << j.dump() << "\n";
    return verified ? kExitOk : kExitFailure;
  } catch (const BudgetError&) {
    j["verified"] = "budget-exceeded";
    std::cout << j.dump() << "\n";
    return kExitOk;
  }
}

int cmd_selftest(std::uint64_t seed, std::size_t qfree_cases,
                 std::size_t rewrite_cases, std::size_t reduction_cases,
                 std::size_t structural_cases, unsigned threads) {
  std::vector<selftest::SuiteResult> results;
  results.push_back(selftest::run_qfree_suite(seed, qfree_cases, threads));
  results.push_back(selftest::run_rewrite_suite(seed, rewrite_cases, threads));
  results.push_back(selftest::run_reduction_suite(seed, reduction_cases,
                                                  reduction_cases, threads));
  results.push_back(
      selftest::run_structural_suite(seed, structural_cases, threads));
  bool all_passed = true;
  for (const auto& r : results) {
    std::cout << (r.passed() ? "PASS" : "FAIL") << " " << r.name << ": "
              << r.cases << " cases, " << r.failures << " failures\n";
    std::cerr << "  (" << r.name << " took " << r.seconds << " s)\n";
    for (const std::string& d : r.failure_details)
      std::cerr << "  failure:\n" << d;
    all_passed = all_passed && r.passed();
  }
  return all_passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cqa: consistent query answers over inconsistent single-relation "
      "databases under denial constraints and functional dependencies"};
  app.require_subcommand(1);

  CommonArgs args;

  auto add_common = [&](CLI::App* cmd, bool needs_constraints = true) {
    cmd->add_option("--instance", args.instance_path,
                    "instance CSV file")->required();
    if (needs_constraints)
      cmd->add_option("--constraints", args.constraints_path,
                      "constraint DSL file")->required();
    cmd->add_option("--format", args.format, "json or table (default json)");
    cmd->add_option("--edge-budget", args.edge_budget,
                    "materialized hypergraph edge budget");
    cmd->add_option("--node-budget", args.node_budget,
                    "oracle search node budget");
    cmd->add_option("--threads", args.threads,
                    "worker threads for clause checks");
  };

  CLI::App* check = app.add_subcommand("check", "test constraint satisfaction");
  add_common(check);

  CLI::App* repairs = app.add_subcommand("repairs", "enumerate or count repairs");
  add_common(repairs);
  bool do_enumerate = false, do_count = false;
  repairs->add_flag("--enumerate", do_enumerate,
                    "stream repairs as JSON lines");
  repairs->add_flag("--count", do_count, "print the exact repair count");

  CLI::App* answer = app.add_subcommand("answer", "compute consistent answers");
  add_common(answer);
  answer->add_option("--query", args.query_text, "query text");
  answer->add_option("--query-file", args.query_file, "file with query text");
  answer->add_option("--strategy", args.strategy,
                     "auto, qfree, rewrite or oracle");
  answer->add_option("--hypergraph", args.hypergraph,
                     "auto, materialized or lazy");
  answer->add_flag("--timings", args.timings, "include timings in stats");

  CLI::App* rewrite = app.add_subcommand(
      "rewrite", "print the single-FD rewriting of exists t. R(t) & phi(t)");
  rewrite->add_option("--instance", args.instance_path,
                      "instance CSV file (schema source)")->required();
  rewrite->add_option("--format", args.format, "json or table");
  std::string fd_text, phi_text;
  rewrite->add_option("--fd", fd_text, "the FD, e.g. 'Name -> City, Street'")
      ->required();
  rewrite->add_option("--phi", phi_text,
                      "builtin-only condition over attribute names");

  CLI::App* hypergraph = app.add_subcommand("hypergraph",
                                            "conflict hypergraph statistics");
  add_common(hypergraph);
  bool do_stats = false, do_minimize = false;
  hypergraph->add_flag("--stats", do_stats, "emit hypergraph statistics");
  hypergraph->add_flag("--minimize-edges", do_minimize,
                       "drop superset edges before computing statistics");

  CLI::App* gen = app.add_subcommand(
      "gen", "generate a hardness-construction problem triple");
  std::string gen_kind, gen_input, gen_prefix;
  bool gen_large = false;
  gen->add_option("kind", gen_kind, "monotone3sat, threecol or yfree")
      ->required();
  gen->add_option("--input", gen_input,
                  "DIMACS CNF (sat kinds) or edge list (threecol)")
      ->required();
  gen->add_option("--out-prefix", gen_prefix,
                  "output path prefix for .csv/.constraints/.query")
      ->required();
  gen->add_flag("--large", gen_large,
                "skip the brute-force verification of the construction");
  gen->add_option("--node-budget", args.node_budget,
                  "verification search node budget");

  CLI::App* selftest = app.add_subcommand(
      "selftest", "run the randomized differential suites");
  std::uint64_t st_seed = 1;
  std::size_t st_qfree = 200, st_rewrite = 200, st_reduction = 50,
              st_structural = 60;
  selftest->add_option("--seed", st_seed, "suite seed");
  selftest->add_option("--qfree-cases", st_qfree, "qfree suite size");
  selftest->add_option("--rewrite-cases", st_rewrite, "rewrite suite size");
  selftest->add_option("--reduction-cases", st_reduction,
                       "cases per reduction family");
  selftest->add_option("--structural-cases", st_structural,
                       "structural suite size");
  selftest->add_option("--threads", args.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(args);
    if (repairs->parsed()) return cmd_repairs(args, do_enumerate, do_count);
    if (answer->parsed()) return cmd_answer(args);
    if (rewrite->parsed()) return cmd_rewrite(args, fd_text, phi_text);
    if (hypergraph->parsed())
      return cmd_hypergraph(args, do_stats, do_minimize);
    if (gen->parsed())
      return cmd_gen(gen_kind, gen_input, gen_prefix, gen_large,
                     args.node_budget);
    if (selftest->parsed())
      return cmd_selftest(st_seed, st_qfree, st_rewrite, st_reduction,
                          st_structural, args.threads);
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TypeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
