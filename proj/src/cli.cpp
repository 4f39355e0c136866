#include "pinacolada/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "pinacolada/concrete_oracle.hpp"
#include "pinacolada/explorer.hpp"
#include "pinacolada/frontend.hpp"
#include "pinacolada/goto_program.hpp"
#include "pinacolada/sat_solver.hpp"
#include "pinacolada/semantics.hpp"
#include "pinacolada/witness.hpp"

namespace pinacolada::cli {

namespace {

struct Options {
  std::string file;
  bool bfs = false;
  bool partial_incremental = false;
  std::optional<std::uint32_t> unwind;
  std::string graphml_witness;
  std::string json_witness;
  std::string property_file;
  bool arch32 = false;
  bool arch64 = false;
  std::optional<unsigned> int_width;
  bool dump_goto = false;
  std::string dump_cnf;
  std::optional<double> timeout_sec;
  std::optional<std::uint64_t> max_states;
  std::size_t max_call_depth = 4096;
  bool fi_strict = false;
  bool stats = false;
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary so an interrupted run never leaves a partial
// file behind.
bool write_file(const std::string &path, const std::string &content, std::ostream &err) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) {
      err << "error: cannot write '" << path << "'\n";
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      return false;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    err << "error: cannot write '" << path << "': " << ec.message() << "\n";
    return false;
  }
  return true;
}

void check_property(const std::string &text) {
  static const std::regex reach(
      R"(\s*CHECK\s*\(\s*init\s*\(\s*main\s*\(\s*\)\s*\)\s*,\s*LTL\s*\(\s*G\s*!\s*call\s*\(\s*)"
      R"((reach_error|__VERIFIER_error)\s*\(\s*\)\s*\)\s*\)\s*\)\s*)");
  if (!std::regex_match(text, reach))
    throw UsageError("unsupported property: only unreach-call (reach-safety) is recognised");
}

ir::GotoProgram load_program(const std::string &path, std::ostream &err) {
  const std::string source = read_file(path);
  frontend::Ast ast = frontend::parse_source(source);
  for (const auto &w : ast.warnings)
    err << path << ":" << w.line << ":" << w.column << ": warning: " << w.message << "\n";
  ir::GotoProgram program = ir::lower(ast);
  for (const auto &w : ir::reachable_check(program))
    err << path << ":" << w.line << ": warning: " << w.message << "\n";
  return program;
}

int run_sat(const std::string &path, std::ostream &out) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  const sat::Cnf cnf = sat::read_dimacs(in);
  sat::SatSolver solver;
  while (solver.num_vars() < cnf.var_count) solver.new_var();
  for (const auto &c : cnf.clauses) solver.add_clause(c);
  if (solver.solve() == sat::SolveResult::Unsat) {
    out << "s UNSATISFIABLE\n";
    return 20;
  }
  out << "s SATISFIABLE\n";
  std::string line = "v";
  for (sat::Var v = 1; v <= cnf.var_count; ++v) {
    const std::string lit = " " + std::string(solver.model(v) ? "" : "-") + std::to_string(v);
    if (line.size() + lit.size() > 78) {
      out << line << "\n";
      line = "v";
    }
    line += lit;
  }
  out << line << " 0\n";
  return 10;
}

int run_oracle(const std::string &path, unsigned width, std::size_t max_inputs,
               std::uint64_t step_limit, std::ostream &out, std::ostream &err) {
  const ir::GotoProgram program = load_program(path, err);
  const auto verdict = oracle::enumerate_verdict(program, width, max_inputs, step_limit);
  out << oracle::to_json(program, verdict) << "\n";
  return kExitSafe;
}

int run_verify(const Options &o, std::ostream &out, std::ostream &err) {
  if (!o.property_file.empty()) check_property(read_file(o.property_file));

  const auto started = std::chrono::steady_clock::now();
  const ir::GotoProgram program = load_program(o.file, err);
  if (o.dump_goto) out << ir::dump(program);

  explore::ExplorerConfig cfg;
  cfg.strategy = o.bfs ? explore::Strategy::Bfs : explore::Strategy::Dfs;
  cfg.mode = o.partial_incremental ? explore::Mode::PartialIncremental
                                   : explore::Mode::FullIncremental;
  cfg.unwind = o.unwind;
  cfg.max_call_depth = o.max_call_depth;
  cfg.int_width = o.int_width ? *o.int_width : (o.arch64 ? 64 : 32);
  cfg.fi_strict_assumptions = o.fi_strict;
  cfg.max_states = o.max_states;
  cfg.timeout_sec = o.timeout_sec;
  cfg.record_cnf = !o.dump_cnf.empty();

  explore::Verdict v = explore::explore(program, cfg);
  for (const auto &w : v.warnings) err << "warning: " << w << "\n";

  if (v.witness && !oracle::replay_witness(program, *v.witness, cfg.int_width)) {
    err << "internal error: the violation witness does not replay concretely\n";
    return kExitInternal;
  }

  RunReport report;
  report.outcome = explore::to_string(v.outcome);
  report.bounded = v.bounded;
  report.witness = v.witness;
  report.stats = v.stats;
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report.mode = explore::to_string(cfg.mode);
  report.strategy = explore::to_string(cfg.strategy);
  report.int_width = cfg.int_width;
  report.unwind = cfg.unwind;
  report.limit_reason = v.limit_reason;
  report.warnings = v.warnings;

  if (o.stats) {
    const auto &s = v.stats;
    out << "states_explored: " << s.states_explored << "\n"
        << "solver_queries: " << s.solver_queries << "\n"
        << "solver_instances_created: " << s.solver_instances_created << "\n"
        << "max_live_instances: " << s.max_live_instances << "\n"
        << "max_frontier_size: " << s.max_frontier_size << "\n"
        << "clauses_added: " << s.clauses_added << "\n"
        << "folded_decisions: " << s.folded_decisions << "\n";
  }

  int code = kExitSafe;
  switch (v.outcome) {
  case explore::Outcome::Safe:
    if (v.bounded) {
      out << "note: the unwinding limit " << *cfg.unwind
          << " cut at least one path short; this result may be unsound\n";
      out << "VERIFICATION SUCCESSFUL (BOUNDED)\n";
    } else {
      out << "VERIFICATION SUCCESSFUL\n";
    }
    break;
  case explore::Outcome::Unsafe:
    out << "VERIFICATION FAILED\n";
    code = kExitUnsafe;
    break;
  case explore::Outcome::ResourceLimit:
    err << "resource limit: " << v.limit_reason << "\n";
    out << "RESOURCE LIMIT\n";
    code = kExitResourceLimit;
    break;
  }
  out.flush();

  bool io_ok = true;
  if (!o.graphml_witness.empty() && v.outcome != explore::Outcome::ResourceLimit) {
    std::ostringstream gml;
    if (v.witness) {
      emit_graphml(gml, *v.witness, o.file);
    } else {
      std::map<std::string, std::string> config{{"mode", report.mode},
                                                {"strategy", report.strategy},
                                                {"int_width", std::to_string(cfg.int_width)}};
      emit_graphml_stub(gml, o.file, config);
    }
    io_ok = write_file(o.graphml_witness, gml.str(), err) && io_ok;
  }
  if (!o.json_witness.empty()) io_ok = write_file(o.json_witness, to_json(report) + "\n", err) && io_ok;
  if (!o.dump_cnf.empty() && v.cnf) {
    std::ostringstream cnf;
    sat::write_dimacs(cnf, v.cnf->var_count, v.cnf->clauses);
    io_ok = write_file(o.dump_cnf, cnf.str(), err) && io_ok;
  }
  return io_ok ? code : kExitResourceLimit;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Symbolic execution with eager infeasibility checks for MiniC programs",
               "pinacolada"};
  app.set_version_flag("--version", kToolVersion);
  Options o;
  app.add_option("file", o.file, "MiniC program to verify");
  app.add_flag("--bfs", o.bfs, "breadth-first exploration (default: depth-first)");
  app.add_flag("--partial-incremental", o.partial_incremental,
               "one solver per path, rebuilt on backtrack (default: full incremental)");
  app.add_option("--unwind", o.unwind, "loop unwinding limit; exceeding it cuts the path")
      ->check(CLI::PositiveNumber);
  app.add_option("--graphml-witness", o.graphml_witness, "write a GraphML witness");
  app.add_option("--json-witness", o.json_witness, "write the run report as JSON");
  app.add_option("--propertyfile", o.property_file, "reach-safety property file");
  auto *f32 = app.add_flag("--32", o.arch32, "32-bit int (default)");
  auto *f64 = app.add_flag("--64", o.arch64, "64-bit int");
  f32->excludes(f64);
  app.add_option("--int-width", o.int_width, "int width in bits, overrides --32/--64")
      ->check(CLI::Range(kMinWidth, kMaxWidth));
  app.add_flag("--dump-goto", o.dump_goto, "print the lowered program");
  app.add_option("--dump-cnf", o.dump_cnf, "write the final solver clause set as DIMACS");
  app.add_option("--timeout-sec", o.timeout_sec, "wall-clock budget")->check(CLI::PositiveNumber);
  app.add_option("--max-states", o.max_states, "explored-state budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-call-depth", o.max_call_depth, "call stack limit")
      ->check(CLI::PositiveNumber);
  app.add_flag("--fi-strict-assumptions", o.fi_strict,
               "keep abandoned activation literals as assumptions instead of units");
  app.add_flag("--stats", o.stats, "print exploration statistics");

  std::string sat_file;
  auto *sat_cmd = app.add_subcommand("sat", "solve a DIMACS CNF file");
  sat_cmd->add_option("file", sat_file, "DIMACS file")->required();

  std::string oracle_file;
  unsigned oracle_width = 4;
  std::size_t oracle_inputs = 0;
  std::uint64_t oracle_steps = oracle::kDefaultStepLimit;
  auto *oracle_cmd = app.add_subcommand("oracle", "brute-force verdict by concrete enumeration");
  oracle_cmd->add_option("file", oracle_file, "MiniC program")->required();
  oracle_cmd->add_option("--int-width", oracle_width, "int width in bits")
      ->check(CLI::Range(kMinWidth, kMaxWidth));
  oracle_cmd->add_option("--max-inputs", oracle_inputs, "nondet inputs per run");
  oracle_cmd->add_option("--step-limit", oracle_steps, "instructions per run");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitSafe;
  } catch (const CLI::CallForVersion &) {
    out << kToolVersion << "\n";
    return kExitSafe;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sat_cmd->parsed()) return run_sat(sat_file, out);
    if (oracle_cmd->parsed())
      return run_oracle(oracle_file, oracle_width, oracle_inputs, oracle_steps, out, err);
    if (o.file.empty()) throw UsageError("no input file (see --help)");
    return run_verify(o, out, err);
  } catch (const frontend::FrontendError &e) {
    err << (oracle_cmd->parsed() ? oracle_file : o.file) << ":" << e.line() << ":" << e.column()
        << ": error: " << e.message() << "\n";
    return kExitUsage;
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sat::DimacsError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const oracle::EnumerationError &e) {
    err << "error: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

} // namespace pinacolada::cli
