// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "corpus.hpp"
#include "encode_harness.hpp"
#include "fuzzer.hpp"
#include "pinacolada/cli.hpp"
#include "pinacolada/concrete_oracle.hpp"
#include "pinacolada/explorer.hpp"
#include "sat_oracle.hpp"

using namespace pinacolada;
using explore::ExplorerConfig;
using explore::Mode;
using explore::Outcome;
using explore::Strategy;
using explore::Verdict;
namespace fs = std::filesystem;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt_secs(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << " s";
  return o.str();
}

// Records the first few failures so the summary line can name them.
struct Failures {
  std::size_t count = 0;
  std::string first;
  void add(const std::string &what) {
    if (count++ == 0) first = what;
  }
  std::string suffix() const {
    return count ? "; " + std::to_string(count) + " failure(s), first: " + first : "";
  }
};

ir::GotoProgram lower_source(const std::string &src) { return ir::lower(frontend::parse_source(src)); }

Verdict run_engine(const ir::GotoProgram &p, Strategy s, Mode m, unsigned width = 4, bool strict = false) {
  ExplorerConfig c;
  c.strategy = s;
  c.mode = m;
  c.int_width = width;
  c.fi_strict_assumptions = strict;
  c.record_queries = true;
  c.record_paths = true;
  return explore::explore(p, c);
}

std::string where(const Verdict &v) {
  if (!v.witness) return "-";
  return v.witness->function + ":" + std::to_string(v.witness->index);
}

// 1
Result solver_soundness() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<sat::Var> pick_n(3, 12);
  Failures bad;
  int sat_count = 0;
  Stopwatch clock;
  for (int i = 0; i < 500; ++i) {
    const sat::Var n = pick_n(rng);
    const auto m = static_cast<std::size_t>(std::lround(4.2 * n));
    const sat::Cnf cnf = testsupport::random_3cnf(rng, n, m);
    sat::SatSolver solver;
    testsupport::load(solver, cnf);
    const bool got = solver.solve() == sat::SolveResult::Sat;
    const bool want = testsupport::truth_table_sat(n, cnf.clauses);
    if (got != want) bad.add("instance " + std::to_string(i));
    else if (got && !testsupport::model_satisfies(solver, cnf.clauses)) bad.add("bad model on " + std::to_string(i));
    sat_count += got;
  }
  const double t = clock.seconds();
  Result r;
  r.pass = bad.count == 0 && t < 10.0;
  r.detail = std::to_string(500 - bad.count) + "/500 agree with truth tables (" + std::to_string(sat_count) +
             " SAT), " + fmt_secs(t) + " (limit 10 s)" + bad.suffix();
  return r;
}

// 2
Result incrementality() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<sat::Var> pick_n(4, 14);
  Failures bad;
  int solves = 0;
  for (int round = 0; round < 100; ++round) {
    const sat::Var n = pick_n(rng);
    sat::SatSolver inc;
    while (inc.num_vars() < n) inc.new_var();
    std::vector<sat::Clause> so_far;
    for (int step = 0; step < 40; ++step) {
      if (rng() % 3 != 0) {
        const sat::Clause c = testsupport::random_clause(rng, n);
        inc.add_clause(c);
        so_far.push_back(c);
        continue;
      }
      std::vector<sat::Lit> as;
      for (sat::Var v = 1; v <= n; ++v)
        if (rng() % 4 == 0) as.push_back(sat::Lit(v, rng() % 2));
      ++solves;
      const std::string tag = "round " + std::to_string(round) + " step " + std::to_string(step);
      const bool got = inc.solve(as) == sat::SolveResult::Sat;
      if (got && (!testsupport::model_satisfies(inc, so_far) ||
                  !std::all_of(as.begin(), as.end(), [&](sat::Lit l) { return inc.model_value(l); })))
        bad.add(tag + ": model");

      sat::SatSolver fresh;
      while (fresh.num_vars() < n) fresh.new_var();
      for (const auto &c : so_far) fresh.add_clause(c);
      if ((fresh.solve(as) == sat::SolveResult::Sat) != got) bad.add(tag + ": fresh");

      sat::SatSolver units;
      while (units.num_vars() < n) units.new_var();
      for (const auto &c : so_far) units.add_clause(c);
      for (sat::Lit l : as) units.add_clause({l});
      if ((units.solve() == sat::SolveResult::Sat) != got) bad.add(tag + ": units");

      if (testsupport::truth_table_sat(n, so_far, as) != got) bad.add(tag + ": truth table");
    }
  }
  Result r;
  r.pass = bad.count == 0;
  r.detail = std::to_string(solves) + " incremental solves over 100 interleavings match fresh, unit and truth-table"
             " results" + bad.suffix();
  return r;
}

// 3
Result encoder_exhaustive() {
  using namespace testsupport;
  Failures bad;
  std::size_t checked = 0;
  Stopwatch clock;
  for (BinaryOp op : kIntOps) {
    for (std::int64_t a = -8; a <= 7; ++a) {
      for (std::int64_t b = -8; b <= 7; ++b) {
        const auto want = apply_binary(op, a, b, 4);
        const auto got = int_result(op, a, b, 4, false);
        if (got != want || want != ref_binary(op, a, b, 4))
          bad.add(std::string(to_string(op)) + " " + std::to_string(a) + " " + std::to_string(b));
        ++checked;
      }
    }
  }
  for (BinaryOp op : kCmpOps) {
    for (std::int64_t a = -8; a <= 7; ++a) {
      for (std::int64_t b = -8; b <= 7; ++b) {
        if (cmp_result(op, a, b, 4) != (apply_binary(op, a, b, 4) != 0))
          bad.add(std::string(to_string(op)) + " " + std::to_string(a) + " " + std::to_string(b));
        ++checked;
      }
    }
  }
  for (BinaryOp op : {BinaryOp::And, BinaryOp::Or, BinaryOp::Eq, BinaryOp::Ne}) {
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        Harness h(4, false);
        const auto x = h.input(Type::Bool), y = h.input(Type::Bool);
        h.pin(x, p);
        h.pin(y, q);
        const Lit l = h.ctx.encode_bool(bin(op, x, y));
        const bool t = h.solver.solve({l}) == SolveResult::Sat;
        const bool f = h.solver.solve({~l}) == SolveResult::Sat;
        if (t == f || t != (apply_binary(op, p, q, 4) != 0)) bad.add("bool " + std::string(to_string(op)));
        ++checked;
      }
    }
  }
  // The division table at b = 0.
  for (std::int64_t a = -8; a <= 7; ++a)
    if (int_result(BinaryOp::Div, a, 0, 4, false) != 0 || int_result(BinaryOp::Mod, a, 0, 4, false) != 0)
      bad.add("x/0 with x=" + std::to_string(a));
  const double t = clock.seconds();
  Result r;
  r.pass = bad.count == 0 && t < 60.0;
  r.detail = std::to_string(checked) + " operator/operand cases forced by CNF equal the oracle arithmetic, " +
             fmt_secs(t) + " (limit 60 s)" + bad.suffix();
  return r;
}

struct Subject {
  std::string name;
  std::string source;
};

std::vector<Subject> corpus_subjects() {
  std::vector<Subject> out;
  for (const auto &c : testsupport::load_corpus()) out.push_back({c.name, c.source});
  return out;
}

// 4
Result engine_oracle_agreement() {
  auto subjects = corpus_subjects();
  const std::size_t corpus_size = subjects.size();
  for (std::uint64_t seed = 1; seed <= 200; ++seed)
    subjects.push_back({"fuzz#" + std::to_string(seed), testsupport::fuzz_program(seed)});
  Failures bad;
  std::size_t unsafe = 0, replayed = 0;
  for (const auto &s : subjects) {
    try {
      const auto p = lower_source(s.source);
      const auto o = oracle::enumerate_verdict(p, 4, 3);
      const Verdict v = run_engine(p, Strategy::Dfs, Mode::FullIncremental);
      const bool oracle_unsafe = o.outcome == oracle::OracleVerdict::Outcome::Unsafe;
      if (o.outcome == oracle::OracleVerdict::Outcome::StepLimit) {
        bad.add(s.name + ": oracle hit its step limit");
        continue;
      }
      if (v.outcome != (oracle_unsafe ? Outcome::Unsafe : Outcome::Safe)) {
        bad.add(s.name + ": engine " + explore::to_string(v.outcome) + ", oracle " + oracle::to_string(o.outcome));
        continue;
      }
      if (oracle_unsafe) {
        ++unsafe;
        if (v.witness && oracle::replay_witness(p, *v.witness, 4)) ++replayed;
        else bad.add(s.name + ": witness does not replay");
      }
    } catch (const std::exception &e) {
      bad.add(s.name + ": " + e.what());
    }
  }
  Result r;
  r.pass = bad.count == 0 && corpus_size >= 60;
  r.detail = std::to_string(subjects.size() - bad.count) + "/" + std::to_string(subjects.size()) + " programs (" +
             std::to_string(corpus_size) + " corpus + 200 fuzz) agree; " + std::to_string(replayed) + "/" +
             std::to_string(unsafe) + " witnesses replay" + bad.suffix();
  return r;
}

// 5
Result mode_equivalence() {
  Failures bad;
  const auto subjects = corpus_subjects();
  for (const auto &s : subjects) {
    const auto p = lower_source(s.source);
    for (Strategy st : {Strategy::Dfs, Strategy::Bfs}) {
      const Verdict pi = run_engine(p, st, Mode::PartialIncremental);
      const Verdict fi = run_engine(p, st, Mode::FullIncremental);
      const Verdict strict = run_engine(p, st, Mode::FullIncremental, 4, true);
      for (const Verdict *v : {&fi, &strict}) {
        if (v->outcome != pi.outcome || where(*v) != where(pi))
          bad.add(s.name + " (" + explore::to_string(st) + "): " + explore::to_string(v->outcome) + "@" + where(*v) +
                  " vs PI " + explore::to_string(pi.outcome) + "@" + where(pi));
      }
    }
  }
  Result r;
  r.pass = bad.count == 0;
  r.detail = std::to_string(subjects.size()) +
             " corpus programs: PI, FI and FI-strict give identical outcomes and violated assertions under DFS and BFS" +
             bad.suffix();
  return r;
}

// 6
Result strategy_equivalence() {
  Failures bad;
  std::size_t safe = 0;
  const auto subjects = corpus_subjects();
  for (const auto &s : subjects) {
    const auto p = lower_source(s.source);
    const Verdict d = run_engine(p, Strategy::Dfs, Mode::FullIncremental);
    const Verdict b = run_engine(p, Strategy::Bfs, Mode::FullIncremental);
    if (d.outcome != b.outcome) {
      bad.add(s.name + ": outcomes differ");
      continue;
    }
    if (d.outcome != Outcome::Safe || d.bounded) continue;
    ++safe;
    auto dp = d.completed_paths, bp = b.completed_paths;
    std::sort(dp.begin(), dp.end());
    std::sort(bp.begin(), bp.end());
    if (dp != bp) bad.add(s.name + ": path multisets differ");
  }
  Result r;
  r.pass = bad.count == 0;
  r.detail = std::to_string(subjects.size()) + " corpus programs agree on outcome; " + std::to_string(safe) +
             " SAFE programs have identical branch-direction multisets" + bad.suffix();
  return r;
}

// 7
Result loop_walk_regression() {
  Failures bad;
  const auto safe = lower_source("int main(){int x; int y; x=1; y=-1; while(x<3){if(y<0){x=x+1;}} assert(x==3); return 0;}");
  const std::size_t head = *safe.functions[0].loop_heads.begin();
  std::string head_checks;
  for (Mode m : {Mode::FullIncremental, Mode::PartialIncremental}) {
    const Verdict v = run_engine(safe, Strategy::Dfs, m, 32);
    std::vector<bool> checks;
    for (const auto &q : v.queries)
      if (q.kind == explore::QueryKind::Branch && q.at.index == head && q.polarity) checks.push_back(q.sat);
    head_checks.clear();
    for (bool c : checks) head_checks += c ? "SAT " : "UNSAT ";
    if (v.outcome != Outcome::Safe || v.bounded) bad.add("safe variant not SAFE");
    if (checks != std::vector<bool>{true, true, false}) bad.add("loop-head checks " + head_checks);
    if (v.stats.solver_queries != 11 || v.stats.states_explored != 6)
      bad.add("stats " + std::to_string(v.stats.solver_queries) + " queries, " +
              std::to_string(v.stats.states_explored) + " states");
  }

  const auto stuck = lower_source("int main(){int x; int y; x=1; y=2; while(x<3){if(y<0){x=x+1;}} assert(x==3); return 0;}");
  ExplorerConfig c;
  c.unwind = 10;
  Verdict v = explore::explore(stuck, c);
  if (v.outcome != Outcome::Safe || !v.bounded) bad.add("y=2 with unwind 10 is not SAFE-bounded");
  c.unwind.reset();
  c.max_states = 1000;
  v = explore::explore(stuck, c);
  if (v.outcome != Outcome::ResourceLimit) bad.add("y=2 with max-states is " + explore::to_string(v.outcome));
  c.max_states.reset();
  c.timeout_sec = 0.5;
  v = explore::explore(stuck, c);
  if (v.outcome != Outcome::ResourceLimit) bad.add("y=2 with timeout is " + explore::to_string(v.outcome));

  Result r;
  r.pass = bad.count == 0;
  r.detail = "safe variant SAFE after 2 unrollings, loop-head true checks [" + head_checks.substr(0, head_checks.size() - 1) +
             "]; y=2 gives SAFE-bounded with unwind 10 and RESOURCE_LIMIT under max-states and timeout" + bad.suffix();
  return r;
}

// 8
Result diamond_accounting() {
  Failures bad;
  const auto p = lower_source(
      "int main(){int a = nondet_int(); int b = nondet_int(); int r = 0;"
      " if (a > 0) { r = r + 1; } else { r = r - 1; }"
      " if (b > 0) { r = r + 2; } else { r = r - 2; }"
      " assert(r != 5); return 0;}");
  // Hand trace: 2 queries at the first branch, 2 at the second on each of
  // its 2 paths, 1 assertion query on each of the 4 paths.
  const Verdict pi = run_engine(p, Strategy::Dfs, Mode::PartialIncremental);
  const Verdict fi = run_engine(p, Strategy::Dfs, Mode::FullIncremental);
  if (pi.outcome != Outcome::Safe || fi.outcome != Outcome::Safe) bad.add("not SAFE");
  if (pi.stats.solver_instances_created != 4) bad.add("PI instances " + std::to_string(pi.stats.solver_instances_created));
  if (fi.stats.solver_instances_created != 1) bad.add("FI instances " + std::to_string(fi.stats.solver_instances_created));
  for (const Verdict *v : {&pi, &fi}) {
    if (v->stats.solver_queries != 10) bad.add("queries " + std::to_string(v->stats.solver_queries));
    if (v->stats.states_explored != 7) bad.add("states " + std::to_string(v->stats.states_explored));
    if (v->stats.max_frontier_size != 2) bad.add("frontier " + std::to_string(v->stats.max_frontier_size));
  }
  Result r;
  r.pass = bad.count == 0;
  r.detail = "PI+DFS created " + std::to_string(pi.stats.solver_instances_created) + " solver instances, FI created " +
             std::to_string(fi.stats.solver_instances_created) + "; " + std::to_string(pi.stats.solver_queries) +
             " queries, " + std::to_string(pi.stats.states_explored) + " states" + bad.suffix();
  return r;
}

// 9
Result first_violation() {
  Failures bad;
  const auto p = lower_source(
      "int main(){int x = nondet_int();"
      " if (x > 0) { assert(x > 7); } else { int i = 0; while (true) { i = i + 1; } }"
      " return 0;}");
  int runs = 0;
  for (Strategy st : {Strategy::Dfs, Strategy::Bfs}) {
    for (Mode m : {Mode::FullIncremental, Mode::PartialIncremental}) {
      ExplorerConfig c;
      c.strategy = st;
      c.mode = m;
      c.int_width = 4;
      c.record_queries = true;
      c.timeout_sec = 30;
      const Verdict v = explore::explore(p, c);
      ++runs;
      const std::string tag = explore::to_string(st) + "/" + explore::to_string(m);
      if (v.outcome != Outcome::Unsafe) {
        bad.add(tag + ": " + explore::to_string(v.outcome));
        continue;
      }
      std::size_t violating = v.queries.size();
      for (std::size_t i = 0; i < v.queries.size(); ++i) {
        const auto &q = v.queries[i];
        if (q.kind == explore::QueryKind::Assert && !q.polarity && q.sat) {
          violating = i;
          break;
        }
      }
      if (violating + 1 != v.queries.size())
        bad.add(tag + ": " + std::to_string(v.queries.size() - violating - 1) + " queries after the violation");
      if (v.stats.paths_completed != 0 || v.stats.paths_truncated != 0) bad.add(tag + ": another path was finished");
      if (!v.witness || !oracle::replay_witness(p, *v.witness, 4)) bad.add(tag + ": witness does not replay");
    }
  }
  Result r;
  r.pass = bad.count == 0;
  r.detail = std::to_string(runs) + " strategy/mode runs stop UNSAFE with zero queries after the violating one" +
             bad.suffix();
  return r;
}

// 10
struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "pinacolada");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool graphml_ok(const std::string &path, std::string &why) {
  try {
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml(path, tree);
    std::size_t violation_nodes = 0, nodes = 0, edges = 0;
    for (const auto &[tag, child] : tree.get_child("graphml.graph")) {
      if (tag == "edge") ++edges;
      if (tag != "node") continue;
      ++nodes;
      for (const auto &[t, d] : child)
        if (t == "data" && d.get<std::string>("<xmlattr>.key") == "violation" && d.data() == "true") ++violation_nodes;
    }
    if (violation_nodes != 1 || edges + 1 != nodes) {
      why = "unexpected graph shape";
      return false;
    }
    return true;
  } catch (const std::exception &e) {
    why = e.what();
    return false;
  }
}

Result cli_contract() {
  Failures bad;
  const fs::path dir = fs::temp_directory_path() / ("pinacolada_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto write = [&](const std::string &name, const std::string &text) {
    const auto path = (dir / name).string();
    std::ofstream(path) << text;
    return path;
  };
  auto expect = [&](const std::string &what, const CliRun &r, int code, const std::string &out) {
    if (r.code != code || r.out != out)
      bad.add(what + ": exit " + std::to_string(r.code) + ", stdout '" + r.out + "'");
  };

  const auto safe = write("safe.mc", "int main(){int x = nondet_int(); assert(x == x); return 0;}\n");
  const auto unsafe = write("unsafe.mc", "int main(){int x; x = nondet_int(); if (x > 0) { assert(x != 5); } return 0;}\n");
  const auto stuck = write("stuck.mc", "int main(){int x; int y; x=1; y=2; while(x<3){if(y<0){x=x+1;}} assert(x==3); return 0;}\n");
  const auto broken = write("broken.mc", "int main() {\n  int x = ;\n}\n");
  const auto prop = write("p.prp", "CHECK( init(main()), LTL(G ! call(reach_error())) )\n");
  const auto other_prop = write("o.prp", "CHECK( init(main()), LTL(G valid-memsafety) )\n");

  expect("safe", cli_run({safe}), 0, "VERIFICATION SUCCESSFUL\n");
  expect("unsafe", cli_run({unsafe}), 10, "VERIFICATION FAILED\n");
  expect("bounded", cli_run({stuck, "--unwind", "10"}), 0,
         "note: the unwinding limit 10 cut at least one path short; this result may be unsound\n"
         "VERIFICATION SUCCESSFUL (BOUNDED)\n");
  expect("resource limit", cli_run({stuck, "--max-states", "200"}), 2, "RESOURCE LIMIT\n");
  expect("timeout", cli_run({stuck, "--timeout-sec", "0.3"}), 2, "RESOURCE LIMIT\n");
  expect("property file", cli_run({safe, "--propertyfile", prop}), 0, "VERIFICATION SUCCESSFUL\n");
  expect("other property", cli_run({safe, "--propertyfile", other_prop}), 1, "");
  expect("--32 --64", cli_run({safe, "--32", "--64"}), 1, "");
  const auto parse = cli_run({broken});
  expect("parse error", parse, 1, "");
  if (parse.err.rfind(broken + ":2:", 0) != 0) bad.add("parse error not positioned: " + parse.err);

  const auto warn = cli_run({unsafe, "--bfs", "--partial-incremental"});
  expect("bfs+pi", warn, 10, "VERIFICATION FAILED\n");
  if (warn.err.find("not recommended") == std::string::npos) bad.add("no not-recommended warning");
  for (const auto &flags : std::vector<std::vector<std::string>>{{}, {"--bfs"}, {"--partial-incremental"}}) {
    auto args = flags;
    args.insert(args.begin(), unsafe);
    if (cli_run(args).err.find("not recommended") != std::string::npos) bad.add("spurious warning");
  }

  std::size_t graphs = 0;
  for (const auto &c : testsupport::load_corpus()) {
    if (c.expect != "UNSAFE") continue;
    const auto g = (dir / (c.name + ".graphml")).string();
    const auto r = cli_run({c.path, "--int-width", "4", "--graphml-witness", g});
    std::string why;
    if (r.code != 10) bad.add(c.name + ": exit " + std::to_string(r.code));
    else if (!graphml_ok(g, why)) bad.add(c.name + ": " + why);
    else ++graphs;
  }
  std::error_code ec;
  fs::remove_all(dir, ec);

  Result r;
  r.pass = bad.count == 0;
  r.detail = "exit codes and verdict lines exact, BFS+PI warning present; " + std::to_string(graphs) +
             " UNSAFE corpus GraphML files well-formed" + bad.suffix();
  return r;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"solver soundness", solver_soundness},
      {"incrementality", incrementality},
      {"encoder/oracle agreement at W=4", encoder_exhaustive},
      {"engine/oracle verdict agreement", engine_oracle_agreement},
      {"mode equivalence", mode_equivalence},
      {"strategy equivalence", strategy_equivalence},
      {"loop walkthrough regression", loop_walk_regression},
      {"eager-check accounting", diamond_accounting},
      {"first-violation termination", first_violation},
      {"CLI contract", cli_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    Stopwatch clock;
    try {
      r = criteria[i].second();
    } catch (const std::exception &e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << r.detail
              << " [" << fmt_secs(clock.seconds()) << "]\n"
              << std::flush;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
