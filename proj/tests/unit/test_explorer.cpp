#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <set>

#include "corpus.hpp"
#include "fuzzer.hpp"
#include "pinacolada/concrete_oracle.hpp"
#include "pinacolada/explorer.hpp"

using namespace pinacolada;
using namespace pinacolada::explore;

namespace {

ir::GotoProgram lower_source(const std::string &src) { return ir::lower(frontend::parse_source(src)); }

const char *kLoopWalk = "int main(){int x; int y; x=1; y=-1; while(x<3){if(y<0){x=x+1;}} assert(x==3); return 0;}";
const char *kLoopStuck = "int main(){int x; int y; x=1; y=2; while(x<3){if(y<0){x=x+1;}} assert(x==3); return 0;}";
const char *kDiamonds =
    "int main(){int a = nondet_int(); int b = nondet_int(); int r = 0;"
    " if (a > 0) { r = r + 1; } else { r = r - 1; }"
    " if (b > 0) { r = r + 2; } else { r = r - 2; }"
    " assert(r != 5); return 0;}";

Verdict run(const ir::GotoProgram &p, const ExplorerConfig &c) { return pinacolada::explore::explore(p, c); }

ExplorerConfig config(Strategy s, Mode m, unsigned width = 4) {
  ExplorerConfig c;
  c.strategy = s;
  c.mode = m;
  c.int_width = width;
  c.record_queries = true;
  c.record_paths = true;
  return c;
}

std::size_t unsat_pruning_queries(const Verdict &v) {
  return static_cast<std::size_t>(std::count_if(v.queries.begin(), v.queries.end(), [](const QueryRecord &q) {
    return q.kind != QueryKind::Assert && !q.sat;
  }));
}

struct Setup {
  Strategy s;
  Mode m;
  bool strict;
};

const Setup kSetups[] = {
    {Strategy::Dfs, Mode::FullIncremental, false},    {Strategy::Dfs, Mode::FullIncremental, true},
    {Strategy::Dfs, Mode::PartialIncremental, false}, {Strategy::Bfs, Mode::FullIncremental, false},
    {Strategy::Bfs, Mode::FullIncremental, true},     {Strategy::Bfs, Mode::PartialIncremental, false},
};

} // namespace

TEST(Explore, AssertFalseNeedsOneQuery) {
  const auto p = lower_source("int main(){assert(false); return 0;}");
  for (Mode m : {Mode::FullIncremental, Mode::PartialIncremental}) {
    const Verdict v = run(p, config(Strategy::Dfs, m));
    EXPECT_EQ(v.outcome, Outcome::Unsafe);
    EXPECT_EQ(v.stats.solver_queries, 1u);
    ASSERT_TRUE(v.witness);
    EXPECT_TRUE(v.witness->nondet_inputs.empty());
    EXPECT_TRUE(v.witness->branch_trace.empty());
    EXPECT_EQ(v.witness->line, 1);
  }
}

TEST(Explore, PositiveNotFiveWitness) {
  const auto p = lower_source("int main(){int x; x = nondet_int(); if (x > 0) { assert(x != 5); } return 0;}");
  const Verdict v = run(p, config(Strategy::Dfs, Mode::FullIncremental));
  ASSERT_EQ(v.outcome, Outcome::Unsafe);
  ASSERT_TRUE(v.witness);
  ASSERT_EQ(v.witness->nondet_inputs.size(), 1u);
  EXPECT_EQ(v.witness->nondet_inputs[0].variable, "x");
  EXPECT_EQ(v.witness->nondet_inputs[0].value, "5");
  ASSERT_EQ(v.witness->branch_trace.size(), 1u);
  EXPECT_TRUE(v.witness->branch_trace[0].direction);
  EXPECT_TRUE(oracle::replay_witness(p, *v.witness, 4));

  // 5 is the only violating value among all 16.
  int violating = 0;
  for (std::int64_t x = -8; x < 8; ++x) {
    const std::int64_t in[] = {x};
    if (oracle::run_concrete(p, in, {4}).outcome == oracle::RunResult::Outcome::Violation) {
      ++violating;
      EXPECT_EQ(x, 5);
    }
  }
  EXPECT_EQ(violating, 1);
}

TEST(Explore, LoopWalkHeadQueries) {
  const auto p = lower_source(kLoopWalk);
  const std::size_t head = *p.functions[0].loop_heads.begin();
  for (Mode m : {Mode::FullIncremental, Mode::PartialIncremental}) {
    const Verdict v = run(p, config(Strategy::Dfs, m));
    EXPECT_EQ(v.outcome, Outcome::Safe);
    EXPECT_FALSE(v.bounded);
    EXPECT_EQ(v.stats.solver_queries, 11u);
    EXPECT_EQ(v.stats.states_explored, 6u);
    std::vector<bool> head_true;
    for (const auto &q : v.queries)
      if (q.kind == QueryKind::Branch && q.at.index == head && q.polarity) head_true.push_back(q.sat);
    EXPECT_EQ(head_true, (std::vector<bool>{true, true, false}));
  }
  // The concrete run agrees: x ends at 3.
  EXPECT_EQ(oracle::run_concrete(p, {}, {4}).final_env.at("x"), 3);
}

TEST(Explore, StuckLoopNeedsUnwindOrBudget) {
  const auto p = lower_source(kLoopStuck);
  auto c = config(Strategy::Dfs, Mode::FullIncremental);
  c.unwind = 10;
  Verdict v = run(p, c);
  EXPECT_EQ(v.outcome, Outcome::Safe);
  EXPECT_TRUE(v.bounded);
  EXPECT_EQ(v.stats.paths_truncated, 1u);

  c.unwind.reset();
  c.max_states = 50;
  v = run(p, c);
  EXPECT_EQ(v.outcome, Outcome::ResourceLimit);
  EXPECT_FALSE(v.bounded);
  EXPECT_FALSE(v.limit_reason.empty());

  c.max_states.reset();
  c.record_queries = false;
  c.timeout_sec = 0.2;
  const auto t0 = std::chrono::steady_clock::now();
  v = run(p, c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(v.outcome, Outcome::ResourceLimit);
  EXPECT_LT(secs, 5.0);
}

TEST(Explore, TwoDiamondsAccounting) {
  const auto p = lower_source(kDiamonds);

  const Verdict pi = run(p, config(Strategy::Dfs, Mode::PartialIncremental));
  EXPECT_EQ(pi.outcome, Outcome::Safe);
  EXPECT_EQ(pi.stats.solver_queries, 10u);
  EXPECT_EQ(pi.stats.solver_instances_created, 4u);
  EXPECT_EQ(pi.stats.states_explored, 7u);
  EXPECT_EQ(pi.stats.max_frontier_size, 2u);
  EXPECT_TRUE(pi.warnings.empty());

  const Verdict fi = run(p, config(Strategy::Dfs, Mode::FullIncremental));
  EXPECT_EQ(fi.stats.solver_queries, 10u);
  EXPECT_EQ(fi.stats.solver_instances_created, 1u);
  EXPECT_EQ(fi.stats.max_live_instances, 1u);
  EXPECT_EQ(fi.stats.states_explored, 7u);

  const Verdict bfs_pi = run(p, config(Strategy::Bfs, Mode::PartialIncremental));
  EXPECT_EQ(bfs_pi.stats.solver_queries, 10u);
  EXPECT_EQ(bfs_pi.stats.max_live_instances, 4u);
  EXPECT_EQ(bfs_pi.stats.states_explored, 7u);
  EXPECT_EQ(bfs_pi.stats.max_frontier_size, 4u);
  ASSERT_EQ(bfs_pi.warnings.size(), 1u);
  EXPECT_NE(bfs_pi.warnings[0].find("not recommended"), std::string::npos);

  const Verdict bfs_fi = run(p, config(Strategy::Bfs, Mode::FullIncremental));
  EXPECT_EQ(bfs_fi.stats.solver_instances_created, 1u);
  EXPECT_EQ(bfs_fi.stats.max_frontier_size, 4u);
  EXPECT_TRUE(bfs_fi.warnings.empty());

  auto paths = pi.completed_paths;
  std::sort(paths.begin(), paths.end());
  EXPECT_EQ(paths, (std::vector<std::string>{"FF", "FT", "TF", "TT"}));
}

TEST(Explore, StraightLineUsesOneInstance) {
  const auto p = lower_source("int main(){int x = nondet_int(); assert(x == x); return 0;}");
  const Verdict v = run(p, config(Strategy::Dfs, Mode::PartialIncremental));
  EXPECT_EQ(v.outcome, Outcome::Safe);
  EXPECT_EQ(v.stats.solver_instances_created, 1u);
  EXPECT_EQ(v.stats.solver_queries, 1u);
  EXPECT_EQ(v.stats.states_explored, 1u);
}

TEST(Explore, BranchFeasibility) {
  using namespace pinacolada::symex;
  {
    const auto p = lower_source("int main(){int x = nondet_int(); if (x > 0) { x = 1; } return 0;}");
    SsaContext ctx(p);
    SymbolicState s = initial_state(p);
    ASSERT_EQ(advance(ctx, s), Stop::QueryPoint);
    const auto cond = rewrite(ctx, s, p.functions[0].body[s.pc].as<ir::Branch>().cond);
    const Feasibility f = branch_feasibility(ctx, s, cond, 4);
    EXPECT_TRUE(f.true_feasible);
    EXPECT_TRUE(f.false_feasible);
    EXPECT_FALSE(f.folded);
    EXPECT_EQ(f.queries, 2u);
  }
  {
    const auto p = lower_source("int main(){int x = 0; if (1 == 1) { x = 1; } return 0;}");
    SsaContext ctx(p);
    SymbolicState s = initial_state(p);
    ASSERT_EQ(advance(ctx, s), Stop::QueryPoint);
    const auto cond = rewrite(ctx, s, p.functions[0].body[s.pc].as<ir::Branch>().cond);
    const Feasibility f = branch_feasibility(ctx, s, cond, 4);
    EXPECT_TRUE(f.true_feasible);
    EXPECT_FALSE(f.false_feasible);
    EXPECT_TRUE(f.folded);
    EXPECT_EQ(f.queries, 0u);
  }
  {
    const auto p = lower_source(
        "int main(){int y = nondet_int(); assume(y < 0); if (y >= 0) { assert(false); } return 0;}");
    SsaContext ctx(p);
    SymbolicState s = initial_state(p);
    ASSERT_EQ(advance(ctx, s), Stop::QueryPoint);
    const auto acond = rewrite(ctx, s, p.functions[0].body[s.pc].as<ir::Assume>().cond);
    commit_condition(ctx, s, PathEvent::Kind::Assume, acond);
    ASSERT_EQ(advance(ctx, s), Stop::QueryPoint);
    const auto cond = rewrite(ctx, s, p.functions[0].body[s.pc].as<ir::Branch>().cond);
    const Feasibility f = branch_feasibility(ctx, s, cond, 4);
    EXPECT_FALSE(f.true_feasible);
    EXPECT_TRUE(f.false_feasible);
    EXPECT_TRUE(prefix_feasible(s, 4));

    // No concrete input reaches the true side either.
    EXPECT_EQ(oracle::enumerate_verdict(p, 4, 1).outcome, oracle::OracleVerdict::Outcome::Safe);
    EXPECT_EQ(run(p, config(Strategy::Dfs, Mode::FullIncremental)).outcome, Outcome::Safe);
  }
}

TEST(Explore, FirstViolationStopsImmediately) {
  // The false side never terminates; the violation must be reported
  // without stepping it.
  const auto p = lower_source(
      "int main(){int x = nondet_int(); if (x > 0) { assert(false); } else { int i = 0; while (true) { i = i + 1; } }"
      " return 0;}");
  for (const auto &st : kSetups) {
    auto c = config(st.s, st.m);
    c.fi_strict_assumptions = st.strict;
    c.timeout_sec = 10;
    const Verdict v = run(p, c);
    ASSERT_EQ(v.outcome, Outcome::Unsafe);
    ASSERT_FALSE(v.queries.empty());
    const auto &last = v.queries.back();
    EXPECT_EQ(last.kind, QueryKind::Assert);
    EXPECT_FALSE(last.polarity);
    EXPECT_TRUE(last.sat);
    EXPECT_EQ(v.violations.size(), 1u);
    EXPECT_EQ(v.stats.paths_completed, 0u);
  }
}

TEST(Explore, AllViolationsWhenNotStopping) {
  const auto p = lower_source(
      "int main(){int x = nondet_int(); assert(x != 1); assert(x != 2); if (x > 4) { assert(x != 6); } return 0;}");
  auto c = config(Strategy::Dfs, Mode::FullIncremental);
  c.stop_at_first_violation = false;
  const Verdict v = run(p, c);
  EXPECT_EQ(v.outcome, Outcome::Unsafe);
  ASSERT_EQ(v.violations.size(), 3u);
  for (const auto &viol : v.violations) EXPECT_TRUE(oracle::replay_witness(p, viol.witness, 4));
  EXPECT_EQ(*v.witness, v.violations[0].witness);
}

TEST(Explore, CallDepthLimit) {
  const auto p = lower_source("int f(int n){ return f(n + 1); } int main(){int r = f(0); return r;}");
  auto c = config(Strategy::Dfs, Mode::FullIncremental);
  c.max_call_depth = 32;
  const Verdict v = run(p, c);
  EXPECT_EQ(v.outcome, Outcome::ResourceLimit);
  EXPECT_FALSE(v.limit_reason.empty());
}

TEST(Explore, SeedDoesNotChangeVerdict) {
  const auto p = lower_source(kDiamonds);
  auto c = config(Strategy::Dfs, Mode::FullIncremental);
  const Verdict a = run(p, c);
  c.solver_seed = 12345;
  const Verdict b = run(p, c);
  EXPECT_EQ(a.outcome, b.outcome);
  EXPECT_EQ(a.stats.solver_queries, b.stats.solver_queries);
  EXPECT_EQ(a.completed_paths, b.completed_paths);
}

TEST(Explore, RecordCnf) {
  const auto p = lower_source(kDiamonds);
  auto c = config(Strategy::Dfs, Mode::FullIncremental);
  c.record_cnf = true;
  const Verdict v = run(p, c);
  ASSERT_TRUE(v.cnf);
  EXPECT_GT(v.cnf->clauses.size(), 0u);
}

// Properties over the corpus and generated programs.

namespace {

struct Subject {
  std::string name;
  std::string source;
};

std::vector<Subject> subjects(int fuzz_count) {
  std::vector<Subject> out;
  for (const auto &c : testsupport::load_corpus()) out.push_back({c.name, c.source});
  for (int i = 0; i < fuzz_count; ++i)
    out.push_back({"fuzz " + std::to_string(i), testsupport::fuzz_program(static_cast<std::uint64_t>(i) + 7000)});
  return out;
}

} // namespace

TEST(ExploreProperty, ModesAndStrategiesAgreeWithOracle) {
  for (const auto &subj : subjects(60)) {
    SCOPED_TRACE(subj.name + "\n" + subj.source);
    const auto p = lower_source(subj.source);
    const auto o = oracle::enumerate_verdict(p, 4, 3);
    ASSERT_NE(o.outcome, oracle::OracleVerdict::Outcome::StepLimit);
    const bool unsafe = o.outcome == oracle::OracleVerdict::Outcome::Unsafe;

    std::optional<Verdict> ref_dfs, ref_bfs;
    for (const auto &st : kSetups) {
      auto c = config(st.s, st.m);
      c.fi_strict_assumptions = st.strict;
      const Verdict v = run(p, c);
      ASSERT_EQ(v.outcome, unsafe ? Outcome::Unsafe : Outcome::Safe);
      EXPECT_FALSE(v.bounded);
      if (unsafe) {
        ASSERT_TRUE(v.witness);
        EXPECT_TRUE(oracle::replay_witness(p, *v.witness, 4));
      }
      auto &ref = st.s == Strategy::Dfs ? ref_dfs : ref_bfs;
      if (!ref) {
        ref = v;
        continue;
      }
      // Same strategy, different solver discipline: identical exploration.
      EXPECT_EQ(v.stats.states_explored, ref->stats.states_explored);
      EXPECT_EQ(v.stats.solver_queries, ref->stats.solver_queries);
      EXPECT_EQ(v.completed_paths, ref->completed_paths);
      if (unsafe) {
        EXPECT_EQ(v.witness->nondet_inputs.size(), ref->witness->nondet_inputs.size());
      }
    }
    if (!unsafe) {
      auto a = ref_dfs->completed_paths, b = ref_bfs->completed_paths;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b);
      EXPECT_EQ(ref_dfs->stats.states_explored, ref_bfs->stats.states_explored);
    }
  }
}

TEST(ExploreProperty, ViolatedAssertionSetsAgree) {
  for (const auto &subj : subjects(40)) {
    SCOPED_TRACE(subj.name);
    const auto p = lower_source(subj.source);
    std::optional<std::set<std::size_t>> ref;
    for (const auto &st : kSetups) {
      auto c = config(st.s, st.m);
      c.fi_strict_assumptions = st.strict;
      c.stop_at_first_violation = false;
      const Verdict v = run(p, c);
      std::set<std::size_t> sites;
      for (const auto &viol : v.violations) {
        sites.insert(viol.at.index * 1000 + static_cast<std::size_t>(viol.at.function));
        EXPECT_TRUE(oracle::replay_witness(p, viol.witness, 4));
      }
      if (!ref) ref = sites;
      EXPECT_EQ(sites, *ref);
    }
  }
}

TEST(ExploreProperty, NoInfeasibleStateIsStepped) {
  for (const auto &subj : subjects(30)) {
    SCOPED_TRACE(subj.name);
    const auto p = lower_source(subj.source);
    for (const auto &st : kSetups) {
      auto c = config(st.s, st.m);
      c.fi_strict_assumptions = st.strict;
      c.stop_at_first_violation = false;
      c.verify_prefixes = true;
      EXPECT_NO_THROW(run(p, c));
    }
  }
}

TEST(ExploreProperty, EveryPrunedSuccessorHasAnUnsatQuery) {
  for (const auto &subj : subjects(30)) {
    SCOPED_TRACE(subj.name);
    const auto p = lower_source(subj.source);
    for (Mode m : {Mode::FullIncremental, Mode::PartialIncremental}) {
      auto c = config(Strategy::Dfs, m);
      c.fold_constants = false;
      c.stop_at_first_violation = false;
      const Verdict v = run(p, c);
      EXPECT_EQ(v.stats.folded_decisions, 0u);
      EXPECT_EQ(v.stats.pruned_successors, unsat_pruning_queries(v));

      c.fold_constants = true;
      const Verdict f = run(p, c);
      EXPECT_GE(f.stats.pruned_successors, unsat_pruning_queries(f));
      EXPECT_LE(f.stats.pruned_successors, unsat_pruning_queries(f) + f.stats.folded_decisions);
      EXPECT_EQ(f.outcome, v.outcome);
    }
  }
}

TEST(ExploreProperty, BoundedIffTruncated) {
  for (const auto &subj : subjects(30)) {
    SCOPED_TRACE(subj.name);
    const auto p = lower_source(subj.source);
    for (std::uint32_t k : {1u, 2u, 3u}) {
      auto c = config(Strategy::Dfs, Mode::FullIncremental);
      c.unwind = k;
      const Verdict v = run(p, c);
      EXPECT_EQ(v.bounded, v.outcome == Outcome::Safe && v.stats.paths_truncated > 0);
      if (v.outcome == Outcome::Unsafe) {
        EXPECT_TRUE(oracle::replay_witness(p, *v.witness, 4));
      }
    }
  }
}

TEST(Explore, EndlessFoldedLoopTimesOut) {
  const auto p = lower_source("int main(){int i = 0; while (true) { i = i + 1; } return 0;}");
  for (Mode m : {Mode::FullIncremental, Mode::PartialIncremental}) {
    auto c = config(Strategy::Dfs, m);
    c.record_queries = false;
    c.timeout_sec = 0.3;
    const Verdict v = run(p, c);
    EXPECT_EQ(v.outcome, Outcome::ResourceLimit);
    EXPECT_EQ(v.stats.solver_queries, 0u);
    EXPECT_GT(v.stats.folded_decisions, 0u);
  }
}
