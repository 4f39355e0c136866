#pragma once

// Single-path symbolic exploration with an eager feasibility check at every
// branch. Two solver disciplines:
//
//   partial incremental (PI): one solver per path; segments are added
//     unguarded; a state popped from the worklist gets a fresh solver with
//     its whole prefix re-encoded.
//   full incremental (FI): one solver for the whole run; every committed
//     segment is guarded by an activation literal and a path is selected by
//     assuming its chain of activation literals.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinacolada/cnf.hpp"
#include "pinacolada/goto_program.hpp"
#include "pinacolada/ssa_state.hpp"
#include "pinacolada/witness.hpp"

namespace pinacolada::explore {

enum class Strategy : std::uint8_t { Dfs, Bfs };
enum class Mode : std::uint8_t { FullIncremental, PartialIncremental };
enum class Outcome : std::uint8_t { Safe, Unsafe, ResourceLimit };

std::string to_string(Strategy s);
std::string to_string(Mode m);
std::string to_string(Outcome o);

struct ExplorerConfig {
  Strategy strategy = Strategy::Dfs;
  Mode mode = Mode::FullIncremental;
  std::optional<std::uint32_t> unwind;
  std::size_t max_call_depth = 4096;
  unsigned int_width = 32;
  bool stop_at_first_violation = true;
  /// FI: keep abandoned activation literals as negative assumptions instead
  /// of adding them as unit clauses.
  bool fi_strict_assumptions = false;
  std::optional<std::uint64_t> max_states;
  std::optional<double> timeout_sec;
  bool fold_constants = true;
  std::uint64_t solver_seed = 0;

  // Diagnostics.
  bool record_queries = false;
  bool record_paths = false;
  bool record_cnf = false;
  /// Re-checks every queried prefix with a fresh solver; throws
  /// std::logic_error if an infeasible prefix is ever stepped.
  bool verify_prefixes = false;
};

enum class QueryKind : std::uint8_t { Branch, Assume, Assert };

struct QueryRecord {
  QueryKind kind;
  ir::Location at;
  bool polarity; // for Assert, false = violation query
  bool sat;
};

struct Violation {
  ir::Location at;
  int line = 0;
  Witness witness;
};

struct Verdict {
  Outcome outcome = Outcome::Safe;
  bool bounded = false;
  std::optional<Witness> witness;
  ExploreStats stats;
  std::string limit_reason;
  std::vector<std::string> warnings;

  std::vector<QueryRecord> queries;          // record_queries
  std::vector<std::string> completed_paths;  // record_paths: "TF..." per finished path
  std::vector<Violation> violations;         // every violation found
  std::optional<sat::Cnf> cnf;               // record_cnf: last solver's clauses
};

Verdict explore(const ir::GotoProgram &p, const ExplorerConfig &cfg);

/// Outcome of the two polarity queries at a branch.
struct Feasibility {
  bool true_feasible = false;
  bool false_feasible = false;
  bool folded = false;
  unsigned queries = 0;
};

/// Stand-alone feasibility check of `cond` at the end of `state`'s path,
/// using a fresh solver over the whole prefix.
Feasibility branch_feasibility(const symex::SsaContext &ctx, const symex::SymbolicState &state,
                               const symex::SymExprPtr &cond, unsigned width);

/// Fresh-solver satisfiability of a state's path condition.
bool prefix_feasible(const symex::SymbolicState &state, unsigned width);

} // namespace pinacolada::explore
