#pragma once

// Incremental CDCL solver: two watched literals, first-UIP learning with
// non-chronological backjumping, EVSIDS activities, Luby restarts, phase
// saving. Assumptions are decided first (MiniSat discipline), so a failed
// solve can report which assumptions were responsible.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinacolada/cnf.hpp"

namespace pinacolada::sat {

enum class SolveResult : std::uint8_t { Sat, Unsat };

class QueriedWrongPhase : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct SolverStats {
  std::uint64_t solve_calls = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t decisions = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  std::uint64_t reductions = 0;
};

class SatSolver {
public:
  /// A non-zero seed perturbs initial activities; 0 is fully deterministic.
  explicit SatSolver(std::uint64_t seed = 0);

  Var new_var();
  Var num_vars() const { return num_vars_; }

  /// Adds a permanent clause. An empty clause, or one whose literals are
  /// all false at level 0, makes the instance unsatisfiable for good.
  void add_clause(std::span<const Lit> lits);
  void add_clause(std::initializer_list<Lit> lits) {
    add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  SolveResult solve(std::span<const Lit> assumptions = {});
  SolveResult solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
  }

  /// Value of `v` in the last model; only after a SAT result.
  bool model(Var v) const;
  bool model_value(Lit l) const { return model(l.var()) != l.negated(); }

  /// Subset of the last assumptions sufficient for unsatisfiability; only
  /// after an UNSAT result.
  const std::vector<Lit> &failed_assumptions() const;

  const SolverStats &stats() const { return stats_; }

  /// When enabled, every clause passed to add_clause is kept verbatim for
  /// DIMACS export.
  void set_record_clauses(bool on) { record_ = on; }
  const std::vector<Clause> &recorded_clauses() const { return recorded_; }

  /// False once the clause database alone is unsatisfiable.
  bool okay() const { return ok_; }

private:
  enum class Value : std::uint8_t { False, True, Undef };
  enum class Phase : std::uint8_t { None, Sat, Unsat };
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = ~CRef{0};

  struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  Value value(Lit l) const {
    const Value v = assigns_[l.var()];
    if (v == Value::Undef) return v;
    return (v == Value::True) != l.negated() ? Value::True : Value::False;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef confl, std::vector<Lit> &learnt, int &bt_level);
  bool redundant(Lit l) const;
  void analyze_final(Lit p);
  void backtrack(int level);
  Lit pick_branch_lit();
  SolveResult search(std::uint64_t conflict_budget, bool &done);
  void attach(CRef c);
  void reduce_db();
  bool locked(CRef c) const;

  void bump_var(Var v);
  void bump_clause(ClauseData &c);

  // Activity-ordered heap of variables; ties go to the lower index.
  bool heap_less(Var a, Var b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void heap_insert(Var v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  Var heap_pop();

  Var num_vars_ = 0;
  bool ok_ = true;
  Phase phase_ = Phase::None;
  bool record_ = false;
  std::uint64_t seed_;

  std::vector<ClauseData> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_; // indexed by the literal that became false
  std::vector<Value> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<bool> polarity_; // saved phase: true = negative
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<Var> heap_;
  std::vector<int> heap_index_;

  std::vector<Lit> assumptions_;
  std::vector<Value> model_;
  std::vector<Lit> failed_;
  std::vector<Clause> recorded_;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::uint64_t next_reduce_ = 2000;

  SolverStats stats_;
};

} // namespace pinacolada::sat
