#include "pinacolada/sat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace pinacolada::sat {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr std::uint64_t kRestartBase = 100;
constexpr std::uint64_t kReduceInterval = 2000;

// Finite Luby sequence: 1 1 2 1 1 2 4 1 1 2 ...
double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

} // namespace

SatSolver::SatSolver(std::uint64_t seed) : seed_(seed) {
  // Slot 0 is unused so variables can be indexed directly.
  assigns_.push_back(Value::Undef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  polarity_.push_back(true);
  activity_.push_back(0);
  seen_.push_back(0);
  heap_index_.push_back(-1);
  watches_.resize(2);
}

Var SatSolver::new_var() {
  const Var v = ++num_vars_;
  assigns_.push_back(Value::Undef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  polarity_.push_back(true);
  double act = 0;
  if (seed_ != 0) {
    std::mt19937_64 rng(seed_ ^ (static_cast<std::uint64_t>(v) * 0x9e3779b97f4a7c15ULL));
    act = std::uniform_real_distribution<double>(0, 1e-5)(rng);
  }
  activity_.push_back(act);
  seen_.push_back(0);
  heap_index_.push_back(-1);
  watches_.resize(2 * (static_cast<std::size_t>(v) + 1));
  heap_insert(v);
  phase_ = Phase::None;
  return v;
}

void SatSolver::add_clause(std::span<const Lit> lits) {
  for (Lit l : lits) {
    if (!l.valid() || l.var() > num_vars_)
      throw std::invalid_argument("add_clause: literal references unallocated variable");
  }
  if (record_) recorded_.emplace_back(lits.begin(), lits.end());
  phase_ = Phase::None;
  if (!ok_) return;

  bool taut = false;
  Clause c = normalize_clause(lits, taut);
  if (taut) return;
  // Callers only add clauses between solves, at level 0.
  Clause kept;
  for (Lit l : c) {
    const Value v = value(l);
    if (v == Value::True) return;
    if (v == Value::Undef) kept.push_back(l);
  }
  if (kept.empty()) {
    ok_ = false;
    return;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return;
  }
  clauses_.push_back({std::move(kept), 0, false, false});
  attach(static_cast<CRef>(clauses_.size() - 1));
}

void SatSolver::attach(CRef c) {
  const auto &lits = clauses_[c].lits;
  watches_[lits[0].code()].push_back({c, lits[1]});
  watches_[lits[1].code()].push_back({c, lits[0]});
}

void SatSolver::enqueue(Lit l, CRef reason) {
  const Var v = l.var();
  assigns_[v] = l.negated() ? Value::False : Value::True;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

SatSolver::CRef SatSolver::propagate() {
  CRef confl = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = ~p;
    auto &ws = watches_[false_lit.code()];
    ++stats_.propagations;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i++];
      if (value(w.blocker) == Value::True) {
        ws[j++] = w;
        continue;
      }
      auto &c = clauses_[w.cref];
      if (c.deleted) continue;
      auto &lits = c.lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      const Lit first = lits[0];
      if (first != w.blocker && value(first) == Value::True) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != Value::False) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1].code()].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) == Value::False) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (confl != kNoReason) break;
  }
  return confl;
}

void SatSolver::bump_var(Var v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (Var u = 1; u <= num_vars_; ++u) activity_[u] *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_index_[v] >= 0) heap_up(static_cast<std::size_t>(heap_index_[v]));
}

void SatSolver::bump_clause(ClauseData &c) {
  c.activity += clause_inc_;
  if (c.activity > 1e20) {
    for (CRef r : learnts_) clauses_[r].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

bool SatSolver::redundant(Lit l) const {
  // Local minimisation: `l` can go if every other literal of its reason is
  // already in the learnt clause or fixed at level 0.
  const CRef r = reason_[l.var()];
  if (r == kNoReason) return false;
  const auto &lits = clauses_[r].lits;
  for (std::size_t k = 1; k < lits.size(); ++k) {
    const Var u = lits[k].var();
    if (!seen_[u] && level_[u] > 0) return false;
  }
  return true;
}

void SatSolver::analyze(CRef confl, std::vector<Lit> &learnt, int &bt_level) {
  int path_count = 0;
  Lit p = kUndefLit;
  learnt.assign(1, kUndefLit);
  std::size_t index = trail_.size();

  do {
    auto &c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (std::size_t j = (p.valid() ? 1 : 0); j < c.lits.size(); ++j) {
      const Lit q = c.lits[j];
      const Var v = q.var();
      if (!seen_[v] && level_[v] > 0) {
        bump_var(v);
        seen_[v] = 1;
        if (level_[v] >= decision_level()) {
          ++path_count;
        } else {
          learnt.push_back(q);
        }
      }
    }
    while (!seen_[trail_[--index].var()]) {
    }
    p = trail_[index];
    confl = reason_[p.var()];
    seen_[p.var()] = 0;
    --path_count;
  } while (path_count > 0);
  learnt[0] = ~p;

  std::vector<Lit> all(learnt.begin(), learnt.end());
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i)
    if (!redundant(learnt[i])) learnt[keep++] = learnt[i];
  learnt.resize(keep);

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var()] > level_[learnt[max_i].var()]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[learnt[1].var()];
  }
  for (Lit l : all) seen_[l.var()] = 0;
}

void SatSolver::analyze_final(Lit p) {
  // `p` is true and contradicts an assumption; collect the assumptions in
  // its implication cone.
  failed_.clear();
  failed_.push_back(~p);
  if (decision_level() == 0) return;
  seen_[p.var()] = 1;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[0];) {
    const Var x = trail_[i].var();
    if (!seen_[x]) continue;
    if (reason_[x] == kNoReason) {
      if (trail_[i] != p) failed_.push_back(trail_[i]);
    } else {
      const auto &lits = clauses_[reason_[x]].lits;
      for (std::size_t k = 1; k < lits.size(); ++k)
        if (level_[lits[k].var()] > 0) seen_[lits[k].var()] = 1;
    }
    seen_[x] = 0;
  }
  seen_[p.var()] = 0;
}

void SatSolver::backtrack(int level) {
  if (decision_level() <= level) return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[static_cast<std::size_t>(level)];) {
    const Var v = trail_[i].var();
    assigns_[v] = Value::Undef;
    reason_[v] = kNoReason;
    polarity_[v] = trail_[i].negated();
    heap_insert(v);
  }
  trail_.resize(trail_lim_[static_cast<std::size_t>(level)]);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

Lit SatSolver::pick_branch_lit() {
  while (!heap_.empty()) {
    const Var v = heap_pop();
    if (assigns_[v] == Value::Undef) return Lit(v, polarity_[v]);
  }
  return kUndefLit;
}

bool SatSolver::locked(CRef c) const {
  const Lit first = clauses_[c].lits[0];
  return value(first) == Value::True && reason_[first.var()] == c;
}

void SatSolver::reduce_db() {
  ++stats_.reductions;
  std::vector<CRef> candidates;
  for (CRef r : learnts_)
    if (!clauses_[r].deleted) candidates.push_back(r);
  std::stable_sort(candidates.begin(), candidates.end(), [&](CRef a, CRef b) {
    return clauses_[a].activity < clauses_[b].activity;
  });
  const std::size_t target = candidates.size() / 2;
  std::size_t removed = 0;
  for (CRef r : candidates) {
    if (removed >= target) break;
    auto &c = clauses_[r];
    if (c.lits.size() <= 2 || locked(r)) continue;
    c.deleted = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    ++removed;
  }
  learnts_.erase(std::remove_if(learnts_.begin(), learnts_.end(),
                                [&](CRef r) { return clauses_[r].deleted; }),
                 learnts_.end());
  for (auto &ws : watches_) {
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Watcher &w) { return clauses_[w.cref].deleted; }),
             ws.end());
  }
}

SolveResult SatSolver::search(std::uint64_t conflict_budget, bool &done) {
  std::uint64_t conflicts_here = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      ++conflicts_here;
      if (decision_level() == 0) {
        ok_ = false;
        failed_.clear();
        done = true;
        return SolveResult::Unsat;
      }
      int bt_level = 0;
      analyze(confl, learnt, bt_level);
      backtrack(bt_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        clauses_.push_back({learnt, 0, true, false});
        const auto cref = static_cast<CRef>(clauses_.size() - 1);
        learnts_.push_back(cref);
        attach(cref);
        bump_clause(clauses_[cref]);
        enqueue(learnt[0], cref);
      }
      ++stats_.learned;
      var_inc_ /= kVarDecay;
      clause_inc_ /= kClauseDecay;
      continue;
    }

    if (conflicts_here >= conflict_budget) {
      backtrack(0);
      return SolveResult::Unsat; // ignored: done stays false
    }
    if (stats_.conflicts >= next_reduce_) {
      next_reduce_ = stats_.conflicts + kReduceInterval;
      reduce_db();
    }

    Lit next = kUndefLit;
    while (decision_level() < static_cast<int>(assumptions_.size())) {
      const Lit a = assumptions_[static_cast<std::size_t>(decision_level())];
      const Value v = value(a);
      if (v == Value::True) {
        trail_lim_.push_back(trail_.size());
      } else if (v == Value::False) {
        analyze_final(~a);
        done = true;
        return SolveResult::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (!next.valid()) {
      ++stats_.decisions;
      next = pick_branch_lit();
      if (!next.valid()) {
        done = true;
        return SolveResult::Sat;
      }
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }
}

SolveResult SatSolver::solve(std::span<const Lit> assumptions) {
  for (Lit l : assumptions) {
    if (!l.valid() || l.var() > num_vars_)
      throw std::invalid_argument("solve: assumption references unallocated variable");
  }
  ++stats_.solve_calls;
  model_.clear();
  failed_.clear();
  if (!ok_) {
    phase_ = Phase::Unsat;
    return SolveResult::Unsat;
  }
  assumptions_.assign(assumptions.begin(), assumptions.end());

  SolveResult result = SolveResult::Unsat;
  bool done = false;
  for (std::uint64_t restart = 0; !done; ++restart) {
    if (restart > 0) ++stats_.restarts;
    const auto budget = static_cast<std::uint64_t>(luby(2, restart) * kRestartBase);
    result = search(budget, done);
  }
  if (result == SolveResult::Sat) model_ = assigns_;
  backtrack(0);
  phase_ = result == SolveResult::Sat ? Phase::Sat : Phase::Unsat;
  return result;
}

bool SatSolver::model(Var v) const {
  if (phase_ != Phase::Sat) throw QueriedWrongPhase("model() requires a SAT result");
  if (v == 0 || v >= model_.size()) throw std::out_of_range("model(): unknown variable");
  return model_[v] == Value::True;
}

const std::vector<Lit> &SatSolver::failed_assumptions() const {
  if (phase_ != Phase::Unsat)
    throw QueriedWrongPhase("failed_assumptions() requires an UNSAT result");
  return failed_;
}

void SatSolver::heap_insert(Var v) {
  if (heap_index_[v] >= 0) return;
  heap_index_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void SatSolver::heap_up(std::size_t i) {
  const Var v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<int>(i);
}

void SatSolver::heap_down(std::size_t i) {
  const Var v = heap_[i];
  for (;;) {
    const std::size_t l = 2 * i + 1;
    if (l >= heap_.size()) break;
    const std::size_t r = l + 1;
    const std::size_t child = (r < heap_.size() && heap_less(heap_[r], heap_[l])) ? r : l;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<int>(i);
}

Var SatSolver::heap_pop() {
  const Var top = heap_.front();
  heap_index_[top] = -1;
  const Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

// ---------------------------------------------------------------------------
// DIMACS
// ---------------------------------------------------------------------------

Cnf read_dimacs(std::istream &in) {
  Cnf cnf;
  std::string line;
  bool header = false;
  std::size_t declared_clauses = 0;
  Clause current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c" || first[0] == 'c') continue;
    if (first == "%") break; // SATLIB trailer
    if (first == "p") {
      std::string fmt;
      long long vars = -1;
      long long ncl = -1;
      if (!(ls >> fmt >> vars >> ncl) || fmt != "cnf" || vars < 0 || ncl < 0)
        throw DimacsError("line " + std::to_string(line_no) + ": malformed problem line");
      cnf.var_count = static_cast<Var>(vars);
      declared_clauses = static_cast<std::size_t>(ncl);
      header = true;
      continue;
    }
    if (!header)
      throw DimacsError("line " + std::to_string(line_no) + ": clause before 'p cnf' header");
    std::istringstream vs(line);
    long long v = 0;
    while (vs >> v) {
      if (v == 0) {
        cnf.clauses.push_back(current);
        current.clear();
        continue;
      }
      if (static_cast<unsigned long long>(v < 0 ? -v : v) > cnf.var_count)
        throw DimacsError("line " + std::to_string(line_no) + ": literal " + std::to_string(v) +
                          " exceeds declared variable count");
      current.push_back(Lit::from_dimacs(v));
    }
    if (!vs.eof())
      throw DimacsError("line " + std::to_string(line_no) + ": unexpected token");
  }
  if (!header) throw DimacsError("missing 'p cnf' header");
  if (!current.empty()) cnf.clauses.push_back(current);
  (void)declared_clauses;
  return cnf;
}

void write_dimacs(std::ostream &out, Var var_count, const std::vector<Clause> &clauses) {
  out << "p cnf " << var_count << " " << clauses.size() << "\n";
  for (const auto &c : clauses) {
    for (Lit l : c) out << l.to_dimacs() << " ";
    out << "0\n";
  }
}

} // namespace pinacolada::sat
