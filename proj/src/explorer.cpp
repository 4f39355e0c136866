#include "pinacolada/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <memory>

#include "pinacolada/bitblast.hpp"
#include "pinacolada/sat_solver.hpp"
#include "pinacolada/semantics.hpp"

namespace pinacolada::explore {

using encode::EncodingContext;
using sat::Lit;
using symex::PathEvent;
using symex::SymbolicState;
using symex::SymExprPtr;

std::string to_string(Strategy s) { return s == Strategy::Dfs ? "dfs" : "bfs"; }
std::string to_string(Mode m) {
  return m == Mode::FullIncremental ? "full-incremental" : "partial-incremental";
}
std::string to_string(Outcome o) {
  switch (o) {
  case Outcome::Safe: return "SAFE";
  case Outcome::Unsafe: return "UNSAFE";
  case Outcome::ResourceLimit: return "RESOURCE_LIMIT";
  }
  return "?";
}

namespace {

class CountingSink final : public encode::ClauseSink {
public:
  CountingSink(sat::SatSolver &solver, std::uint64_t &counter)
      : solver_(solver), counter_(counter) {}
  sat::Var new_var() override { return solver_.new_var(); }
  void add_clause(std::span<const Lit> lits) override {
    ++counter_;
    solver_.add_clause(lits);
  }
  using ClauseSink::add_clause;

private:
  sat::SatSolver &solver_;
  std::uint64_t &counter_;
};

// Encodes a whole prefix (every def, every committed condition) into a
// solver that has nothing else in it.
void encode_prefix(EncodingContext &enc, encode::ClauseSink &sink, const SymbolicState &s) {
  for (const symex::Def *d : s.defs.all()) enc.encode_def(*d);
  for (const PathEvent *ev : s.trace.all()) {
    if (!ev->cond) continue;
    const Lit l = enc.encode_bool(ev->cond);
    const bool holds = ev->kind != PathEvent::Kind::Branch || ev->direction;
    sink.add_clause({holds ? l : ~l});
  }
}

struct LimitReached {
  std::string reason;
};

class Engine;

struct InstanceCounter {
  std::uint64_t live = 0;
  std::uint64_t created = 0;
  std::uint64_t max_live = 0;
};

sat::SatSolver &recording(sat::SatSolver &s, bool on) {
  s.set_record_clauses(on);
  return s;
}

// A PI path's private solver.
struct PiSolver {
  PiSolver(Engine &engine, const ExplorerConfig &cfg, InstanceCounter &counter,
           std::uint64_t &clause_counter)
      : engine(engine), counter(counter), solver(cfg.solver_seed),
        sink(recording(solver, cfg.record_cnf), clause_counter),
        enc(sink, cfg.int_width, cfg.fold_constants) {
    ++counter.live;
    ++counter.created;
    counter.max_live = std::max(counter.max_live, counter.live);
  }
  ~PiSolver();
  PiSolver(const PiSolver &) = delete;
  PiSolver &operator=(const PiSolver &) = delete;

  Engine &engine;
  InstanceCounter &counter;
  sat::SatSolver solver;
  CountingSink sink;
  EncodingContext enc;
};

// FI activation node. The literal guards one committed segment; a path
// enables its segments by assuming every literal on its chain.
struct ActNode {
  ActNode(Lit lit, std::shared_ptr<ActNode> parent, std::vector<Lit> &released)
      : lit(lit), parent(std::move(parent)), released(released) {}
  ~ActNode() {
    released.push_back(lit);
    // Iterative release of the unshared part of the chain.
    std::shared_ptr<ActNode> p = std::move(parent);
    while (p && p.use_count() == 1) {
      std::shared_ptr<ActNode> next = std::move(p->parent);
      p = std::move(next);
    }
  }
  ActNode(const ActNode &) = delete;
  ActNode &operator=(const ActNode &) = delete;

  Lit lit;
  std::shared_ptr<ActNode> parent;
  std::vector<Lit> &released;
};

struct Path {
  SymbolicState s;
  std::shared_ptr<PiSolver> pi; // PI; null until (re)built
  std::shared_ptr<ActNode> act; // FI
  std::size_t encoded = 0;      // defs already in the path's context
};

class Engine {
public:
  Engine(const ir::GotoProgram &p, const ExplorerConfig &cfg)
      : p_(p), cfg_(cfg), ctx_(p, cfg.unwind, cfg.max_call_depth),
        fi_solver_(cfg.solver_seed), fi_sink_(fi_solver_, verdict_.stats.clauses_added) {
    if (cfg.timeout_sec) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(*cfg.timeout_sec));
    }
  }

  Verdict run();
  void pi_destroyed(PiSolver &pi);

private:
  bool fi() const { return cfg_.mode == Mode::FullIncremental; }
  const ir::Instruction &instruction(const SymbolicState &s) const {
    return p_.functions[static_cast<std::size_t>(s.function)].body[s.pc];
  }

  void run_path(Path p);
  void count_state();
  void check_deadline() const;
  void push(Path p);

  // Mode operations.
  void sync(Path &p);
  void pi_backtrack(Path &p);
  Lit cond_lit(Path &p, const SymExprPtr &cond);
  bool query(Path &p, Lit l, QueryKind kind, bool polarity);
  void commit(Path &p, Lit l);
  std::shared_ptr<ActNode> fi_commit_segment(const std::shared_ptr<ActNode> &parent, Lit l);
  void flush_released();
  std::shared_ptr<PiSolver> new_pi();

  Witness build_witness(Path &p);
  void record_path(const SymbolicState &s);

  const ir::GotoProgram &p_;
  ExplorerConfig cfg_;
  symex::SsaContext ctx_;
  Verdict verdict_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  bool stopped_ = false;

  InstanceCounter instances_;
  PiSolver *last_pi_ = nullptr;

  // FI. Declared before the worklist so activation nodes are released into
  // a live vector.
  sat::SatSolver fi_solver_;
  CountingSink fi_sink_;
  std::unique_ptr<EncodingContext> fi_enc_;
  std::vector<Lit> released_;
  std::vector<Lit> disabled_;

  std::deque<Path> worklist_;
};

PiSolver::~PiSolver() {
  engine.pi_destroyed(*this);
  --counter.live;
}

void Engine::pi_destroyed(PiSolver &pi) {
  if (last_pi_ != &pi) return;
  if (cfg_.record_cnf) verdict_.cnf = sat::Cnf{pi.solver.num_vars(), pi.solver.recorded_clauses()};
  last_pi_ = nullptr;
}

std::shared_ptr<PiSolver> Engine::new_pi() {
  return std::make_shared<PiSolver>(*this, cfg_, instances_, verdict_.stats.clauses_added);
}

void Engine::count_state() {
  ++verdict_.stats.states_explored;
  if (cfg_.max_states && verdict_.stats.states_explored > *cfg_.max_states)
    throw LimitReached{"state budget of " + std::to_string(*cfg_.max_states) + " exhausted"};
}

void Engine::check_deadline() const {
  if (deadline_ && std::chrono::steady_clock::now() > *deadline_)
    throw LimitReached{"timeout after " + std::to_string(*cfg_.timeout_sec) + " s"};
}

void Engine::push(Path p) {
  worklist_.push_back(std::move(p));
  verdict_.stats.max_frontier_size =
      std::max<std::uint64_t>(verdict_.stats.max_frontier_size, worklist_.size());
}

void Engine::pi_backtrack(Path &p) {
  p.pi = new_pi();
  encode_prefix(p.pi->enc, p.pi->sink, p.s);
  p.encoded = p.s.defs.size();
}

void Engine::sync(Path &p) {
  if (!fi()) {
    if (!p.pi) {
      pi_backtrack(p);
      return;
    }
    for (const symex::Def *d : p.s.defs.suffix(p.encoded)) p.pi->enc.encode_def(*d);
  } else {
    encode::GuardSink guard(fi_sink_, p.act->lit);
    fi_enc_->set_sink(&guard);
    for (const symex::Def *d : p.s.defs.suffix(p.encoded)) fi_enc_->encode_def(*d);
    fi_enc_->set_sink(nullptr);
  }
  p.encoded = p.s.defs.size();
}

Lit Engine::cond_lit(Path &p, const SymExprPtr &cond) {
  if (!fi()) return p.pi->enc.encode_bool(cond);
  encode::GuardSink guard(fi_sink_, p.act->lit);
  fi_enc_->set_sink(&guard);
  const Lit l = fi_enc_->encode_bool(cond);
  fi_enc_->set_sink(nullptr);
  return l;
}

void Engine::flush_released() {
  for (Lit a : released_) {
    if (cfg_.fi_strict_assumptions) {
      disabled_.push_back(~a);
    } else {
      ++verdict_.stats.clauses_added;
      fi_solver_.add_clause({~a});
    }
  }
  released_.clear();
}

bool Engine::query(Path &p, Lit l, QueryKind kind, bool polarity) {
  ++verdict_.stats.solver_queries;
  sat::SolveResult r;
  if (!fi()) {
    last_pi_ = p.pi.get();
    r = p.pi->solver.solve({l});
  } else {
    flush_released();
    std::vector<Lit> assumptions;
    for (const ActNode *n = p.act.get(); n; n = n->parent.get()) assumptions.push_back(n->lit);
    std::reverse(assumptions.begin(), assumptions.end());
    assumptions.insert(assumptions.end(), disabled_.begin(), disabled_.end());
    assumptions.push_back(l);
    r = fi_solver_.solve(assumptions);
  }
  const bool sat = r == sat::SolveResult::Sat;
  if (cfg_.record_queries) verdict_.queries.push_back({kind, p.s.location(), polarity, sat});
  return sat;
}

std::shared_ptr<ActNode> Engine::fi_commit_segment(const std::shared_ptr<ActNode> &parent,
                                                   Lit l) {
  const Lit a(fi_solver_.new_var(), false);
  ++verdict_.stats.clauses_added;
  fi_solver_.add_clause({~a, l});
  return std::make_shared<ActNode>(a, parent, released_);
}

void Engine::commit(Path &p, Lit l) {
  if (fi()) {
    p.act = fi_commit_segment(p.act, l);
  } else {
    ++verdict_.stats.clauses_added;
    p.pi->solver.add_clause({l});
  }
}

Witness Engine::build_witness(Path &p) {
  Witness w;
  const auto &fn = p_.functions[static_cast<std::size_t>(p.s.function)];
  w.function = fn.name;
  w.index = p.s.pc;
  w.line = fn.body[p.s.pc].line;

  sat::SatSolver &solver = fi() ? fi_solver_ : p.pi->solver;
  EncodingContext &enc = fi() ? *fi_enc_ : p.pi->enc;
  auto model = [&](Lit l) { return solver.model_value(l); };

  std::size_t step = 0;
  std::size_t input = 0;
  for (const PathEvent *ev : p.s.trace.all()) {
    const auto &fn_at = p_.functions[static_cast<std::size_t>(ev->at.function)];
    const int line = fn_at.body[ev->at.index].line;
    if (ev->kind == PathEvent::Kind::Nondet && input < p.s.nondet_inputs.size()) {
      const auto &ref = p.s.nondet_inputs[input];
      w.nondet_inputs.push_back({static_cast<int>(input), p_.vars[ref.name.var].display,
                                 std::to_string(enc.value_of(enc.bits_of(ref), model)), line,
                                 step++});
      ++input;
    } else if (ev->kind == PathEvent::Kind::Branch) {
      w.branch_trace.push_back({fn_at.name, ev->at.index, line, ev->direction, step++});
    }
  }
  w.config = {{"mode", to_string(cfg_.mode)},
              {"strategy", to_string(cfg_.strategy)},
              {"int_width", std::to_string(cfg_.int_width)}};
  if (cfg_.unwind) w.config["unwind"] = std::to_string(*cfg_.unwind);
  return w;
}

void Engine::record_path(const SymbolicState &s) {
  if (!cfg_.record_paths) return;
  std::string dirs;
  for (const PathEvent *ev : s.trace.all())
    if (ev->kind == PathEvent::Kind::Branch) dirs += ev->direction ? 'T' : 'F';
  verdict_.completed_paths.push_back(std::move(dirs));
}

void Engine::run_path(Path p) {
  auto &stats = verdict_.stats;
  const unsigned width = cfg_.int_width;
  for (;;) {
    const symex::Stop stop = symex::advance(ctx_, p.s);
    if (stop == symex::Stop::Finished) {
      ++stats.paths_completed;
      record_path(p.s);
      return;
    }
    if (stop == symex::Stop::Truncated) {
      ++stats.paths_truncated;
      verdict_.bounded = true;
      return;
    }
    check_deadline();
    const auto &ins = instruction(p.s);

    if (ins.is<ir::Branch>()) {
      const SymExprPtr cond = symex::rewrite(ctx_, p.s, ins.as<ir::Branch>().cond);
      if (cfg_.fold_constants) {
        if (auto v = fold_constant(*cond, width)) {
          ++stats.folded_decisions;
          ++stats.pruned_successors;
          symex::take_branch(ctx_, p.s, cond, *v != 0);
          count_state();
          continue;
        }
      }
      sync(p);
      if (cfg_.verify_prefixes && !prefix_feasible(p.s, width))
        throw std::logic_error("explored a state with an infeasible path condition");
      const Lit l = cond_lit(p, cond);
      const bool t = query(p, l, QueryKind::Branch, true);
      const bool f = query(p, ~l, QueryKind::Branch, false);
      if (!t && !f) {
        stats.pruned_successors += 2;
        ++stats.paths_infeasible;
        return;
      }
      if (t && f) {
        auto [ts, fs] = symex::fork(ctx_, p.s, cond);
        Path tp{std::move(ts), nullptr, nullptr, p.encoded};
        Path fp{std::move(fs), nullptr, nullptr, p.encoded};
        if (fi()) {
          tp.act = fi_commit_segment(p.act, l);
          fp.act = fi_commit_segment(p.act, ~l);
        } else {
          tp.pi = p.pi;
          ++stats.clauses_added;
          tp.pi->solver.add_clause({l});
          // BFS keeps a live solver for every queued state; DFS rebuilds on
          // backtrack.
          if (cfg_.strategy == Strategy::Bfs) pi_backtrack(fp);
        }
        p = Path{}; // drop the parent's references before continuing
        count_state();
        count_state();
        if (cfg_.strategy == Strategy::Dfs) {
          push(std::move(fp));
          p = std::move(tp);
          continue;
        }
        push(std::move(tp));
        push(std::move(fp));
        return;
      }
      ++stats.pruned_successors;
      commit(p, t ? l : ~l);
      symex::take_branch(ctx_, p.s, cond, t);
      count_state();
      continue;
    }

    if (ins.is<ir::Assume>()) {
      const SymExprPtr cond = symex::rewrite(ctx_, p.s, ins.as<ir::Assume>().cond);
      if (cfg_.fold_constants) {
        if (auto v = fold_constant(*cond, width)) {
          ++stats.folded_decisions;
          if (*v == 0) {
            ++stats.pruned_successors;
            ++stats.paths_infeasible;
            return;
          }
          symex::commit_condition(ctx_, p.s, PathEvent::Kind::Assume, cond);
          continue;
        }
      }
      sync(p);
      if (cfg_.verify_prefixes && !prefix_feasible(p.s, width))
        throw std::logic_error("explored a state with an infeasible path condition");
      const Lit l = cond_lit(p, cond);
      if (!query(p, l, QueryKind::Assume, true)) {
        ++stats.pruned_successors;
        ++stats.paths_infeasible;
        return;
      }
      commit(p, l);
      symex::commit_condition(ctx_, p.s, PathEvent::Kind::Assume, cond);
      continue;
    }

    // ASSERT: one query for the violation, always.
    const SymExprPtr cond = symex::rewrite(ctx_, p.s, ins.as<ir::Assert>().cond);
    sync(p);
    if (cfg_.verify_prefixes && !prefix_feasible(p.s, width))
      throw std::logic_error("explored a state with an infeasible path condition");
    const Lit l = cond_lit(p, cond);
    if (query(p, ~l, QueryKind::Assert, false)) {
      Witness w = build_witness(p);
      verdict_.violations.push_back({p.s.location(), ins.line, w});
      if (!verdict_.witness) verdict_.witness = std::move(w);
      if (cfg_.stop_at_first_violation) {
        stopped_ = true;
        return;
      }
      if (!query(p, l, QueryKind::Assert, true)) {
        ++stats.paths_infeasible;
        return;
      }
    }
    commit(p, l);
    symex::commit_condition(ctx_, p.s, PathEvent::Kind::Assert, cond);
  }
}

Verdict Engine::run() {
  if (cfg_.mode == Mode::PartialIncremental && cfg_.strategy == Strategy::Bfs) {
    verdict_.warnings.push_back(
        "--bfs with --partial-incremental keeps a solver instance alive for every queued "
        "state; running with this combination is not recommended");
  }
  try {
    Path init{symex::initial_state(p_), nullptr, nullptr, 0};
    if (fi()) {
      fi_solver_.set_record_clauses(cfg_.record_cnf);
      fi_enc_ = std::make_unique<EncodingContext>(fi_sink_, cfg_.int_width, cfg_.fold_constants);
      ++instances_.created;
      instances_.max_live = 1;
      init.act = std::make_shared<ActNode>(Lit(fi_solver_.new_var(), false), nullptr, released_);
    } else {
      init.pi = new_pi();
    }
    ++verdict_.stats.states_explored;
    push(std::move(init));

    while (!worklist_.empty() && !stopped_) {
      check_deadline();
      Path p;
      if (cfg_.strategy == Strategy::Dfs) {
        p = std::move(worklist_.back());
        worklist_.pop_back();
      } else {
        p = std::move(worklist_.front());
        worklist_.pop_front();
      }
      run_path(std::move(p));
    }
    verdict_.outcome = verdict_.witness ? Outcome::Unsafe : Outcome::Safe;
  } catch (const LimitReached &e) {
    verdict_.outcome = verdict_.witness ? Outcome::Unsafe : Outcome::ResourceLimit;
    verdict_.limit_reason = e.reason;
  } catch (const symex::CallDepthExceeded &e) {
    verdict_.outcome = verdict_.witness ? Outcome::Unsafe : Outcome::ResourceLimit;
    verdict_.limit_reason = e.what();
  }
  if (verdict_.outcome != Outcome::Safe) verdict_.bounded = false;

  if (cfg_.record_cnf) {
    if (fi()) {
      verdict_.cnf = sat::Cnf{fi_solver_.num_vars(), fi_solver_.recorded_clauses()};
    } else if (last_pi_) {
      pi_destroyed(*last_pi_);
    }
  }
  last_pi_ = nullptr;
  worklist_.clear();

  auto &stats = verdict_.stats;
  stats.solver_instances_created = instances_.created;
  stats.max_live_instances = instances_.max_live;
  return std::move(verdict_);
}

} // namespace

Verdict explore(const ir::GotoProgram &p, const ExplorerConfig &cfg) {
  if (cfg.int_width < kMinWidth || cfg.int_width > kMaxWidth)
    throw encode::UnsupportedWidth("integer width must be between 4 and 64");
  Engine engine(p, cfg);
  return engine.run();
}

bool prefix_feasible(const SymbolicState &state, unsigned width) {
  sat::SatSolver solver;
  encode::SolverSink sink(solver);
  EncodingContext enc(sink, width);
  encode_prefix(enc, sink, state);
  return solver.solve() == sat::SolveResult::Sat;
}

Feasibility branch_feasibility(const symex::SsaContext &, const SymbolicState &state,
                               const SymExprPtr &cond, unsigned width) {
  Feasibility out;
  if (auto v = fold_constant(*cond, width)) {
    out.folded = true;
    out.true_feasible = *v != 0;
    out.false_feasible = *v == 0;
    return out;
  }
  sat::SatSolver solver;
  encode::SolverSink sink(solver);
  EncodingContext enc(sink, width);
  encode_prefix(enc, sink, state);
  const Lit l = enc.encode_bool(cond);
  out.true_feasible = solver.solve({l}) == sat::SolveResult::Sat;
  out.false_feasible = solver.solve({~l}) == sat::SolveResult::Sat;
  out.queries = 2;
  return out;
}

} // namespace pinacolada::explore
