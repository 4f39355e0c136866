#include "pinacolada/ssa_state.hpp"

#include <cassert>

namespace pinacolada::symex {

namespace {

std::uint32_t frame_of(const ir::GotoProgram &p, const SymbolicState &s, VarId var) {
  return p.vars[var].global ? 0 : s.frame();
}

// Lands on `target` in the current function. Entering a loop head from
// anywhere but its back-edge restarts that loop's count.
void arrive(const SsaContext &ctx, SymbolicState &s, std::size_t target, bool back_edge) {
  const auto &fn = ctx.program().functions[static_cast<std::size_t>(s.function)];
  if (fn.loop_heads.count(target)) {
    const LoopKey key{s.function, target, s.frame()};
    if (back_edge) {
      const auto n = ++s.loop_counters[key];
      if (ctx.unwind_limit() && n > *ctx.unwind_limit()) s.truncated = true;
    } else {
      s.loop_counters.erase(key);
    }
  }
  s.pc = target;
}

void define(SsaContext &ctx, SymbolicState &s, VarId var, std::uint32_t frame, Type type,
            SymExprPtr value) {
  const auto key = std::make_pair(var, frame);
  auto it = s.versions.find(key);
  const std::uint32_t version = it == s.versions.end() ? 1 : it->second.name.version + 1;
  Def d;
  d.name = {var, frame, version};
  d.id = ctx.next_def_id();
  d.type = type;
  d.value = std::move(value);
  if (!d.value) d.nondet_ordinal = static_cast<int>(s.nondet_inputs.size());
  const SsaRef ref{d.name, d.id};
  s.versions[key] = ref;
  if (!d.value) s.nondet_inputs.push_back(ref);
  s.defs.push_back(std::move(d));
}

bool same_expr(const SymExprPtr &a, const SymExprPtr &b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->type != b->type) return false;
  switch (a->kind) {
  case SymExpr::Kind::Const: return a->value == b->value;
  case SymExpr::Kind::Var: return a->leaf == b->leaf;
  case SymExpr::Kind::Unary: return a->unary_op == b->unary_op && same_expr(a->lhs, b->lhs);
  case SymExpr::Kind::Binary:
    return a->binary_op == b->binary_op && same_expr(a->lhs, b->lhs) &&
           same_expr(a->rhs, b->rhs);
  }
  return false;
}

} // namespace

SymbolicState initial_state(const ir::GotoProgram &p) {
  SymbolicState s;
  s.function = p.main_function;
  s.pc = 0;
  s.frames.push_back({p.main_function, 0, std::nullopt, 0});
  return s;
}

SsaRef current(const SsaContext &ctx, const SymbolicState &s, VarId var) {
  const auto frame = frame_of(ctx.program(), s, var);
  auto it = s.versions.find({var, frame});
  if (it == s.versions.end()) return {{var, frame, 0}, 0};
  return it->second;
}

SymExprPtr rewrite(const SsaContext &ctx, const SymbolicState &s, const ir::ExprPtr &e) {
  return map_leaves<SsaRef, VarId>(e, [&](VarId v, Type t) {
    return SymExpr::variable(t, current(ctx, s, v));
  });
}

void assign(SsaContext &ctx, SymbolicState &s, VarId var, const ir::ExprPtr &value) {
  auto rhs = rewrite(ctx, s, value);
  define(ctx, s, var, frame_of(ctx.program(), s, var), ctx.program().vars[var].type,
         std::move(rhs));
}

void assign_nondet(SsaContext &ctx, SymbolicState &s, VarId var, Type kind) {
  define(ctx, s, var, frame_of(ctx.program(), s, var), kind, nullptr);
  PathEvent ev;
  ev.kind = PathEvent::Kind::Nondet;
  ev.at = s.location();
  ev.detail = ctx.program().vars[var].display;
  s.trace.push_back(std::move(ev));
}

void jump(const SsaContext &ctx, SymbolicState &s, std::size_t target) {
  arrive(ctx, s, target, target <= s.pc);
}

void take_branch(const SsaContext &ctx, SymbolicState &s, const SymExprPtr &cond,
                 bool direction) {
  const auto &ins = ctx.program().functions[static_cast<std::size_t>(s.function)].body[s.pc];
  const auto &br = ins.as<ir::Branch>();
  PathEvent ev;
  ev.kind = PathEvent::Kind::Branch;
  ev.at = s.location();
  ev.direction = direction;
  ev.cond = cond;
  s.trace.push_back(std::move(ev));
  jump(ctx, s, direction ? br.if_true : br.if_false);
}

std::pair<SymbolicState, SymbolicState> fork(const SsaContext &ctx, const SymbolicState &s,
                                             const SymExprPtr &cond) {
  std::pair<SymbolicState, SymbolicState> out{s, s};
  take_branch(ctx, out.first, cond, true);
  take_branch(ctx, out.second, cond, false);
  return out;
}

void commit_condition(const SsaContext &ctx, SymbolicState &s, PathEvent::Kind kind,
                      const SymExprPtr &cond) {
  PathEvent ev;
  ev.kind = kind;
  ev.at = s.location();
  ev.cond = cond;
  s.trace.push_back(std::move(ev));
  jump(ctx, s, s.pc + 1);
}

void enter_call(SsaContext &ctx, SymbolicState &s, const ir::Call &call) {
  if (s.frames.size() >= ctx.max_call_depth()) throw CallDepthExceeded(ctx.max_call_depth());
  const auto &p = ctx.program();
  const auto &callee = p.functions[static_cast<std::size_t>(call.callee)];
  std::vector<SymExprPtr> args;
  args.reserve(call.args.size());
  for (const auto &a : call.args) args.push_back(rewrite(ctx, s, a));

  PathEvent ev;
  ev.kind = PathEvent::Kind::Call;
  ev.at = s.location();
  ev.detail = callee.name;
  s.trace.push_back(std::move(ev));

  s.frames.push_back({call.callee, s.pc + 1, call.dest, s.next_frame++});
  s.function = call.callee;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const VarId param = callee.params[i];
    define(ctx, s, param, s.frame(), p.vars[param].type, std::move(args[i]));
  }
  arrive(ctx, s, 0, false);
}

void exit_call(SsaContext &ctx, SymbolicState &s, const ir::Return &ret) {
  const auto &p = ctx.program();
  if (s.frames.size() == 1) {
    s.finished = true;
    return;
  }
  SymExprPtr value = ret.value ? rewrite(ctx, s, ret.value) : nullptr;
  const Frame done = s.frames.back();

  PathEvent ev;
  ev.kind = PathEvent::Kind::Return;
  ev.at = s.location();
  ev.detail = p.functions[static_cast<std::size_t>(done.function)].name;
  s.trace.push_back(std::move(ev));

  s.frames.pop_back();
  s.function = s.frames.back().function;
  if (done.dest) {
    const Type t = p.vars[*done.dest].type;
    if (!value) value = t == Type::Bool ? SymExpr::boolean(false) : SymExpr::integer(0);
    define(ctx, s, *done.dest, frame_of(p, s, *done.dest), t, std::move(value));
  }
  arrive(ctx, s, done.return_pc, false);
}

Stop advance(SsaContext &ctx, SymbolicState &s) {
  const auto &p = ctx.program();
  for (;;) {
    if (s.finished) return Stop::Finished;
    if (s.truncated) return Stop::Truncated;
    const auto &fn = p.functions[static_cast<std::size_t>(s.function)];
    const auto &ins = fn.body[s.pc];
    if (ins.is<ir::Branch>() || ins.is<ir::Assert>() || ins.is<ir::Assume>())
      return Stop::QueryPoint;
    if (ins.is<ir::Assign>()) {
      const auto &a = ins.as<ir::Assign>();
      assign(ctx, s, a.var, a.value);
      jump(ctx, s, s.pc + 1);
    } else if (ins.is<ir::Goto>()) {
      jump(ctx, s, ins.as<ir::Goto>().target);
    } else if (ins.is<ir::Nondet>()) {
      const auto &n = ins.as<ir::Nondet>();
      assign_nondet(ctx, s, n.var, n.kind);
      jump(ctx, s, s.pc + 1);
    } else if (ins.is<ir::Call>()) {
      enter_call(ctx, s, ins.as<ir::Call>());
    } else if (ins.is<ir::Return>()) {
      exit_call(ctx, s, ins.as<ir::Return>());
    } else if (ins.is<ir::Halt>()) {
      s.finished = true;
    }
  }
}

SymbolicState replay(SsaContext &ctx, const std::vector<const PathEvent *> &trace) {
  SymbolicState s = initial_state(ctx.program());
  const auto &p = ctx.program();
  for (const PathEvent *ev : trace) {
    if (ev->kind != PathEvent::Kind::Branch && ev->kind != PathEvent::Kind::Assume &&
        ev->kind != PathEvent::Kind::Assert)
      continue;
    if (advance(ctx, s) != Stop::QueryPoint)
      throw std::logic_error("replay: trace continues past the end of the path");
    const auto &ins = p.functions[static_cast<std::size_t>(s.function)].body[s.pc];
    if (ev->kind == PathEvent::Kind::Branch) {
      take_branch(ctx, s, rewrite(ctx, s, ins.as<ir::Branch>().cond), ev->direction);
    } else if (ev->kind == PathEvent::Kind::Assume) {
      commit_condition(ctx, s, ev->kind, rewrite(ctx, s, ins.as<ir::Assume>().cond));
    } else {
      commit_condition(ctx, s, ev->kind, rewrite(ctx, s, ins.as<ir::Assert>().cond));
    }
  }
  advance(ctx, s);
  return s;
}

bool equivalent(const SymbolicState &a, const SymbolicState &b) {
  if (a.function != b.function || a.pc != b.pc || a.next_frame != b.next_frame ||
      a.truncated != b.truncated || a.finished != b.finished ||
      a.loop_counters != b.loop_counters || a.frames.size() != b.frames.size())
    return false;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const auto &x = a.frames[i];
    const auto &y = b.frames[i];
    if (x.function != y.function || x.return_pc != y.return_pc || x.dest != y.dest ||
        x.ordinal != y.ordinal)
      return false;
  }
  if (a.versions.size() != b.versions.size()) return false;
  for (auto i = a.versions.begin(), j = b.versions.begin(); i != a.versions.end(); ++i, ++j)
    if (i->first != j->first || !(i->second == j->second)) return false;
  if (a.nondet_inputs != b.nondet_inputs) return false;
  const auto da = a.defs.all();
  const auto db = b.defs.all();
  if (da.size() != db.size()) return false;
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (da[i]->name != db[i]->name || da[i]->type != db[i]->type ||
        da[i]->nondet_ordinal != db[i]->nondet_ordinal || !same_expr(da[i]->value, db[i]->value))
      return false;
  }
  const auto ta = a.trace.all();
  const auto tb = b.trace.all();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i]->kind != tb[i]->kind || ta[i]->at != tb[i]->at ||
        ta[i]->direction != tb[i]->direction || ta[i]->detail != tb[i]->detail ||
        !same_expr(ta[i]->cond, tb[i]->cond))
      return false;
  }
  return true;
}

std::string render(const ir::GotoProgram &p, const SsaName &n) {
  std::string out = p.vars[n.var].name;
  if (n.frame != 0) out += "@" + std::to_string(n.frame);
  return out + "#" + std::to_string(n.version);
}

std::string render(const ir::GotoProgram &p, const SymExprPtr &e) {
  return pinacolada::render(*e, [&](const SsaRef &r) { return render(p, r.name); });
}

} // namespace pinacolada::symex
