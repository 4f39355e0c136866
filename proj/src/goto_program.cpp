#include "pinacolada/goto_program.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace pinacolada::ir {

int GotoProgram::find_function(const std::string &name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

using frontend::Ast;
using AstExpr = frontend::Expr;
using AstStmt = frontend::Stmt;

bool has_effects(const AstExpr &e) {
  if (e.kind == AstExpr::Kind::Call || e.kind == AstExpr::Kind::NondetInt ||
      e.kind == AstExpr::Kind::NondetBool)
    return true;
  for (const auto &a : e.args)
    if (has_effects(*a)) return true;
  return false;
}

bool has_logical(const AstExpr &e) {
  if (e.kind == AstExpr::Kind::Binary && is_logical(e.binary_op)) return true;
  for (const auto &a : e.args)
    if (has_logical(*a)) return true;
  return false;
}

class Lowerer {
public:
  explicit Lowerer(const Ast &ast) : ast_(ast) {}

  GotoProgram run() {
    // AST variables keep their ids; temporaries are appended.
    std::unordered_map<std::string, int> used;
    std::set<std::string> global_names;
    for (const auto &v : ast_.vars)
      if (v.global) global_names.insert(v.name);
    for (const auto &v : ast_.vars) {
      Variable out;
      out.display = v.name;
      out.type = v.type;
      out.global = v.global;
      out.function = v.global ? -1 : ast_.find_function(v.function);
      const std::string scope = v.global ? std::string("") : v.function;
      // Locals that shadow a global get a suffix too, so names stay unique
      // across a function and the globals it sees.
      const int n = used[scope + "::" + v.name]++ + (!v.global && global_names.count(v.name) ? 1 : 0);
      out.name = n == 0 ? v.name : v.name + "." + std::to_string(n);
      prog_.vars.push_back(std::move(out));
    }
    for (const auto &g : ast_.globals) prog_.globals.push_back(g.var);
    for (std::size_t i = 0; i < ast_.functions.size(); ++i) {
      const auto &fn = ast_.functions[i];
      GotoFunction out;
      out.name = fn.name;
      out.return_type = fn.return_type;
      for (const auto &p : fn.params) out.params.push_back(p.var);
      prog_.functions.push_back(std::move(out));
    }
    for (VarId v = 0; v < prog_.vars.size(); ++v) {
      if (!prog_.vars[v].global) {
        auto &fn = prog_.functions[static_cast<std::size_t>(prog_.vars[v].function)];
        if (std::find(fn.params.begin(), fn.params.end(), v) == fn.params.end())
          fn.locals.push_back(v);
      }
    }
    prog_.main_function = ast_.find_function("main");
    for (std::size_t i = 0; i < ast_.functions.size(); ++i) lower_function(static_cast<int>(i));
    return std::move(prog_);
  }

private:
  const Ast &ast_;
  GotoProgram prog_;
  int fn_index_ = -1;
  std::vector<Instruction> *body_ = nullptr;
  int line_ = 0;
  int temp_counter_ = 0;

  // Forward-reference labels: instruction slots awaiting a target index.
  struct Label {
    std::optional<std::size_t> index;
    std::vector<std::pair<std::size_t, int>> fixups; // (instr, which target)
  };

  std::size_t here() const { return body_->size(); }

  std::size_t emit(Op op, bool implicit = false) {
    body_->push_back({std::move(op), line_, implicit});
    return body_->size() - 1;
  }

  void place(Label &l) {
    l.index = here();
    for (auto [instr, which] : l.fixups) patch(instr, which, *l.index);
    l.fixups.clear();
  }

  void patch(std::size_t instr, int which, std::size_t target) {
    auto &op = (*body_)[instr].op;
    if (auto *b = std::get_if<Branch>(&op)) {
      (which == 0 ? b->if_true : b->if_false) = target;
    } else if (auto *g = std::get_if<Goto>(&op)) {
      g->target = target;
    }
  }

  void refer(Label &l, std::size_t instr, int which) {
    if (l.index) {
      patch(instr, which, *l.index);
    } else {
      l.fixups.emplace_back(instr, which);
    }
  }

  void emit_goto(Label &l) {
    const auto i = emit(Goto{0}, true);
    refer(l, i, 0);
  }

  void emit_branch(ExprPtr cond, Label &t, Label &f) {
    const auto i = emit(Branch{std::move(cond), 0, 0});
    refer(t, i, 0);
    refer(f, i, 1);
  }

  VarId new_temp(Type type, const std::string &display) {
    Variable v;
    v.name = "$t" + std::to_string(temp_counter_++);
    v.display = display.empty() ? v.name : display;
    v.type = type;
    v.function = fn_index_;
    v.temporary = true;
    prog_.vars.push_back(std::move(v));
    const auto id = static_cast<VarId>(prog_.vars.size() - 1);
    prog_.functions[static_cast<std::size_t>(fn_index_)].locals.push_back(id);
    return id;
  }

  ExprPtr var_ref(VarId v) { return Expr::variable(prog_.vars[v].type, v); }

  static ExprPtr zero_of(Type t) {
    return t == Type::Bool ? Expr::boolean(false) : Expr::integer(0);
  }

  void lower_function(int index) {
    fn_index_ = index;
    temp_counter_ = 0;
    auto &fn = prog_.functions[static_cast<std::size_t>(index)];
    body_ = &fn.body;
    const auto &src = ast_.functions[static_cast<std::size_t>(index)];
    line_ = src.line;
    if (index == prog_.main_function) {
      for (const auto &g : ast_.globals) {
        line_ = g.line;
        if (g.init) {
          assign_from(g.var, *g.init);
        } else {
          emit(Assign{g.var, zero_of(g.type)}, true);
        }
      }
    }
    lower_stmts(src.body);
    line_ = src.line;
    emit(Return{nullptr}, true);
    compute_loop_heads(fn);
    body_ = nullptr;
  }

  void lower_stmts(const std::vector<frontend::StmtPtr> &stmts) {
    for (const auto &s : stmts) lower_stmt(*s);
  }

  // `var = e` with direct calls written straight into `var`.
  void assign_from(VarId var, const AstExpr &e) {
    if (e.kind == AstExpr::Kind::Call) {
      emit(Call{var, e.callee, lower_args(e)});
      return;
    }
    if (e.kind == AstExpr::Kind::NondetInt || e.kind == AstExpr::Kind::NondetBool) {
      const VarId t = new_temp(e.type, prog_.vars[var].display);
      emit(Nondet{t, e.type});
      emit(Assign{var, var_ref(t)});
      return;
    }
    emit(Assign{var, lower_value(e)});
  }

  void lower_stmt(const AstStmt &s) {
    line_ = s.line;
    switch (s.kind) {
    case AstStmt::Kind::Block: lower_stmts(s.body); return;
    case AstStmt::Kind::VarDecl:
      if (s.expr) {
        assign_from(s.var, *s.expr);
      } else {
        emit(Assign{s.var, zero_of(s.decl_type)});
      }
      return;
    case AstStmt::Kind::Assign: assign_from(s.var, *s.expr); return;
    case AstStmt::Kind::If: {
      Label t, f, join;
      lower_cond(*s.expr, t, f);
      place(t);
      lower_stmts(s.body);
      line_ = s.line;
      emit_goto(join);
      place(f);
      if (s.has_else) {
        lower_stmts(s.else_body);
        line_ = s.line;
        emit_goto(join);
      }
      place(join);
      return;
    }
    case AstStmt::Kind::While: {
      Label head, body, exit;
      place(head);
      lower_cond(*s.expr, body, exit);
      place(body);
      lower_stmts(s.body);
      line_ = s.line;
      emit_goto(head);
      place(exit);
      return;
    }
    case AstStmt::Kind::Assert: emit(Assert{lower_value(*s.expr)}); return;
    case AstStmt::Kind::Assume: emit(Assume{lower_value(*s.expr)}); return;
    case AstStmt::Kind::Call:
      emit(Call{std::nullopt, s.expr->callee, lower_args(*s.expr)});
      return;
    case AstStmt::Kind::Return:
      if (!s.expr) {
        emit(Return{nullptr});
      } else if (s.expr->kind == AstExpr::Kind::Call) {
        const VarId t = new_temp(s.expr->type, "");
        emit(Call{t, s.expr->callee, lower_args(*s.expr)});
        emit(Return{var_ref(t)});
      } else {
        emit(Return{lower_value(*s.expr)});
      }
      return;
    }
  }

  void lower_cond(const AstExpr &e, Label &t, Label &f) {
    if (e.kind == AstExpr::Kind::Binary && e.binary_op == BinaryOp::And) {
      Label mid;
      lower_cond(*e.args[0], mid, f);
      place(mid);
      lower_cond(*e.args[1], t, f);
      return;
    }
    if (e.kind == AstExpr::Kind::Binary && e.binary_op == BinaryOp::Or) {
      Label mid;
      lower_cond(*e.args[0], t, mid);
      place(mid);
      lower_cond(*e.args[1], t, f);
      return;
    }
    if (e.kind == AstExpr::Kind::Unary && e.unary_op == UnaryOp::Not && has_logical(*e.args[0])) {
      lower_cond(*e.args[0], f, t);
      return;
    }
    emit_branch(lower_value(e), t, f);
  }

  ExprPtr materialize(ExprPtr v) {
    if (v->kind != Expr::Kind::Binary && v->kind != Expr::Kind::Unary &&
        v->kind != Expr::Kind::Var)
      return v;
    const VarId t = new_temp(v->type, "");
    emit(Assign{t, std::move(v)});
    return var_ref(t);
  }

  std::vector<ExprPtr> lower_args(const AstExpr &call) {
    std::vector<ExprPtr> out;
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      ExprPtr v = lower_value(*call.args[i]);
      bool later_effects = false;
      for (std::size_t j = i + 1; j < call.args.size(); ++j)
        later_effects = later_effects || has_effects(*call.args[j]);
      if (later_effects) v = materialize(std::move(v));
      out.push_back(std::move(v));
    }
    return out;
  }

  // Emits instructions for the effects of `e` and returns a pure expression
  // for its value. Operands evaluated before a later side effect are
  // captured in temporaries so evaluation stays left to right.
  ExprPtr lower_value(const AstExpr &e) {
    switch (e.kind) {
    case AstExpr::Kind::IntLit: return Expr::constant(Type::Int, e.value);
    case AstExpr::Kind::BoolLit: return Expr::boolean(e.value != 0);
    case AstExpr::Kind::Var: return var_ref(e.var);
    case AstExpr::Kind::Unary: return Expr::unary(e.unary_op, lower_value(*e.args[0]));
    case AstExpr::Kind::Binary: {
      if (is_logical(e.binary_op)) {
        const VarId t = new_temp(Type::Bool, "");
        Label yes, no, join;
        lower_cond(e, yes, no);
        place(yes);
        emit(Assign{t, Expr::boolean(true)}, true);
        emit_goto(join);
        place(no);
        emit(Assign{t, Expr::boolean(false)}, true);
        place(join);
        return var_ref(t);
      }
      ExprPtr l = lower_value(*e.args[0]);
      if (has_effects(*e.args[1])) l = materialize(std::move(l));
      ExprPtr r = lower_value(*e.args[1]);
      return Expr::binary(e.binary_op, std::move(l), std::move(r));
    }
    case AstExpr::Kind::Call: {
      const VarId t = new_temp(e.type, "");
      emit(Call{t, e.callee, lower_args(e)});
      return var_ref(t);
    }
    case AstExpr::Kind::NondetInt:
    case AstExpr::Kind::NondetBool: {
      const VarId t = new_temp(e.type, "");
      emit(Nondet{t, e.type});
      return var_ref(t);
    }
    }
    return nullptr;
  }
};

} // namespace

void compute_loop_heads(GotoFunction &fn) {
  fn.loop_heads.clear();
  for (std::size_t i = 0; i < fn.body.size(); ++i) {
    for (auto s : successors(fn, i)) {
      const auto &op = fn.body[i].op;
      const bool jump = std::holds_alternative<Branch>(op) || std::holds_alternative<Goto>(op);
      if (jump && s <= i) fn.loop_heads.insert(s);
    }
  }
}

GotoProgram lower(const frontend::Ast &ast) { return Lowerer(ast).run(); }

std::vector<std::size_t> successors(const GotoFunction &fn, std::size_t i) {
  const auto &ins = fn.body[i];
  if (ins.is<Branch>()) {
    const auto &b = ins.as<Branch>();
    return {b.if_true, b.if_false};
  }
  if (ins.is<Goto>()) return {ins.as<Goto>().target};
  if (ins.is<Return>() || ins.is<Halt>()) return {};
  if (i + 1 < fn.body.size()) return {i + 1};
  return {};
}

std::vector<Warning> reachable_check(const GotoProgram &p) {
  std::vector<Warning> out;
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    const auto &fn = p.functions[f];
    std::vector<bool> seen(fn.body.size(), false);
    std::deque<std::size_t> work;
    if (!fn.body.empty()) {
      seen[0] = true;
      work.push_back(0);
    }
    while (!work.empty()) {
      const auto i = work.front();
      work.pop_front();
      std::vector<std::size_t> next = successors(fn, i);
      const auto &ins = fn.body[i];
      if (ins.is<Branch>() && ins.as<Branch>().cond->is_const()) {
        const auto &b = ins.as<Branch>();
        next = {b.cond->value ? b.if_true : b.if_false};
      }
      if (ins.is<Assume>() && ins.as<Assume>().cond->is_const() &&
          ins.as<Assume>().cond->value == 0)
        next.clear();
      for (auto s : next) {
        if (s < seen.size() && !seen[s]) {
          seen[s] = true;
          work.push_back(s);
        }
      }
    }
    for (std::size_t i = 0; i < fn.body.size(); ++i) {
      if (!seen[i] && !fn.body[i].implicit) {
        out.push_back({static_cast<int>(f), i, fn.body[i].line,
                       "unreachable instruction in '" + fn.name + "'"});
      }
    }
  }
  return out;
}

std::string render(const GotoProgram &p, const ExprPtr &e) {
  return pinacolada::render(*e, [&](VarId v) { return p.vars[v].name; });
}

std::string render_instruction(const GotoProgram &p, const Instruction &ins) {
  std::ostringstream os;
  std::visit(
      [&](const auto &op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Assign>) {
          os << "ASSIGN " << p.vars[op.var].name << " := " << render(p, op.value);
        } else if constexpr (std::is_same_v<T, Branch>) {
          os << "BRANCH " << render(p, op.cond) << " ? " << op.if_true << " : " << op.if_false;
        } else if constexpr (std::is_same_v<T, Goto>) {
          os << "GOTO " << op.target;
        } else if constexpr (std::is_same_v<T, Assert>) {
          os << "ASSERT " << render(p, op.cond) << " @line " << ins.line;
        } else if constexpr (std::is_same_v<T, Assume>) {
          os << "ASSUME " << render(p, op.cond);
        } else if constexpr (std::is_same_v<T, Call>) {
          os << "CALL ";
          if (op.dest) os << p.vars[*op.dest].name << " := ";
          os << p.functions[static_cast<std::size_t>(op.callee)].name << "(";
          for (std::size_t i = 0; i < op.args.size(); ++i) {
            if (i) os << ", ";
            os << render(p, op.args[i]);
          }
          os << ")";
        } else if constexpr (std::is_same_v<T, Return>) {
          os << "RETURN";
          if (op.value) os << " " << render(p, op.value);
        } else if constexpr (std::is_same_v<T, Halt>) {
          os << "HALT";
        } else if constexpr (std::is_same_v<T, Nondet>) {
          os << "NONDET " << p.vars[op.var].name << " : "
             << (op.kind == Type::Bool ? "bool" : "int");
        }
      },
      ins.op);
  return os.str();
}

std::string dump(const GotoProgram &p) {
  std::ostringstream os;
  for (const auto &fn : p.functions) {
    os << "function " << fn.name;
    if (!fn.loop_heads.empty()) {
      os << " (loop heads:";
      for (auto h : fn.loop_heads) os << " " << h;
      os << ")";
    }
    os << "\n";
    for (std::size_t i = 0; i < fn.body.size(); ++i)
      os << i << ": " << render_instruction(p, fn.body[i]) << "\n";
  }
  return os.str();
}

} // namespace pinacolada::ir
