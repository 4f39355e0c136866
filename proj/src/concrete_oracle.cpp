#include "pinacolada/concrete_oracle.hpp"

#include <json.hpp>
#include <unordered_map>

#include "pinacolada/semantics.hpp"

namespace pinacolada::oracle {

namespace {

using ir::VarId;

struct ConcreteFrame {
  int function = 0;
  std::size_t pc = 0;
  std::size_t return_pc = 0;
  std::optional<VarId> dest;
  std::unordered_map<VarId, std::int64_t> locals;
};

class Interpreter {
public:
  Interpreter(const ir::GotoProgram &p, std::span<const std::int64_t> inputs,
              const RunOptions &opts)
      : p_(p), inputs_(inputs), opts_(opts) {}

  RunResult run();

private:
  std::int64_t read(VarId v) const {
    const auto &map = p_.vars[v].global ? globals_ : frames_.back().locals;
    auto it = map.find(v);
    return it == map.end() ? 0 : it->second;
  }
  void write(VarId v, std::int64_t value) {
    auto &map = p_.vars[v].global ? globals_ : frames_.back().locals;
    map[v] = normalise(p_.vars[v].type, value);
  }
  std::int64_t normalise(Type t, std::int64_t value) const {
    return t == Type::Bool ? (value != 0) : wrap(static_cast<std::uint64_t>(value), opts_.width);
  }
  std::int64_t eval(const ir::ExprPtr &e) const {
    return evaluate(*e, opts_.width, [&](VarId v) { return read(v); });
  }

  const ir::GotoProgram &p_;
  std::span<const std::int64_t> inputs_;
  RunOptions opts_;
  std::unordered_map<VarId, std::int64_t> globals_;
  std::vector<ConcreteFrame> frames_;
  std::size_t next_input_ = 0;
};

RunResult Interpreter::run() {
  RunResult r;
  frames_.push_back({p_.main_function, 0, 0, std::nullopt, {}});

  auto finish = [&](RunResult::Outcome outcome) {
    const auto &top = frames_.back();
    r.outcome = outcome;
    r.at = {top.function, top.pc};
    const auto &fn = p_.functions[static_cast<std::size_t>(top.function)];
    r.line = top.pc < fn.body.size() ? fn.body[top.pc].line : 0;
    r.inputs_used = next_input_;
    for (VarId g : p_.globals) r.final_env[p_.vars[g].name] = read(g);
    if (frames_.size() == 1) {
      const auto &main = p_.main();
      for (VarId v : main.locals) r.final_env[p_.vars[v].name] = frames_.front().locals[v];
    }
    return r;
  };

  for (;;) {
    ConcreteFrame &f = frames_.back();
    const auto &fn = p_.functions[static_cast<std::size_t>(f.function)];
    if (r.steps >= opts_.step_limit) return finish(RunResult::Outcome::StepLimit);
    ++r.steps;
    const auto &ins = fn.body[f.pc];

    if (ins.is<ir::Assign>()) {
      const auto &a = ins.as<ir::Assign>();
      write(a.var, eval(a.value));
      ++f.pc;
    } else if (ins.is<ir::Branch>()) {
      const auto &b = ins.as<ir::Branch>();
      f.pc = eval(b.cond) != 0 ? b.if_true : b.if_false;
    } else if (ins.is<ir::Goto>()) {
      f.pc = ins.as<ir::Goto>().target;
    } else if (ins.is<ir::Assert>()) {
      if (eval(ins.as<ir::Assert>().cond) == 0) return finish(RunResult::Outcome::Violation);
      ++f.pc;
    } else if (ins.is<ir::Assume>()) {
      // A failed assumption blocks the run; it is not an error.
      if (eval(ins.as<ir::Assume>().cond) == 0) return finish(RunResult::Outcome::Exit);
      ++f.pc;
    } else if (ins.is<ir::Nondet>()) {
      const auto &n = ins.as<ir::Nondet>();
      if (next_input_ >= inputs_.size()) throw InputExhausted(next_input_ + 1);
      write(n.var, inputs_[next_input_++]);
      ++f.pc;
    } else if (ins.is<ir::Call>()) {
      const auto &c = ins.as<ir::Call>();
      if (frames_.size() >= opts_.max_call_depth) return finish(RunResult::Outcome::StepLimit);
      const auto &callee = p_.functions[static_cast<std::size_t>(c.callee)];
      ConcreteFrame next{c.callee, 0, f.pc + 1, c.dest, {}};
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        const VarId param = callee.params[i];
        next.locals[param] = normalise(p_.vars[param].type, eval(c.args[i]));
      }
      frames_.push_back(std::move(next));
    } else if (ins.is<ir::Return>()) {
      const auto &ret = ins.as<ir::Return>();
      const std::int64_t value = ret.value ? eval(ret.value) : 0;
      if (frames_.size() == 1) {
        if (ret.value) r.return_value = value;
        return finish(RunResult::Outcome::Exit);
      }
      const ConcreteFrame done = std::move(frames_.back());
      frames_.pop_back();
      if (done.dest) write(*done.dest, value);
      frames_.back().pc = done.return_pc;
    } else if (ins.is<ir::Halt>()) {
      return finish(RunResult::Outcome::Exit);
    }
  }
}

} // namespace

RunResult run_concrete(const ir::GotoProgram &p, std::span<const std::int64_t> inputs,
                       const RunOptions &opts) {
  return Interpreter(p, inputs, opts).run();
}

std::string to_string(OracleVerdict::Outcome o) {
  switch (o) {
  case OracleVerdict::Outcome::Safe: return "SAFE";
  case OracleVerdict::Outcome::Unsafe: return "UNSAFE";
  case OracleVerdict::Outcome::StepLimit: return "STEP_LIMIT";
  }
  return "?";
}

OracleVerdict enumerate_verdict(const ir::GotoProgram &p, unsigned width, std::size_t max_inputs,
                                std::uint64_t step_limit) {
  const std::int64_t lo = min_value(width);
  const std::int64_t hi = max_value(width);
  RunOptions opts;
  opts.width = width;
  opts.step_limit = step_limit;

  OracleVerdict v;
  bool hit_limit = false;
  std::vector<std::int64_t> tuple(max_inputs, lo);
  for (;;) {
    RunResult r;
    try {
      r = run_concrete(p, tuple, opts);
    } catch (const InputExhausted &) {
      throw EnumerationError("a run reads more than " + std::to_string(max_inputs) +
                             " nondet inputs; raise --max-inputs");
    }
    ++v.runs;
    if (r.outcome == RunResult::Outcome::Violation) {
      v.outcome = OracleVerdict::Outcome::Unsafe;
      v.inputs.assign(tuple.begin(), tuple.begin() + static_cast<std::ptrdiff_t>(r.inputs_used));
      v.at = r.at;
      v.line = r.line;
      return v;
    }
    if (r.outcome == RunResult::Outcome::StepLimit) hit_limit = true;

    // Slots at and beyond inputs_used were never read, so every tuple that
    // shares the used prefix behaves identically.
    std::size_t k = r.inputs_used;
    for (std::size_t i = k; i < tuple.size(); ++i) tuple[i] = lo;
    bool advanced = false;
    while (k > 0) {
      --k;
      if (tuple[k] < hi) {
        ++tuple[k];
        advanced = true;
        break;
      }
      tuple[k] = lo;
    }
    if (!advanced) break;
  }
  v.outcome = hit_limit ? OracleVerdict::Outcome::StepLimit : OracleVerdict::Outcome::Safe;
  return v;
}

bool replay_witness(const ir::GotoProgram &p, const Witness &w, unsigned width,
                    std::uint64_t step_limit) {
  std::vector<std::int64_t> inputs;
  for (const auto &in : w.nondet_inputs) inputs.push_back(std::stoll(in.value));
  RunOptions opts;
  opts.width = width;
  opts.step_limit = step_limit;
  const RunResult r = run_concrete(p, inputs, opts);
  if (r.outcome != RunResult::Outcome::Violation) return false;
  return p.functions[static_cast<std::size_t>(r.at.function)].name == w.function &&
         r.at.index == w.index;
}

std::string to_json(const ir::GotoProgram &p, const OracleVerdict &v) {
  nlohmann::ordered_json j;
  j["outcome"] = to_string(v.outcome);
  j["runs"] = v.runs;
  if (v.outcome == OracleVerdict::Outcome::Unsafe) {
    j["inputs"] = v.inputs;
    j["location"] = {{"function", p.functions[static_cast<std::size_t>(v.at.function)].name},
                     {"index", v.at.index},
                     {"line", v.line}};
  }
  return j.dump(2);
}

} // namespace pinacolada::oracle
