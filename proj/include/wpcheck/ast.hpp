#pragma once

#include "wpcheck/formula.hpp"

#include <variant>

namespace wpcheck {

struct Input {
  Value env;
  Value state;
};

struct Output {
  Value result;
  Value state;
  Value out;  // List Wr
};

// Surface lambda compiled to a callable over the value universe; applying it
// to a symbolic argument yields a Neutral-bearing term.
struct PackagedFn {
  std::function<Value(const Value&)> fn;
};

using PayloadItem = std::variant<Value, PackagedFn>;

struct CommandInstance {
  std::string theory;   // theory tag ("rws", "branch")
  std::string command;  // command tag within the theory
  std::vector<PayloadItem> payload;

  const Value& value_at(std::size_t i) const {
    if (i >= payload.size() || !std::holds_alternative<Value>(payload[i]))
      throw TypeError(command + ": payload " + std::to_string(i) + " is not a value");
    return std::get<Value>(payload[i]);
  }
  const PackagedFn& fn_at(std::size_t i) const {
    if (i >= payload.size() || !std::holds_alternative<PackagedFn>(payload[i]))
      throw TypeError(command + ": payload " + std::to_string(i) + " is not a packaged function");
    return std::get<PackagedFn>(payload[i]);
  }
};

inline std::string cmd_key(const std::string& theory, const std::string& command) {
  return theory + ":" + command;
}

struct Program;
using ProgramPtr = std::shared_ptr<const Program>;
using Cont = std::function<ProgramPtr(const Value&)>;

// Deep-embedded effectful AST: Return / Bind / Op with callable continuations
// and sub-computation families.
struct Program {
  enum class Kind { Return, Bind, Op };
  Kind kind = Kind::Return;
  Value ret;
  ProgramPtr first;  // Bind: the prefix computation
  Cont cont;         // Bind: continuation, total on the result values
  CommandInstance cmd;
  Cont subs;  // Op: sub-computation family, total on the declared sub-arguments

  static ProgramPtr pure(Value v) {
    auto p = std::make_shared<Program>();
    p->kind = Kind::Return;
    p->ret = std::move(v);
    return p;
  }
  static ProgramPtr bind(ProgramPtr m, Cont k) {
    auto p = std::make_shared<Program>();
    p->kind = Kind::Bind;
    p->first = std::move(m);
    p->cont = std::move(k);
    return p;
  }
  static ProgramPtr op(CommandInstance c, Cont sub_family = {}) {
    auto p = std::make_shared<Program>();
    p->kind = Kind::Op;
    p->cmd = std::move(c);
    p->subs = std::move(sub_family);
    return p;
  }
};

// Monotone counters per name kind, rendered r, r1, r2, … and o', o'', …
// The seed offsets every counter; formulas from different seeds are
// alpha-equivalent.
struct FreshSource {
  unsigned seed = 0;
  unsigned r = 0, o = 0, j = 0, l = 0;
  explicit FreshSource(unsigned s = 0) : seed(s), r(s), o(s), j(s), l(s) {}
  std::string next_result() {
    unsigned n = r++;
    return n == 0 ? "r" : "r" + std::to_string(n);
  }
  std::string next_output() {
    unsigned n = o++;
    return "o" + std::string(n + 1, '\'');
  }
  std::string next_just() {
    unsigned n = j++;
    return n == 0 ? "j" : "j" + std::to_string(n);
  }
  std::string next_left() {
    unsigned n = l++;
    return n == 0 ? "l" : "l" + std::to_string(n);
  }
};

// Symbolic input context threaded through WP generation. Passing it by value
// scopes fresh names per root-to-leaf path, as in the displayed obligations.
struct WpCtx {
  Value env = Value::sym("e");
  Value state = Value::sym("s");
  FreshSource fresh;
  SymTypes syms;
};

inline WpCtx make_wp_ctx(const SymTypes& params = {}, unsigned seed = 0) {
  WpCtx ctx;
  ctx.fresh = FreshSource(seed);
  ctx.syms = params;
  ctx.syms["e"] = TypeDesc::ev();
  ctx.syms["s"] = TypeDesc::st();
  return ctx;
}

// A postcondition; applied to the output triple (as terms) at the leaves of
// the WP recursion, with the context at the point of application.
using PostFn = std::function<FormulaPtr(const Value& result, const Value& state, const Value& out, WpCtx at)>;
using PredTrans = std::function<FormulaPtr(const PostFn&, WpCtx)>;
using SubWp = std::function<PredTrans(const Value& sub_arg)>;
using RunSub = std::function<Output(const Value& sub_arg, const Input&)>;
using RunProg = std::function<Output(const ProgramPtr&, const Input&)>;

struct CommandRules {
  std::size_t payload_arity = 0;
  bool has_sub = false;  // Void vs Unit-or-cases sub-arg set
  std::function<Output(const CommandInstance&, const Input&, const RunSub&)> run;
  std::function<FormulaPtr(const CommandInstance&, const SubWp&, const PostFn&, WpCtx)> wp;
};

// Pluggable effect theory: command descriptors with one operational rule and
// one WP rule each, plus the theory's pure and sequencing rules.
struct EffectTheory {
  std::string name;
  std::map<std::string, CommandRules> commands;  // keyed by cmd_key(theory, command)
  std::function<Output(const Value& x, const Input&)> run_return;
  std::function<Output(const ProgramPtr& m, const Cont& k, const Input&, const RunProg&)> run_bind;
  std::function<FormulaPtr(const Value& x, const PostFn&, WpCtx)> wp_return;
  std::function<PostFn(const std::function<PredTrans(const Value&)>& cont_pt, WpCtx, const PostFn&)> wp_bind;

  const CommandRules& rules_for(const CommandInstance& c) const {
    auto it = commands.find(cmd_key(c.theory, c.command));
    if (it == commands.end()) throw TypeError("theory " + name + " has no rule for " + c.theory + ":" + c.command);
    return it->second;
  }
};

// Operational semantics: structural recursion delegating Op to the theory's
// run rule and Bind to the theory's sequencing rule.
inline Output run(const ProgramPtr& m, const EffectTheory& T, const Input& i) {
  switch (m->kind) {
    case Program::Kind::Return:
      if (!fully_concrete(m->ret)) throw EvalError("run: result depends on an unbound symbolic parameter");
      return T.run_return(m->ret, i);
    case Program::Kind::Bind:
      return T.run_bind(m->first, m->cont, i, [&T](const ProgramPtr& p, const Input& in) { return run(p, T, in); });
    case Program::Kind::Op: {
      const CommandRules& rules = T.rules_for(m->cmd);
      RunSub rs = [&](const Value& arg, const Input& in) {
        if (!m->subs) throw TypeError(m->cmd.command + ": command has no sub-computations");
        return run(m->subs(arg), T, in);
      };
      return rules.run(m->cmd, i, rs);
    }
  }
  throw Error("unreachable");
}

// Predicate transformer semantics: Return uses the theory's pure rule, Bind
// wraps the postcondition via the theory's sequencing rule applied to the
// continuation's transformer family, Op delegates to the command's WP rule.
inline FormulaPtr wp(const ProgramPtr& m, const EffectTheory& T, const PostFn& P, WpCtx ctx) {
  switch (m->kind) {
    case Program::Kind::Return: return T.wp_return(m->ret, P, std::move(ctx));
    case Program::Kind::Bind: {
      const EffectTheory* theory = &T;
      Cont k = m->cont;
      auto cont_pt = [theory, k](const Value& r) -> PredTrans {
        return [theory, k, r](const PostFn& Q, WpCtx c) { return wp(k(r), *theory, Q, std::move(c)); };
      };
      PostFn bound_post = T.wp_bind(cont_pt, ctx, P);
      return wp(m->first, T, bound_post, std::move(ctx));
    }
    case Program::Kind::Op: {
      const CommandRules& rules = T.rules_for(m->cmd);
      const EffectTheory* theory = &T;
      Cont subs = m->subs;
      SubWp swp = [theory, subs, cmd = m->cmd.command](const Value& arg) -> PredTrans {
        return [theory, subs, arg, cmd](const PostFn& Q, WpCtx c) {
          if (!subs) throw TypeError(cmd + ": command has no sub-computations");
          return wp(subs(arg), *theory, Q, std::move(c));
        };
      };
      return rules.wp(m->cmd, swp, P, std::move(ctx));
    }
  }
  throw Error("unreachable");
}

// Wraps a spec formula over the distinguished variables result / post-state /
// output into a postcondition closure; pre-env and pre-state stay free.
inline PostFn post_from_formula(FormulaPtr spec) {
  return [spec = std::move(spec)](const Value& x, const Value& st, const Value& out, WpCtx) {
    return subst_formula(spec, {{"result", x}, {"post-state", st}, {"output", out}});
  };
}

// Evaluates a spec formula against a concrete run output.
inline bool holds_of_output(const FormulaPtr& spec, const Output& o, const Binding& base, const Domains& dom,
                            const Bounds& bounds) {
  Binding b = base;
  b["result"] = o.result;
  b["post-state"] = o.state;
  b["output"] = o.out;
  return eval_formula(spec, b, dom, bounds);
}

// True iff no branching command is encountered while executing the program on
// any of the probe inputs.
inline bool is_branch_free(const ProgramPtr& m, const EffectTheory& T, const std::vector<Input>& probes) {
  auto hit = std::make_shared<bool>(false);
  EffectTheory probe_theory = T;
  for (auto& [key, rules] : probe_theory.commands) {
    if (key.rfind("branch:", 0) == 0) {
      auto orig = rules.run;
      rules.run = [hit, orig](const CommandInstance& c, const Input& i, const RunSub& rs) {
        *hit = true;
        return orig(c, i, rs);
      };
    }
  }
  for (const auto& i : probes) {
    run(m, probe_theory, i);
    if (*hit) return false;
  }
  return true;
}

}  // namespace wpcheck
