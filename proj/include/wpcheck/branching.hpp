#pragma once

#include "wpcheck/rws.hpp"

namespace wpcheck {

inline bool is_branch_command(const CommandInstance& c) { return c.theory == "branch"; }

// Selects the sub-program matched by a concrete scrutinee.
inline Value branch_case_of(const CommandInstance& c) {
  const Value& scrut = c.value_at(0);
  if (scrut.is_symbolic_node()) throw EvalError(c.command + ": symbolic scrutinee");
  if (c.command == "if") {
    if (!scrut.is(Value::Tag::Bool)) throw TypeError("if: scrutinee is not Bool");
    return scrut;
  }
  if (c.command == "maybe") {
    if (!scrut.is(Value::Tag::Just) && !scrut.is(Value::Tag::Nothing))
      throw TypeError("maybe: scrutinee is not a Maybe value");
    return scrut;
  }
  if (c.command == "either") {
    if (!scrut.is(Value::Tag::Left) && !scrut.is(Value::Tag::Right))
      throw TypeError("either: scrutinee is not an Either value");
    return scrut;
  }
  throw TypeError("unknown branching command " + c.command);
}

// Structural map removing branch nodes by selecting the sub-program for each
// (concrete) scrutinee; continuations keep the traversal lazy.
inline ProgramPtr unextend(const ProgramPtr& m) {
  switch (m->kind) {
    case Program::Kind::Return: return m;
    case Program::Kind::Bind: {
      Cont k = m->cont;
      return Program::bind(unextend(m->first), [k](const Value& v) { return unextend(k(v)); });
    }
    case Program::Kind::Op: {
      if (is_branch_command(m->cmd)) return unextend(m->subs(branch_case_of(m->cmd)));
      Cont subs = m->subs;
      Cont wrapped = subs ? Cont([subs](const Value& v) { return unextend(subs(v)); }) : Cont{};
      return Program::op(m->cmd, wrapped);
    }
  }
  throw Error("unreachable");
}

inline TypeDesc scrutinee_type(const CommandInstance& c, const WpCtx& ctx, TypeDesc::Tag expected) {
  TypeDesc t = type_of_term(c.value_at(0), ctx.syms);
  if (t.tag != expected) throw TypeError(c.command + ": scrutinee has type " + to_string(t));
  return t;
}

// À-la-carte extension: base-tagged commands keep the base rules; branch
// commands run by selection and contribute the case-split WP rules.
inline EffectTheory extend_with_branching(const EffectTheory& base) {
  EffectTheory T = base;
  T.name = base.name + "+branching";
  auto& cmds = T.commands;

  cmds[cmd_key("branch", "if")] = CommandRules{
      1, true,
      [](const CommandInstance& c, const Input& i, const RunSub& rs) {
        return rs(branch_case_of(c), i);
      },
      [](const CommandInstance& c, const SubWp& swp, const PostFn& P, WpCtx ctx) {
        const Value& scrut = c.value_at(0);
        FormulaPtr then_wp = swp(Value::boolean(true))(P, ctx);
        FormulaPtr else_wp = swp(Value::boolean(false))(P, ctx);
        return f_and({f_implies({scrut, Value::boolean(true)}, then_wp),
                      f_implies({scrut, Value::boolean(false)}, else_wp)});
      }};

  cmds[cmd_key("branch", "maybe")] = CommandRules{
      1, true,
      [](const CommandInstance& c, const Input& i, const RunSub& rs) {
        return rs(branch_case_of(c), i);
      },
      [](const CommandInstance& c, const SubWp& swp, const PostFn& P, WpCtx ctx) {
        const Value& scrut = c.value_at(0);
        TypeDesc t = scrutinee_type(c, ctx, TypeDesc::Tag::Maybe);
        WpCtx just_ctx = ctx;
        std::string jv = just_ctx.fresh.next_just();
        just_ctx.syms[jv] = t.args[0];
        FormulaPtr just_wp = swp(Value::just(Value::sym(jv)))(P, just_ctx);
        FormulaPtr nothing_wp = swp(Value::nothing(t.args[0]))(P, ctx);
        return f_and({f_forall_guarded(jv, t.args[0], {scrut, Value::just(Value::sym(jv))}, just_wp),
                      f_implies({scrut, Value::nothing(t.args[0])}, nothing_wp)});
      }};

  cmds[cmd_key("branch", "either")] = CommandRules{
      1, true,
      [](const CommandInstance& c, const Input& i, const RunSub& rs) {
        return rs(branch_case_of(c), i);
      },
      [](const CommandInstance& c, const SubWp& swp, const PostFn& P, WpCtx ctx) {
        const Value& scrut = c.value_at(0);
        TypeDesc t = scrutinee_type(c, ctx, TypeDesc::Tag::Either);
        WpCtx left_ctx = ctx;
        std::string lv = left_ctx.fresh.next_left();
        left_ctx.syms[lv] = t.args[0];
        FormulaPtr left_wp = swp(Value::left(Value::sym(lv), t))(P, left_ctx);
        WpCtx right_ctx = ctx;
        std::string rv = right_ctx.fresh.next_result();
        right_ctx.syms[rv] = t.args[1];
        FormulaPtr right_wp = swp(Value::right(Value::sym(rv), t))(P, right_ctx);
        return f_and({f_forall_guarded(lv, t.args[0], {scrut, Value::left(Value::sym(lv), t)}, left_wp),
                      f_forall_guarded(rv, t.args[1], {scrut, Value::right(Value::sym(rv), t)}, right_wp)});
      }};

  return T;
}

}  // namespace wpcheck
