#pragma once

#include "wpcheck/ast.hpp"

namespace wpcheck {

inline Value empty_output() { return Value::list({}, TypeDesc::wr()); }

inline void require_concrete(const Value& v, const char* what) {
  if (!fully_concrete(v)) throw EvalError(std::string("run: symbolic ") + what);
}

// RWSbindPost: the postcondition holds of the continuation's output appended
// to the messages already emitted.
inline PostFn rws_bind_post(const Value& outs, const PostFn& P) {
  return [outs, P](const Value& x, const Value& st, const Value& out, WpCtx at) {
    return P(x, st, mk_append(outs, out), std::move(at));
  };
}

// RWSpassPost: guard a fresh output alias by the transformed sub-output and
// project the result to the pair's first component.
inline PostFn rws_pass_post(const PostFn& P) {
  return [P](const Value& res, const Value& st, const Value& out, WpCtx at) {
    std::string alias = at.fresh.next_output();
    TypeDesc list_wr = TypeDesc::list(TypeDesc::wr());
    at.syms[alias] = list_wr;
    Value transformed = mk_apply(mk_snd(res), out);
    FormulaPtr body = P(mk_fst(res), st, Value::sym(alias), at);
    return f_forall_guarded(alias, list_wr, {Value::sym(alias), transformed}, body);
  };
}

inline EffectTheory rws_theory() {
  EffectTheory T;
  T.name = "rws";

  T.run_return = [](const Value& x, const Input& i) { return Output{x, i.state, empty_output()}; };

  T.run_bind = [](const ProgramPtr& m, const Cont& k, const Input& i, const RunProg& runp) {
    Output first = runp(m, i);
    require_concrete(first.result, "intermediate result");
    Output second = runp(k(first.result), Input{i.env, first.state});
    return Output{second.result, second.state, mk_append(first.out, second.out)};
  };

  T.wp_return = [](const Value& x, const PostFn& P, WpCtx ctx) {
    Value st = ctx.state;
    return P(x, st, empty_output(), std::move(ctx));
  };

  // bindPT: alias the intermediate result with a fresh symbol and enter the
  // continuation at the intermediate state.
  T.wp_bind = [](const std::function<PredTrans(const Value&)>& cont_pt, WpCtx ctx, const PostFn& P) -> PostFn {
    Value outer_env = ctx.env;
    return [cont_pt, outer_env, P](const Value& x, const Value& st, const Value& out, WpCtx at) {
      std::string alias = at.fresh.next_result();
      TypeDesc ty = type_of_term(x, at.syms);
      at.syms[alias] = ty;
      WpCtx inner = at;
      inner.env = outer_env;
      inner.state = st;
      FormulaPtr body = cont_pt(Value::sym(alias))(rws_bind_post(out, P), inner);
      return f_forall_guarded(alias, ty, {Value::sym(alias), x}, body);
    };
  };

  auto& cmds = T.commands;

  cmds[cmd_key("rws", "gets")] = CommandRules{
      1, false,
      [](const CommandInstance& c, const Input& i, const RunSub&) {
        Value r = c.fn_at(0).fn(i.state);
        require_concrete(r, "gets result");
        return Output{r, i.state, empty_output()};
      },
      [](const CommandInstance& c, const SubWp&, const PostFn& P, WpCtx ctx) {
        Value st = ctx.state;
        return P(c.fn_at(0).fn(st), st, empty_output(), std::move(ctx));
      }};

  cmds[cmd_key("rws", "puts")] = CommandRules{
      1, false,
      [](const CommandInstance& c, const Input& i, const RunSub&) {
        Value st = c.fn_at(0).fn(i.state);
        require_concrete(st, "puts state");
        if (!st.is(Value::Tag::Atom) || st.atom_carrier() != Carrier::St)
          throw TypeError("puts: payload did not produce a state");
        return Output{Value::unit(), st, empty_output()};
      },
      [](const CommandInstance& c, const SubWp&, const PostFn& P, WpCtx ctx) {
        Value st = ctx.state;
        return P(Value::unit(), c.fn_at(0).fn(st), empty_output(), std::move(ctx));
      }};

  cmds[cmd_key("rws", "tell")] = CommandRules{
      1, false,
      [](const CommandInstance& c, const Input& i, const RunSub&) {
        Value ws = c.value_at(0);
        require_concrete(ws, "tell payload");
        if (!ws.is(Value::Tag::List)) throw TypeError("tell: payload is not a list");
        for (const auto& w : ws.items())
          if (!w.is(Value::Tag::Atom) || w.atom_carrier() != Carrier::Wr)
            throw TypeError("tell: payload contains a non-message value");
        return Output{Value::unit(), i.state, ws};
      },
      [](const CommandInstance& c, const SubWp&, const PostFn& P, WpCtx ctx) {
        Value st = ctx.state;
        return P(Value::unit(), st, c.value_at(0), std::move(ctx));
      }};

  cmds[cmd_key("rws", "ask")] = CommandRules{
      0, false,
      [](const CommandInstance&, const Input& i, const RunSub&) {
        return Output{i.env, i.state, empty_output()};
      },
      [](const CommandInstance&, const SubWp&, const PostFn& P, WpCtx ctx) {
        Value e = ctx.env;
        Value st = ctx.state;
        return P(e, st, empty_output(), std::move(ctx));
      }};

  cmds[cmd_key("rws", "local")] = CommandRules{
      1, true,
      [](const CommandInstance& c, const Input& i, const RunSub& rs) {
        Value e = c.fn_at(0).fn(i.env);
        require_concrete(e, "local environment");
        if (!e.is(Value::Tag::Atom) || e.atom_carrier() != Carrier::Ev)
          throw TypeError("local: payload did not produce an environment");
        return rs(Value::unit(), Input{e, i.state});
      },
      [](const CommandInstance& c, const SubWp& swp, const PostFn& P, WpCtx ctx) {
        ctx.env = c.fn_at(0).fn(ctx.env);
        return swp(Value::unit())(P, std::move(ctx));
      }};

  cmds[cmd_key("rws", "pass")] = CommandRules{
      0, true,
      [](const CommandInstance&, const Input& i, const RunSub& rs) {
        Output sub = rs(Value::unit(), i);
        if (!sub.result.is(Value::Tag::Pair) || !sub.result.items()[1].is(Value::Tag::WriterFn))
          throw TypeError("pass: sub-result is not a pair with a writer transformer");
        Value transformed = mk_apply(sub.result.items()[1], sub.out);
        return Output{sub.result.items()[0], sub.state, transformed};
      },
      [](const CommandInstance&, const SubWp& swp, const PostFn& P, WpCtx ctx) {
        return swp(Value::unit())(rws_pass_post(P), std::move(ctx));
      }};

  return T;
}

// The built-in paper-intro example: pass around (gets g ≫= maybe-branch),
// where the just-branch tells the produced message and then erases it, and
// the nothing-branch self-appends.
inline ProgramPtr build_paper_intro_prog(const Value& g) {
  PackagedFn gets_payload{[g](const Value& s) { return mk_apply(g, s); }};
  ProgramPtr gets_node = Program::op({"rws", "gets", {gets_payload}});

  Cont scrutinize = [](const Value& m) -> ProgramPtr {
    Cont branches = [](const Value& arg) -> ProgramPtr {
      if (arg.is(Value::Tag::Just)) {
        Value w = arg.items()[0];
        ProgramPtr tell_node = Program::op({"rws", "tell", {Value::list({w}, TypeDesc::wr())}});
        return Program::bind(tell_node, [](const Value&) {
          return Program::pure(Value::pair(Value::unit(), Value::writer_fn(wf_const({}))));
        });
      }
      return Program::pure(Value::pair(Value::unit(), Value::writer_fn(wf_self_append())));
    };
    return Program::op({"branch", "maybe", {m}}, branches);
  };

  ProgramPtr inner = Program::bind(gets_node, scrutinize);
  return Program::op({"rws", "pass", {}}, [inner](const Value&) { return inner; });
}

}  // namespace wpcheck
