#pragma once

#include "wpcheck/branching.hpp"

namespace wpcheck {
namespace fixtures {

// Negative-control theory: the gets WP rule passes the first declared state
// atom instead of the state variable, so sufficiency must fail against a
// state-sensitive postcondition.
inline EffectTheory corrupted_gets_theory(const Domains& dom) {
  EffectTheory T = extend_with_branching(rws_theory());
  T.name = "rws+branching[corrupted gets]";
  Value pinned = Value::st(dom.st.front());
  T.commands[cmd_key("rws", "gets")].wp = [pinned](const CommandInstance& c, const SubWp&, const PostFn& P,
                                                   WpCtx ctx) {
    Value st = ctx.state;
    return P(c.fn_at(0).fn(st), pinned, empty_output(), std::move(ctx));
  };
  return T;
}

// Negative-control theory: the if WP rule swaps the true/false guards, so the
// branches' obligations are exchanged.
inline EffectTheory corrupted_branch_theory() {
  EffectTheory T = extend_with_branching(rws_theory());
  T.name = "rws+branching[swapped if guards]";
  T.commands[cmd_key("branch", "if")].wp = [](const CommandInstance& c, const SubWp& swp, const PostFn& P,
                                              WpCtx ctx) {
    const Value& scrut = c.value_at(0);
    FormulaPtr then_wp = swp(Value::boolean(true))(P, ctx);
    FormulaPtr else_wp = swp(Value::boolean(false))(P, ctx);
    return f_and({f_implies({scrut, Value::boolean(true)}, else_wp),
                  f_implies({scrut, Value::boolean(false)}, then_wp)});
  };
  return T;
}

}  // namespace fixtures
}  // namespace wpcheck
