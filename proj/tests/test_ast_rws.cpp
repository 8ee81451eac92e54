#include "wpcheck/branching.hpp"
#include "wpcheck/enumerate.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace wpcheck;

namespace {

Domains doms() {
  Domains d;
  d.st = {"s0", "s1"};
  d.ev = {"e0"};
  d.wr = {"w0", "w1"};
  return d;
}

const Bounds kBounds;

Value table_st_to_maybe_wr(const std::vector<std::pair<std::string, Value>>& entries) {
  auto rep = std::make_shared<FnTableRep>();
  rep->dom = TypeDesc::st();
  rep->cod = TypeDesc::maybe(TypeDesc::wr());
  for (const auto& [k, v] : entries) rep->entries.emplace_back(Value::st(k), v);
  return Value::table(rep);
}

Input in(const std::string& e, const std::string& s) { return {Value::ev(e), Value::st(s)}; }

ProgramPtr tell_list(std::vector<std::string> ws) {
  ValueList items;
  for (auto& w : ws) items.push_back(Value::wr(w));
  return Program::op({"rws", "tell", {Value::list(items, TypeDesc::wr())}});
}

// ProgPost: pre-state ≡ post-state × 0 ≡ length output
FormulaPtr prog_post() {
  return f_and({f_atom(Value::sym("s"), Value::sym("post-state")),
                f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("output")}))});
}

const EffectTheory& ext() {
  static const EffectTheory T = extend_with_branching(rws_theory());
  return T;
}

SymTypes g_param_types() {
  return {{"g", TypeDesc::fn(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr()))}};
}

}  // namespace

TEST_CASE("run: return") {
  Output o = run(Program::pure(Value::unit()), rws_theory(), in("e0", "s0"));
  CHECK(o.result == Value::unit());
  CHECK(o.state == Value::st("s0"));
  CHECK(o.out == Value::list({}));
}

TEST_CASE("run: bind concatenates outputs") {
  ProgramPtr p = Program::bind(tell_list({"w0"}), [](const Value&) { return tell_list({"w0"}); });
  Output o = run(p, rws_theory(), in("e0", "s0"));
  CHECK(o.result == Value::unit());
  CHECK(o.state == Value::st("s0"));
  CHECK(o.out == Value::list({Value::wr("w0"), Value::wr("w0")}));
}

TEST_CASE("run: command rules") {
  // tell
  Output t = run(tell_list({"w0"}), rws_theory(), in("e0", "s0"));
  CHECK(t.out == Value::list({Value::wr("w0")}));
  CHECK(t.state == Value::st("s0"));

  // ask
  Output a = run(Program::op({"rws", "ask", {}}), rws_theory(), in("e0", "s1"));
  CHECK(a.result == Value::ev("e0"));
  CHECK(a.state == Value::st("s1"));

  // puts
  PackagedFn to_s1{[](const Value&) { return Value::st("s1"); }};
  Output p = run(Program::op({"rws", "puts", {to_s1}}), rws_theory(), in("e0", "s0"));
  CHECK(p.result == Value::unit());
  CHECK(p.state == Value::st("s1"));

  // gets
  PackagedFn identity{[](const Value& s) { return s; }};
  Output g = run(Program::op({"rws", "gets", {identity}}), rws_theory(), in("e0", "s1"));
  CHECK(g.result == Value::st("s1"));

  // local
  PackagedFn const_e0{[](const Value&) { return Value::ev("e0"); }};
  ProgramPtr ask_prog = Program::op({"rws", "ask", {}});
  Output l = run(Program::op({"rws", "local", {const_e0}}, [ask_prog](const Value&) { return ask_prog; }),
                 rws_theory(), in("e0", "s0"));
  CHECK(l.result == Value::ev("e0"));
}

TEST_CASE("run: pass applies the returned writer transformer") {
  // pass (return (x, self-append)) emits nothing
  ProgramPtr inner1 = Program::pure(Value::pair(Value::wr("w1"), Value::writer_fn(wf_self_append())));
  Output o1 = run(Program::op({"rws", "pass", {}}, [inner1](const Value&) { return inner1; }), rws_theory(),
                  in("e0", "s0"));
  CHECK(o1.result == Value::wr("w1"));
  CHECK(o1.state == Value::st("s0"));
  CHECK(o1.out == Value::list({}));

  // pass (tell [w0]; return (unit, const [])) erases what was emitted
  ProgramPtr inner2 = Program::bind(tell_list({"w0"}), [](const Value&) {
    return Program::pure(Value::pair(Value::unit(), Value::writer_fn(wf_const({}))));
  });
  Output o2 = run(Program::op({"rws", "pass", {}}, [inner2](const Value&) { return inner2; }), rws_theory(),
                  in("e0", "s0"));
  CHECK(o2.result == Value::unit());
  CHECK(o2.out == Value::list({}));

  // pass with a doubling transformer
  ProgramPtr inner3 = Program::bind(tell_list({"w0"}), [](const Value&) {
    return Program::pure(Value::pair(Value::unit(), Value::writer_fn(wf_self_append())));
  });
  Output o3 = run(Program::op({"rws", "pass", {}}, [inner3](const Value&) { return inner3; }), rws_theory(),
                  in("e0", "s0"));
  CHECK(o3.out == Value::list({Value::wr("w0"), Value::wr("w0")}));

  // bad sub-result
  ProgramPtr bad = Program::pure(Value::unit());
  CHECK_THROWS_AS(run(Program::op({"rws", "pass", {}}, [bad](const Value&) { return bad; }), rws_theory(),
                      in("e0", "s0")),
                  TypeError);
}

TEST_CASE("run validates payload carriers") {
  // tell of non-message values
  ProgramPtr bad_tell = Program::op({"rws", "tell", {Value::list({Value::st("s0")})}});
  CHECK_THROWS_AS(run(bad_tell, rws_theory(), in("e0", "s0")), TypeError);
  // local producing a non-environment
  PackagedFn to_state{[](const Value&) { return Value::st("s0"); }};
  ProgramPtr ret = Program::pure(Value::unit());
  CHECK_THROWS_AS(run(Program::op({"rws", "local", {to_state}}, [ret](const Value&) { return ret; }),
                      rws_theory(), in("e0", "s0")),
                  TypeError);
}

TEST_CASE("run rejects symbolic programs") {
  CHECK_THROWS_AS(run(Program::pure(Value::sym("x")), rws_theory(), in("e0", "s0")), EvalError);
  PackagedFn symbolic{[](const Value& s) { return mk_apply(Value::sym("g"), s); }};
  CHECK_THROWS_AS(run(Program::op({"rws", "gets", {symbolic}}), rws_theory(), in("e0", "s0")), EvalError);
}

TEST_CASE("wp: return substitutes the triple") {
  // P = (result ≡ unit) × (post-state ≡ s) × (output ≡ [])
  FormulaPtr P = f_and({f_atom(Value::sym("result"), Value::unit()),
                        f_atom(Value::sym("post-state"), Value::sym("s")),
                        f_atom(Value::sym("output"), Value::list({}))});
  FormulaPtr w = wp(Program::pure(Value::unit()), rws_theory(), post_from_formula(P), make_wp_ctx());
  // all three atoms close under substitution; no quantifiers introduced
  CHECK(w->tag == Formula::Tag::And);
  for (const auto& e : doms().ev)
    for (const auto& s : doms().st)
      CHECK(eval_formula(w, {{"e", Value::ev(e)}, {"s", Value::st(s)}}, doms(), kBounds));
}

TEST_CASE("wp: gets applies the getter to the pre-state") {
  PackagedFn identity{[](const Value& s) { return s; }};
  FormulaPtr P = f_atom(Value::sym("post-state"), Value::st("s0"));
  FormulaPtr w = wp(Program::op({"rws", "gets", {identity}}), rws_theory(), post_from_formula(P), make_wp_ctx());
  REQUIRE(w->tag == Formula::Tag::Atom);
  CHECK(w->atom.lhs == Value::sym("s"));
  CHECK(w->atom.rhs == Value::st("s0"));
}

TEST_CASE("wp: tell substitutes the emitted list") {
  // P = (0 ≡ length output) against tell [w0] becomes 0 ≡ length [w0]
  FormulaPtr P = f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("output")}));
  FormulaPtr w = wp(tell_list({"w0"}), rws_theory(), post_from_formula(P), make_wp_ctx());
  REQUIRE(w->tag == Formula::Tag::Atom);
  CHECK(w->atom.rhs == Value::nat(1));  // length [w0] reduces at generation
  CHECK(!eval_formula(w, {{"e", Value::ev("e0")}, {"s", Value::st("s0")}}, doms(), kBounds));
}

TEST_CASE("wp: bind aliases the intermediate result") {
  PackagedFn identity{[](const Value& s) { return s; }};
  ProgramPtr p = Program::bind(Program::op({"rws", "gets", {identity}}),
                               [](const Value& x) { return Program::pure(x); });
  FormulaPtr P = f_atom(Value::sym("result"), Value::st("s0"));
  FormulaPtr w = wp(p, rws_theory(), post_from_formula(P), make_wp_ctx());
  REQUIRE(w->tag == Formula::Tag::ForallGuarded);
  CHECK(w->var == "r");
  CHECK(w->var_type == TypeDesc::st());
  CHECK(w->atom.lhs == Value::sym("r"));
  CHECK(w->atom.rhs == Value::sym("s"));
  CHECK(eval_formula(w, {{"e", Value::ev("e0")}, {"s", Value::st("s0")}}, doms(), kBounds));
  CHECK(!eval_formula(w, {{"e", Value::ev("e0")}, {"s", Value::st("s1")}}, doms(), kBounds));
}

TEST_CASE("rws_bind_post examples") {
  // P = (0 ≡ length output), outs = [w0], applied at output [w1]: 0 ≡ 2
  FormulaPtr P = f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("output")}));
  PostFn post = rws_bind_post(Value::list({Value::wr("w0")}), post_from_formula(P));
  FormulaPtr f = post(Value::unit(), Value::st("s0"), Value::list({Value::wr("w1")}), make_wp_ctx());
  CHECK(!eval_formula(f, {}, doms(), kBounds));

  // empty prefix leaves P unchanged under evaluation
  FormulaPtr P2 = f_atom(Value::nat(1), Value::neutral(NeutralHead::Length, {Value::sym("output")}));
  PostFn post2 = rws_bind_post(Value::list({}), post_from_formula(P2));
  FormulaPtr f2 = post2(Value::unit(), Value::st("s0"), Value::list({Value::wr("w1")}), make_wp_ctx());
  CHECK(eval_formula(f2, {}, doms(), kBounds));

  // outs=[w0], P=(output ≡ [w0]) at output=[]
  FormulaPtr P3 = f_atom(Value::sym("output"), Value::list({Value::wr("w0")}));
  PostFn post3 = rws_bind_post(Value::list({Value::wr("w0")}), post_from_formula(P3));
  FormulaPtr f3 = post3(Value::unit(), Value::st("s0"), Value::list({}), make_wp_ctx());
  CHECK(eval_formula(f3, {}, doms(), kBounds));
}

TEST_CASE("rws_pass_post examples") {
  FormulaPtr P = f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("output")}));
  auto apply_at = [&](std::shared_ptr<const WriterFn> wf, ValueList out) {
    PostFn post = rws_pass_post(post_from_formula(P));
    return post(Value::pair(Value::unit(), Value::writer_fn(std::move(wf))), Value::st("s0"),
                Value::list(std::move(out)), make_wp_ctx());
  };
  // ((x, const []), s, [w0]) → P(x, s, [])
  CHECK(eval_formula(apply_at(wf_const({}), {Value::wr("w0")}), {}, doms(), kBounds));
  // ((x, id), s, []) → P(x, s, [])
  CHECK(eval_formula(apply_at(wf_id(), {}), {}, doms(), kBounds));
  // ((x, self-append), s, [w0]) → P(x, s, [w0, w0]) which fails 0 ≡ length
  CHECK(!eval_formula(apply_at(wf_self_append(), {Value::wr("w0")}), {}, doms(), kBounds));
}

TEST_CASE("paper-intro example runs per the operational rules") {
  Value g1 = table_st_to_maybe_wr({{"s0", Value::just(Value::wr("w0"))}, {"s1", Value::nothing()}});
  ProgramPtr p = build_paper_intro_prog(g1);
  Output o = run(p, ext(), in("e0", "s0"));
  CHECK(o.result == Value::unit());
  CHECK(o.state == Value::st("s0"));
  CHECK(o.out == Value::list({}));

  Value g2 = table_st_to_maybe_wr({{"s0", Value::nothing()}, {"s1", Value::nothing()}});
  Output o2 = run(build_paper_intro_prog(g2), ext(), in("e0", "s0"));
  CHECK(o2.out == Value::list({}));

  // ProgPost holds of every table and input
  Bounds b;
  for (const auto& g : enumerate_fn_tables(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr()), doms(), b)) {
    for (const auto& e : doms().ev)
      for (const auto& s : doms().st) {
        Output out = run(build_paper_intro_prog(g), ext(), in(e, s));
        Binding bind{{"e", Value::ev(e)}, {"s", Value::st(s)}};
        CHECK(holds_of_output(prog_post(), out, bind, doms(), b));
      }
  }
}

TEST_CASE("paper-intro obligation matches the golden shape") {
  ProgramPtr p = build_paper_intro_prog(Value::sym("g"));
  FormulaPtr w = wp(p, ext(), post_from_formula(prog_post()), make_wp_ctx(g_param_types()));

  // golden: (r : Maybe Wr) → r ≡ g s →
  //   ((j : Wr) → r ≡ just j → (r1 : Unit) → r1 ≡ unit →
  //      (o' : List Wr) → o' ≡ [] → (s ≡ s) × (0 ≡ length o'))
  // × (r ≡ nothing → (o' : List Wr) → o' ≡ [] → (s ≡ s) × (0 ≡ length o'))
  Value gs = Value::neutral(NeutralHead::Apply, {Value::sym("g"), Value::sym("s")});
  TypeDesc list_wr = TypeDesc::list(TypeDesc::wr());
  auto tail = f_and({f_atom(Value::sym("s"), Value::sym("s")),
                     f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("o'")}))});
  auto guarded_tail = f_forall_guarded("o'", list_wr, {Value::sym("o'"), Value::list({})}, tail);
  FormulaPtr golden = f_forall_guarded(
      "r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), gs},
      f_and({f_forall_guarded("j", TypeDesc::wr(), {Value::sym("r"), Value::just(Value::sym("j"))},
                              f_forall_guarded("r1", TypeDesc::unit(), {Value::sym("r1"), Value::unit()},
                                               guarded_tail)),
             f_implies({Value::sym("r"), Value::nothing()}, guarded_tail)}));
  INFO(print_formula(w));
  CHECK(alpha_eq(w, golden));

  // simplify removes only the unit-result alias
  FormulaPtr simplified = simplify(w);
  FormulaPtr golden_simplified = f_forall_guarded(
      "r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), gs},
      f_and({f_forall_guarded("j", TypeDesc::wr(), {Value::sym("r"), Value::just(Value::sym("j"))},
                              guarded_tail),
             f_implies({Value::sym("r"), Value::nothing()}, guarded_tail)}));
  INFO(print_formula(simplified));
  CHECK(alpha_eq(simplified, golden_simplified));
}

TEST_CASE("wp is deterministic and seed-shifted formulas are alpha-equivalent") {
  ProgramPtr p = build_paper_intro_prog(Value::sym("g"));
  FormulaPtr w1 = wp(p, ext(), post_from_formula(prog_post()), make_wp_ctx(g_param_types(), 0));
  FormulaPtr w2 = wp(p, ext(), post_from_formula(prog_post()), make_wp_ctx(g_param_types(), 0));
  CHECK(print_formula(w1) == print_formula(w2));

  FormulaPtr w3 = wp(p, ext(), post_from_formula(prog_post()), make_wp_ctx(g_param_types(), 3));
  CHECK(print_formula(w1) != print_formula(w3));
  CHECK(alpha_eq(w1, w3));
}

TEST_CASE("output concatenation law") {
  // output(run(bind m k)) == output(run m) ++ output(run (k x)) at the intermediate state
  std::vector<ProgramPtr> firsts = {tell_list({"w0"}), tell_list({"w0", "w1"}),
                                    Program::pure(Value::unit())};
  for (const auto& m : firsts) {
    Cont k = [](const Value&) { return tell_list({"w1"}); };
    for (const auto& s : doms().st) {
      Output direct = run(Program::bind(m, k), rws_theory(), in("e0", s));
      Output o1 = run(m, rws_theory(), in("e0", s));
      Output o2 = run(k(o1.result), rws_theory(), Input{Value::ev("e0"), o1.state});
      CHECK(direct.out == mk_append(o1.out, o2.out));
    }
  }
}

TEST_CASE("is_branch_free") {
  std::vector<Input> probes;
  for (const auto& e : doms().ev)
    for (const auto& s : doms().st) probes.push_back(in(e, s));

  CHECK(is_branch_free(Program::pure(Value::unit()), ext(), probes));
  CHECK(is_branch_free(Program::bind(tell_list({"w0"}), [](const Value&) { return Program::pure(Value::unit()); }),
                       ext(), probes));
  Value g = table_st_to_maybe_wr({{"s0", Value::just(Value::wr("w0"))}, {"s1", Value::nothing()}});
  CHECK(!is_branch_free(build_paper_intro_prog(g), ext(), probes));
}

TEST_CASE("malformed theory lookups fail") {
  CHECK_THROWS_AS(run(Program::op({"rws", "zap", {}}), rws_theory(), in("e0", "s0")), TypeError);
  CHECK_THROWS_AS(wp(Program::op({"rws", "zap", {}}), rws_theory(),
                     post_from_formula(f_top()), make_wp_ctx()),
                  TypeError);
}
