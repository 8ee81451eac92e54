#include "wpcheck/formula.hpp"
#include "wpcheck/formula_text.hpp"

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

const Bounds kBounds = [] {
  Bounds b;
  b.max_list_len = 2;
  return b;
}();

// all bindings of the given symbols over their types
std::vector<Binding> all_bindings(const std::vector<std::pair<std::string, TypeDesc>>& vars) {
  std::vector<Binding> out{{}};
  for (const auto& [n, t] : vars) {
    std::vector<Binding> next;
    for (const auto& b : out)
      for (const auto& v : enumerate_carrier(t, doms(), kBounds)) {
        Binding nb = b;
        nb[n] = v;
        next.push_back(nb);
      }
    out = std::move(next);
  }
  return out;
}

void check_eval_equivalent(const FormulaPtr& a, const FormulaPtr& b,
                           const std::vector<std::pair<std::string, TypeDesc>>& vars) {
  for (const auto& bind : all_bindings(vars))
    CHECK(eval_formula(a, bind, doms(), kBounds) == eval_formula(b, bind, doms(), kBounds));
}

}  // namespace

TEST_CASE("guarded quantifier evaluation") {
  // (r : Maybe Wr) → r ≡ just w0 → r ≡ just w0
  FormulaPtr f = f_forall_guarded("r", TypeDesc::maybe(TypeDesc::wr()),
                                  {Value::sym("r"), Value::just(Value::wr("w0"))},
                                  f_atom(Value::sym("r"), Value::just(Value::wr("w0"))));
  CHECK(eval_formula(f, {}, doms(), kBounds));

  // (j : Wr) → nothing ≡ just j → ⊥   (vacuous)
  FormulaPtr g = f_forall_guarded("j", TypeDesc::wr(), {Value::nothing(), Value::just(Value::sym("j"))},
                                  f_bottom());
  CHECK(eval_formula(g, {}, doms(), kBounds));

  // pattern guard with a matching scrutinee binds the payload
  FormulaPtr h = f_forall_guarded("j", TypeDesc::wr(),
                                  {Value::just(Value::sym("j")), Value::just(Value::wr("w1"))},
                                  f_atom(Value::sym("j"), Value::wr("w1")));
  CHECK(eval_formula(h, {}, doms(), kBounds));
}

TEST_CASE("plain quantifier evaluation enumerates the carrier") {
  FormulaPtr f = f_forall_plain("b", TypeDesc::boolean(), f_atom(Value::sym("b"), Value::sym("b")));
  CHECK(eval_formula(f, {}, doms(), kBounds));

  FormulaPtr g = f_forall_plain("b", TypeDesc::boolean(), f_atom(Value::sym("b"), Value::boolean(true)));
  CHECK(!eval_formula(g, {}, doms(), kBounds));

  FormulaPtr h = f_forall_plain("w", TypeDesc::writer_fn(), f_top());
  CHECK_THROWS_AS(eval_formula(h, {}, doms(), kBounds), EnumError);
}

TEST_CASE("implication with equality hypothesis") {
  FormulaPtr f = f_implies({Value::sym("x"), Value::boolean(true)}, f_bottom());
  CHECK(eval_formula(f, {{"x", Value::boolean(false)}}, doms(), kBounds));
  CHECK(!eval_formula(f, {{"x", Value::boolean(true)}}, doms(), kBounds));
}

TEST_CASE("evaluation requires resolvable terms") {
  FormulaPtr f = f_atom(Value::sym("x"), Value::unit());
  CHECK_THROWS_AS(eval_formula(f, {}, doms(), kBounds), EvalError);
}

TEST_CASE("simplify: conjunction flattening and top elimination") {
  FormulaPtr atom = f_atom(Value::nat(0), Value::nat(0));
  FormulaPtr f = f_and({f_top(), atom});
  FormulaPtr s = simplify(f);
  CHECK(s->tag == Formula::Tag::Atom);

  FormulaPtr nested = f_and({f_and({atom, atom}), f_top(), atom});
  FormulaPtr s2 = simplify(nested);
  REQUIRE(s2->tag == Formula::Tag::And);
  CHECK(s2->conjuncts.size() == 3);

  CHECK(simplify(f_and({}))->tag == Formula::Tag::Top);
}

TEST_CASE("simplify: append identities and literal lengths inside atoms") {
  Value redex = Value::neutral(
      NeutralHead::Length,
      {Value::neutral(NeutralHead::Append, {Value::list({}), Value::sym("o'")})});
  FormulaPtr f = f_atom(Value::nat(0), redex);
  FormulaPtr s = simplify(f);
  REQUIRE(s->tag == Formula::Tag::Atom);
  CHECK(s->atom.rhs == Value::neutral(NeutralHead::Length, {Value::sym("o'")}));

  FormulaPtr g = f_atom(Value::nat(2), Value::neutral(NeutralHead::Length,
                                                      {Value::list({Value::wr("w0"), Value::wr("w0")})}));
  CHECK(simplify(g)->atom.rhs == Value::nat(2));
}

TEST_CASE("simplify: literal constructor guards resolve by substitution") {
  std::vector<std::pair<std::string, TypeDesc>> vars{{"x", TypeDesc::maybe(TypeDesc::wr())}};
  // (r : Maybe Wr) → r ≡ nothing → x ≡ r
  FormulaPtr f = f_forall_guarded("r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), Value::nothing()},
                                  f_atom(Value::sym("x"), Value::sym("r")));
  FormulaPtr s = simplify(f);
  CHECK(s->tag == Formula::Tag::Atom);  // quantifier eliminated
  check_eval_equivalent(f, s, vars);

  // list-typed guards stay
  FormulaPtr g = f_forall_guarded("o'", TypeDesc::list(TypeDesc::wr()), {Value::sym("o'"), Value::list({})},
                                  f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("o'")})));
  CHECK(simplify(g)->tag == Formula::Tag::ForallGuarded);
  check_eval_equivalent(g, simplify(g), {});
}

TEST_CASE("simplifier soundness on a formula corpus") {
  Value gs = Value::neutral(NeutralHead::Apply, {Value::sym("g"), Value::sym("s")});
  std::vector<std::pair<std::string, TypeDesc>> vars{
      {"s", TypeDesc::st()}, {"g", TypeDesc::fn(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr()))}};

  std::vector<FormulaPtr> corpus;
  corpus.push_back(f_forall_guarded(
      "r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), gs},
      f_and({f_forall_guarded("j", TypeDesc::wr(), {Value::sym("r"), Value::just(Value::sym("j"))},
                              f_atom(Value::sym("j"), Value::sym("j"))),
             f_implies({Value::sym("r"), Value::nothing()}, f_atom(Value::sym("s"), Value::sym("s")))})));
  corpus.push_back(f_forall_guarded("r1", TypeDesc::unit(), {Value::sym("r1"), Value::unit()},
                                    f_atom(Value::sym("r1"), Value::unit())));
  corpus.push_back(f_and({f_top(), f_bottom(), f_atom(Value::sym("s"), Value::st("s0"))}));
  corpus.push_back(f_forall_plain("b", TypeDesc::boolean(),
                                  f_implies({Value::sym("b"), Value::boolean(true)},
                                            f_atom(Value::sym("b"), Value::boolean(true)))));
  for (const auto& f : corpus) check_eval_equivalent(f, simplify(f), vars);
}

TEST_CASE("guard substitution agrees with enumeration") {
  // (x : Maybe Wr) → x ≡ just w0 → x ≡ just w0, evaluated both ways
  Atom guard{Value::sym("x"), Value::just(Value::wr("w0"))};
  FormulaPtr body = f_atom(Value::sym("x"), Value::just(Value::wr("w0")));
  FormulaPtr guarded = f_forall_guarded("x", TypeDesc::maybe(TypeDesc::wr()), guard, body);
  FormulaPtr enumerated = f_forall_plain("x", TypeDesc::maybe(TypeDesc::wr()), f_implies(guard, body));
  check_eval_equivalent(guarded, enumerated, {});
}

TEST_CASE("alpha equivalence") {
  Value t = Value::neutral(NeutralHead::Apply, {Value::sym("g"), Value::sym("s")});
  auto mk = [&](const std::string& v) {
    return f_forall_guarded(v, TypeDesc::maybe(TypeDesc::wr()), {Value::sym(v), t},
                            f_atom(Value::sym(v), Value::nothing()));
  };
  CHECK(alpha_eq(mk("r"), mk("m")));
  CHECK(!alpha_eq(mk("r"), f_forall_guarded("r", TypeDesc::maybe(TypeDesc::wr()),
                                            {Value::sym("r"), Value::sym("s")},
                                            f_atom(Value::sym("r"), Value::nothing()))));
  // free variables must match exactly
  CHECK(!alpha_eq(f_atom(Value::sym("a"), Value::unit()), f_atom(Value::sym("b"), Value::unit())));
}

TEST_CASE("printing follows the obligation style") {
  CHECK(print_formula(f_top()) == "⊤");
  CHECK(print_formula(f_bottom()) == "⊥");
  CHECK(print_formula(f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("o'")}))) ==
        "0 ≡ length o'");

  Value gs = Value::neutral(NeutralHead::Apply, {Value::sym("g"), Value::sym("s")});
  FormulaPtr f = f_forall_guarded("r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), gs},
                                  f_atom(Value::sym("s"), Value::sym("s")));
  CHECK(print_formula(f) == "(r : Maybe Wr) → r ≡ g s → s ≡ s");

  FormulaPtr conj = f_and({f_atom(Value::sym("s"), Value::sym("s")),
                           f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("o'")}))});
  CHECK(print_formula(conj) == "(s ≡ s) × (0 ≡ length o')");
}

TEST_CASE("printer and parser round trip") {
  Value gs = Value::neutral(NeutralHead::Apply, {Value::sym("g"), Value::sym("s")});
  std::vector<FormulaPtr> corpus;
  corpus.push_back(f_top());
  corpus.push_back(f_bottom());
  corpus.push_back(f_atom(Value::nat(0), Value::neutral(NeutralHead::Length, {Value::sym("output")})));
  corpus.push_back(f_forall_guarded(
      "r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), gs},
      f_and({f_forall_guarded("j", TypeDesc::wr(), {Value::sym("r"), Value::just(Value::sym("j"))},
                              f_forall_guarded("o'", TypeDesc::list(TypeDesc::wr()),
                                               {Value::sym("o'"), Value::list({})},
                                               f_and({f_atom(Value::sym("s"), Value::sym("s")),
                                                      f_atom(Value::nat(0),
                                                             Value::neutral(NeutralHead::Length,
                                                                            {Value::sym("o'")}))}))),
             f_implies({Value::sym("r"), Value::nothing()}, f_atom(Value::sym("s"), Value::sym("s")))})));
  corpus.push_back(f_forall_plain("b", TypeDesc::boolean(), f_atom(Value::sym("b"), Value::sym("b"))));
  corpus.push_back(f_atom(Value::pair(Value::unit(), Value::writer_fn(wf_self_append())),
                          Value::pair(Value::unit(), Value::writer_fn(wf_const({Value::wr("w0")})))));
  corpus.push_back(f_atom(Value::neutral(NeutralHead::Append, {Value::sym("xs"), Value::sym("ys")}),
                          Value::list({Value::wr("w0"), Value::wr("w1")})));
  corpus.push_back(
      f_atom(Value::neutral(NeutralHead::Apply, {Value::sym("f"), Value::sym("o")}), Value::sym("o'")));
  corpus.push_back(f_forall_guarded(
      "l", TypeDesc::wr(), {Value::sym("x"), Value::left(Value::sym("l"))},
      f_atom(Value::sym("l"), Value::wr("w0"))));

  for (const auto& f : corpus) {
    std::string text = print_formula(f);
    FormulaPtr back = parse_formula_text(text, doms());
    INFO(text);
    CHECK(alpha_eq(f, back));
  }
}

TEST_CASE("parser rejects malformed input with positions") {
  CHECK_THROWS_AS(parse_formula_text("0 ≡", doms()), ParseError);
  CHECK_THROWS_AS(parse_formula_text("(r : Zed) → r ≡ s → ⊤", doms()), ParseError);
}

TEST_CASE("free variables") {
  Value gs = Value::neutral(NeutralHead::Apply, {Value::sym("g"), Value::sym("s")});
  FormulaPtr f = f_forall_guarded("r", TypeDesc::maybe(TypeDesc::wr()), {Value::sym("r"), gs},
                                  f_atom(Value::sym("r"), Value::sym("x")));
  auto fv = free_vars(f);
  CHECK(std::count(fv.begin(), fv.end(), "g") == 1);
  CHECK(std::count(fv.begin(), fv.end(), "s") == 1);
  CHECK(std::count(fv.begin(), fv.end(), "x") == 1);
  CHECK(std::count(fv.begin(), fv.end(), "r") == 0);
}

TEST_CASE("json rendering is tagged") {
  FormulaPtr f = f_forall_guarded("r", TypeDesc::maybe(TypeDesc::wr()),
                                  {Value::sym("r"), Value::nothing()}, f_top());
  auto j = formula_to_json(f);
  CHECK(j["f"] == "forall-guarded");
  CHECK(j["var"] == "r");
  CHECK(j["type"] == "Maybe Wr");
  CHECK(j["body"]["f"] == "top");
}
