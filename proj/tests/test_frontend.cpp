#include "wpcheck/frontend.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace wpcheck;

namespace {

const Bounds kBounds;

std::string tiny_unit(const std::string& program) {
  return "(domain St (s0 s1))\n(domain Ev (e0))\n(domain Wr (w0 w1))\n(program " + program + ")\n";
}

}  // namespace

TEST_CASE("reader reports unbalanced parentheses with positions") {
  try {
    read_sexps("(bind (gets (lambda (s) s))");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()) == "unbalanced parenthesis at 1:27");
  }
}

TEST_CASE("minimal unit parses") {
  SourceUnit u = parse_unit(tiny_unit("(return unit)"));
  CHECK(u.domains.st == std::vector<std::string>{"s0", "s1"});
  CHECK(u.program.is_list());
  CHECK(u.program[0].is_sym("return"));
}

TEST_CASE("parse errors carry positions and reasons") {
  CHECK_THROWS_AS(parse_unit("(domain St (s0 s0))(domain Ev (e0))(domain Wr (w0))(program (return unit))"),
                  EnumError);  // duplicate atom
  CHECK_THROWS_AS(parse_unit(tiny_unit("(return zed)")), ParseError);           // undeclared name
  CHECK_THROWS_AS(parse_unit(tiny_unit("(tell)")), ParseError);                 // arity
  CHECK_THROWS_AS(parse_unit(tiny_unit("(zap unit)")), ParseError);             // unknown form
  CHECK_THROWS_AS(parse_unit("(program (return unit))"), EnumError);            // missing carriers
  CHECK_THROWS_AS(parse_unit(tiny_unit("(return unit)") + "(param s0 (Fn St St))"), ParseError);
  CHECK_THROWS_AS(parse_unit(tiny_unit("(return unit)") + "(spec P (eq nope 1))"), ParseError);
}

TEST_CASE("compile and run the trivial program") {
  SourceUnit u = parse_unit(tiny_unit("(return unit)"));
  ProgramPtr p = compile(u, {});
  for (const auto& e : u.domains.ev)
    for (const auto& s : u.domains.st) {
      Output o = run(p, default_theory(), {Value::ev(e), Value::st(s)});
      CHECK(o.result == Value::unit());
      CHECK(o.state == Value::st(s));
      CHECK(o.out == Value::list({}));
    }
}

TEST_CASE("binders scope and shadow correctly") {
  SourceUnit u = parse_unit(tiny_unit("(bind (gets (lambda (s) s)) (x) (puts (lambda (s) x)))"));
  ProgramPtr p = compile(u, {});
  Output o = run(p, default_theory(), {Value::ev("e0"), Value::st("s1")});
  CHECK(o.state == Value::st("s1"));
}

TEST_CASE("the paper-intro source parses, compiles and matches the builder") {
  auto u = std::make_shared<SourceUnit>(parse_unit(paper_intro_source()));
  REQUIRE(u->params.size() == 1);
  CHECK(u->params[0].first == "g");
  CHECK(u->params[0].second == TypeDesc::fn(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr())));

  // concrete runs match the direct builder on every table and input
  Bounds b;
  for (const auto& g :
       enumerate_fn_tables(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr()), u->domains, b)) {
    ProgramPtr compiled = compile(u, {{"g", g}});
    ProgramPtr built = build_paper_intro_prog(g);
    for (const auto& e : u->domains.ev)
      for (const auto& s : u->domains.st) {
        Input i{Value::ev(e), Value::st(s)};
        Output a = run(compiled, default_theory(), i);
        Output c = run(built, default_theory(), i);
        CHECK(a.result == c.result);
        CHECK(a.state == c.state);
        CHECK(a.out == c.out);
      }
  }

  // the symbolic obligation agrees with the builder's
  FormulaPtr spec = compile_spec(*u, "ProgPost");
  FormulaPtr w_compiled = wp(compile(u, {}), default_theory(), post_from_formula(spec),
                             make_wp_ctx(u->param_sym_types()));
  FormulaPtr w_built = wp(build_paper_intro_prog(Value::sym("g")), default_theory(),
                          post_from_formula(spec), make_wp_ctx(u->param_sym_types()));
  CHECK(alpha_eq(w_compiled, w_built));
  REQUIRE(w_compiled->tag == Formula::Tag::ForallGuarded);
  CHECK(w_compiled->var_type == TypeDesc::maybe(TypeDesc::wr()));

  // run with a bound table at (e0, s1)
  Value g = parse_table_literal("s0:just-w0,s1:nothing,s2:nothing",
                                TypeDesc::fn(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr())), u->domains,
                                b);
  Output o = run(compile(u, {{"g", g}}), default_theory(), {Value::ev("e0"), Value::st("s1")});
  CHECK(o.result == Value::unit());
  CHECK(o.state == Value::st("s1"));
  CHECK(o.out == Value::list({}));
}

TEST_CASE("spec formulas map distinguished variables to the symbol vocabulary") {
  SourceUnit u = parse_unit(tiny_unit("(return unit)") +
                            "(spec P (and (eq pre-state post-state) (eq 0 (length output))))");
  FormulaPtr f = compile_spec(u, "P");
  REQUIRE(f->tag == Formula::Tag::And);
  CHECK(f->conjuncts[0]->atom.lhs == Value::sym("s"));
  CHECK(f->conjuncts[0]->atom.rhs == Value::sym("post-state"));
  CHECK(f->conjuncts[1]->atom.rhs == Value::neutral(NeutralHead::Length, {Value::sym("output")}));
}

TEST_CASE("spec quantifiers canonicalize guarded implications") {
  SourceUnit u = parse_unit(tiny_unit("(return unit)") +
                            "(spec P (forall (x (Maybe Wr)) (implies (eq x nothing) (top))))"
                            "(spec Q (forall (b Bool) (eq b b)))");
  FormulaPtr p = compile_spec(u, "P");
  CHECK(p->tag == Formula::Tag::ForallGuarded);
  FormulaPtr q = compile_spec(u, "Q");
  CHECK(q->tag == Formula::Tag::ForallPlain);
}

TEST_CASE("reserved binders are rejected in spec formulas") {
  CHECK_THROWS_AS(parse_unit(tiny_unit("(return unit)") + "(spec P (forall (s St) (eq s s)))"), ParseError);
  CHECK_THROWS_AS(parse_unit(tiny_unit("(return unit)") + "(spec P (forall (r1 Unit) (eq r1 unit)))"),
                  ParseError);
  CHECK_THROWS_AS(parse_unit(tiny_unit("(return unit)") + "(spec P (forall (o' (List Wr)) (top)))"),
                  ParseError);
}

TEST_CASE("print then parse is the identity on normalized units") {
  std::vector<std::string> sources = {
      paper_intro_source(),
      tiny_unit("(return unit)"),
      tiny_unit("(bind (ask) (v) (local (lambda (x) v) (bind (tell (list w0 w1)) (_) (return (pair v (wf-id))))))"),
      tiny_unit("(either (left w0 (Either Wr St)) (l (tell (list l))) (r (puts (lambda (q) r))))"),
      tiny_unit("(if (eq s0 s1) (return (just w0)) (return (nothing Wr)))"),
  };
  for (const auto& src : sources) {
    SourceUnit u = parse_unit(src);
    std::string printed = print_unit(u);
    INFO(printed);
    SourceUnit back = parse_unit(printed);
    CHECK(back == u);
    CHECK(print_unit(back) == printed);  // fixpoint after one normalization
  }
}

TEST_CASE("empty conjunctions normalize to the top form") {
  SourceUnit u = parse_unit(tiny_unit("(return unit)") + "(spec P (and))");
  REQUIRE(u.specs.size() == 1);
  CHECK(u.specs[0].second.is_sym("top"));
  CHECK(compile_spec(u, "P")->tag == Formula::Tag::Top);
}

TEST_CASE("nested binds print with stable indentation") {
  SourceUnit u = parse_unit(tiny_unit(
      "(bind (gets (lambda (s) s)) (x) (bind (gets (lambda (s) (eq s x))) (y) (if y (tell (list w0 w1)) "
      "(bind (tell (list w0)) (_) (puts (lambda (s) x))))))"));
  std::string expected =
      "(domain St (s0 s1))\n"
      "(domain Ev (e0))\n"
      "(domain Wr (w0 w1))\n"
      "(program\n"
      "  (bind\n"
      "    (gets (lambda (s) s))\n"
      "    (x)\n"
      "    (bind\n"
      "      (gets (lambda (s) (eq s x)))\n"
      "      (y)\n"
      "      (if y (tell (list w0 w1)) (bind (tell (list w0)) (_) (puts (lambda (s) x)))))))\n";
  CHECK(print_unit(u) == expected);
}

TEST_CASE("value literal parsing") {
  Domains d = parse_unit(tiny_unit("(return unit)")).domains;
  CHECK(parse_value_token("just-w0", d) == Value::just(Value::wr("w0")));
  CHECK(parse_value_token("nothing", d) == Value::nothing());
  CHECK(parse_value_token("true", d) == Value::boolean(true));
  CHECK(parse_value_token("7", d) == Value::nat(7));
  CHECK_THROWS_AS(parse_value_token("zed", d), ParseError);

  Bounds b;
  TypeDesc fn = TypeDesc::fn(TypeDesc::st(), TypeDesc::maybe(TypeDesc::wr()));
  Value t = parse_table_literal("s0:just-w0,s1:nothing", fn, d, b);
  CHECK(mk_apply(t, Value::st("s0")) == Value::just(Value::wr("w0")));
  CHECK(mk_apply(t, Value::st("s1")) == Value::nothing());
  CHECK(table_to_literal(t) == "s0:just-w0,s1:nothing");
  CHECK_THROWS_AS(parse_table_literal("s0:just-w0", fn, d, b), ParseError);  // not total
  CHECK_THROWS_AS(parse_table_literal("s0:just-w0,s1:nothing,s7:nothing", fn, d, b), ParseError);

  Input i = parse_input_literal("(e0 s1)", d);
  CHECK(i.env == Value::ev("e0"));
  CHECK(i.state == Value::st("s1"));
  CHECK(input_to_string(i) == "(e0 s1)");
  CHECK_THROWS_AS(parse_input_literal("(s1 e0)", d), ParseError);
}

TEST_CASE("printed obligations parse back alpha-equivalent") {
  auto u = std::make_shared<SourceUnit>(parse_unit(paper_intro_source()));
  FormulaPtr spec = compile_spec(*u, "ProgPost");
  FormulaPtr w = wp(compile(u, {}), default_theory(), post_from_formula(spec),
                    make_wp_ctx(u->param_sym_types()));
  for (const FormulaPtr& f : {w, simplify(w), spec}) {
    FormulaPtr back = parse_formula_text(print_formula(f), u->domains);
    CHECK(alpha_eq(f, back));
  }
}

#include "wpcheck/checker.hpp"

TEST_CASE("generated obligations round trip through the printer") {
  Domains d;
  d.st = {"s0", "s1"};
  d.ev = {"e0", "e1"};
  d.wr = {"w0", "w1"};
  auto corpus = generate_program_corpus(60, 5, d, 23);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    auto posts = generate_postconditions(1, corpus[k].result_type, d, 400 + k);
    auto unit = std::make_shared<SourceUnit>(unit_for_generated(corpus[k], d, posts));
    FormulaPtr spec = compile_spec(*unit, "P0");
    for (const FormulaPtr& f :
         {wp(compile(unit, {}), default_theory(), post_from_formula(spec), make_wp_ctx()), spec}) {
      std::string text = print_formula(f);
      INFO(text);
      FormulaPtr back = parse_formula_text(text, d);
      CHECK(alpha_eq(f, back));
    }
  }
}
