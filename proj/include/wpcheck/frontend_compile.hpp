#pragma once

// Included at the end of frontend.hpp; not a standalone header.

namespace wpcheck {

namespace detail {

inline void check_binder(const Sexp& s, const std::string& n, const CompileScope& sc) {
  if (n == "_") return;
  if (surface_keywords().count(n)) form_error(s, "binder shadows keyword " + n);
  if (distinguished_vars().count(n)) form_error(s, "binder shadows distinguished variable " + n);
  if (atom_literal(n, sc.unit->domains)) form_error(s, "binder shadows atom " + n);
}

inline std::pair<std::string, Sexp> lambda_parts(const Sexp& s, const CompileScope& sc) {
  if (!s.is_list() || s.size() != 3 || !s[0].is_sym("lambda") || !s[1].is_list() || s[1].size() != 1 ||
      s[1][0].kind != Sexp::Kind::Sym)
    form_error(s, "expected (lambda (x) e)");
  check_binder(s, s[1][0].sym, sc);
  return {s[1][0].sym, s[2]};
}

}  // namespace detail

// Validates a program form: shapes, arities, and name scoping. Compilation of
// a validated unit is total.
inline void validate_program_form(const Sexp& s, CompileScope sc);

namespace detail {

inline void validate_expr_form(const Sexp& s, const CompileScope& sc) {
  compile_expr(s, sc);  // throws on malformed input
}

}  // namespace detail

inline void validate_program_form(const Sexp& s, CompileScope sc) {
  using detail::form_error;
  if (!s.is_list() || s.size() == 0 || s[0].kind != Sexp::Kind::Sym) form_error(s, "malformed program form");
  const std::string& head = s[0].sym;
  auto arity = [&](std::size_t n) {
    if (s.size() != n + 1) form_error(s, head + " expects " + std::to_string(n) + " arguments");
  };
  auto with_var = [&](const std::string& v) {
    CompileScope inner = sc;
    if (v != "_") inner.vars.insert(v);
    return inner;
  };
  if (head == "return") {
    arity(1);
    detail::validate_expr_form(s[1], sc);
    return;
  }
  if (head == "bind") {
    arity(3);
    validate_program_form(s[1], sc);
    if (!s[2].is_list() || s[2].size() != 1 || s[2][0].kind != Sexp::Kind::Sym)
      form_error(s[2], "bind expects a (x) binder");
    detail::check_binder(s[2], s[2][0].sym, sc);
    validate_program_form(s[3], with_var(s[2][0].sym));
    return;
  }
  if (head == "gets" || head == "puts") {
    arity(1);
    auto [v, body] = detail::lambda_parts(s[1], sc);
    detail::validate_expr_form(body, with_var(v));
    return;
  }
  if (head == "tell") {
    arity(1);
    detail::validate_expr_form(s[1], sc);
    return;
  }
  if (head == "ask") {
    arity(0);
    return;
  }
  if (head == "local") {
    arity(2);
    auto [v, body] = detail::lambda_parts(s[1], sc);
    detail::validate_expr_form(body, with_var(v));
    validate_program_form(s[2], sc);
    return;
  }
  if (head == "pass") {
    arity(1);
    validate_program_form(s[1], sc);
    return;
  }
  if (head == "if") {
    arity(3);
    detail::validate_expr_form(s[1], sc);
    validate_program_form(s[2], sc);
    validate_program_form(s[3], sc);
    return;
  }
  if (head == "maybe") {
    arity(3);
    detail::validate_expr_form(s[1], sc);
    if (!s[2].is_list() || s[2].size() != 2 || s[2][0].kind != Sexp::Kind::Sym)
      form_error(s[2], "maybe expects a (x prog) just-branch");
    detail::check_binder(s[2], s[2][0].sym, sc);
    validate_program_form(s[2][1], with_var(s[2][0].sym));
    validate_program_form(s[3], sc);
    return;
  }
  if (head == "either") {
    arity(3);
    detail::validate_expr_form(s[1], sc);
    for (std::size_t i = 2; i <= 3; ++i) {
      if (!s[i].is_list() || s[i].size() != 2 || s[i][0].kind != Sexp::Kind::Sym)
        form_error(s[i], "either expects (x prog) branches");
      detail::check_binder(s[i], s[i][0].sym, sc);
      validate_program_form(s[i][1], with_var(s[i][0].sym));
    }
    return;
  }
  form_error(s, "unknown program form " + head);
}

// ---- spec formulas

inline FormulaPtr compile_spec_formula(const Sexp& s, const CompileScope& sc, const Binding& sym_env);

namespace detail {

inline Value compile_spec_term(const Sexp& s, const CompileScope& sc, const Binding& sym_env) {
  return eval_expr(compile_expr(s, sc), sym_env);
}

}  // namespace detail

inline FormulaPtr compile_spec_formula(const Sexp& s, const CompileScope& sc, const Binding& sym_env) {
  using detail::form_error;
  if (s.is_sym("top")) return f_top();
  if (s.is_sym("bottom")) return f_bottom();
  if (!s.is_list() || s.size() == 0 || s[0].kind != Sexp::Kind::Sym) form_error(s, "malformed spec formula");
  const std::string& head = s[0].sym;
  if (head == "top") return f_top();
  if (head == "bottom") return f_bottom();
  if (head == "and") {
    std::vector<FormulaPtr> cs;
    for (std::size_t i = 1; i < s.size(); ++i) cs.push_back(compile_spec_formula(s[i], sc, sym_env));
    if (cs.empty()) return f_top();
    if (cs.size() == 1) return cs[0];
    return f_and(std::move(cs));
  }
  if (head == "eq") {
    if (s.size() != 3) form_error(s, "eq expects 2 arguments");
    return f_atom(detail::compile_spec_term(s[1], sc, sym_env), detail::compile_spec_term(s[2], sc, sym_env));
  }
  if (head == "implies") {
    if (s.size() != 3) form_error(s, "implies expects 2 arguments");
    if (!s[1].is_list() || s[1].size() != 3 || !s[1][0].is_sym("eq"))
      form_error(s[1], "implies hypothesis must be an (eq t t) atom");
    Atom hyp{detail::compile_spec_term(s[1][1], sc, sym_env), detail::compile_spec_term(s[1][2], sc, sym_env)};
    return f_implies(hyp, compile_spec_formula(s[2], sc, sym_env));
  }
  if (head == "forall") {
    if (s.size() != 3 || !s[1].is_list() || s[1].size() != 2 || s[1][0].kind != Sexp::Kind::Sym)
      form_error(s, "forall expects ((x T) f)");
    const std::string& v = s[1][0].sym;
    if (detail::surface_keywords().count(v) || detail::atom_literal(v, sc.unit->domains) ||
        detail::reserved_formula_var(v))
      form_error(s[1], "quantifier binder " + v + " is reserved");
    if (sym_env.count(v)) form_error(s[1], "quantifier binder " + v + " shadows an outer binding");
    TypeDesc ty = detail::type_from_sexp(s[1][1]);
    CompileScope inner = sc;
    inner.vars.insert(v);
    Binding env = sym_env;
    env[v] = Value::sym(v);
    return canonical_forall(v, ty, compile_spec_formula(s[2], inner, env));
  }
  form_error(s, "unknown spec form " + head);
}

// Distinguished variables map to the fixed symbol vocabulary: pre-env ↦ e,
// pre-state ↦ s, result / post-state / output named verbatim.
inline Binding spec_sym_env(const SourceUnit& u) {
  Binding env;
  env["pre-env"] = Value::sym("e");
  env["pre-state"] = Value::sym("s");
  env["result"] = Value::sym("result");
  env["post-state"] = Value::sym("post-state");
  env["output"] = Value::sym("output");
  for (const auto& [n, t] : u.params) env[n] = Value::sym(n);
  return env;
}

inline CompileScope spec_scope(const SourceUnit& u) {
  CompileScope sc;
  sc.unit = &u;
  for (const auto& d : detail::distinguished_vars()) sc.vars.insert(d);
  for (const auto& [n, t] : u.params) sc.vars.insert(n);
  return sc;
}

inline FormulaPtr compile_spec(const SourceUnit& u, const std::string& name) {
  const Sexp* s = u.spec(name);
  if (!s) throw ParseError("unknown spec " + name);
  return compile_spec_formula(*s, spec_scope(u), spec_sym_env(u));
}

// ---- unit parsing

namespace detail {

inline Sexp normalize_spec_sexp(const Sexp& s) {
  if (!s.is_list() || s.size() == 0) return s;
  Sexp out = s;
  for (auto& it : out.items) it = normalize_spec_sexp(it);
  if (out.size() >= 1 && out[0].is_sym("and")) {
    if (out.size() == 1) return Sexp::symbol("top");
    if (out.size() == 2) return out.items[1];
  }
  return out;
}

}  // namespace detail

inline SourceUnit parse_unit(const std::string& text) {
  using detail::form_error;
  std::vector<Sexp> forms = read_sexps(text);
  SourceUnit u;
  bool have_program = false;
  std::vector<std::pair<std::string, Sexp>> raw_specs;
  for (const Sexp& f : forms) {
    if (!f.is_list() || f.size() == 0 || f[0].kind != Sexp::Kind::Sym) form_error(f, "expected a declaration");
    const std::string& head = f[0].sym;
    if (head == "domain") {
      if (f.size() != 3 || f[1].kind != Sexp::Kind::Sym || !f[2].is_list()) form_error(f, "expected (domain C (atoms…))");
      std::vector<std::string>* target = nullptr;
      if (f[1].sym == "St") target = &u.domains.st;
      else if (f[1].sym == "Ev") target = &u.domains.ev;
      else if (f[1].sym == "Wr") target = &u.domains.wr;
      else form_error(f[1], "unknown carrier " + f[1].sym);
      if (!target->empty()) form_error(f, "duplicate domain " + f[1].sym);
      for (const Sexp& a : f[2].items) {
        if (a.kind != Sexp::Kind::Sym) form_error(a, "atom names must be symbols");
        if (detail::surface_keywords().count(a.sym) || detail::distinguished_vars().count(a.sym))
          form_error(a, "atom name " + a.sym + " is reserved");
        target->push_back(a.sym);
      }
      continue;
    }
    if (head == "param") {
      if (f.size() != 3 || f[1].kind != Sexp::Kind::Sym) form_error(f, "expected (param name type)");
      const std::string& n = f[1].sym;
      if (detail::surface_keywords().count(n) || detail::distinguished_vars().count(n) || n == "s" || n == "e")
        form_error(f[1], "parameter name " + n + " is reserved");
      if (u.param_type(n)) form_error(f[1], "duplicate parameter " + n);
      TypeDesc t = detail::type_from_sexp(f[2]);
      if (t.tag != TypeDesc::Tag::Fn) form_error(f[2], "parameters must have a function type");
      u.params.emplace_back(n, t);
      continue;
    }
    if (head == "program") {
      if (f.size() != 2) form_error(f, "expected (program body)");
      if (have_program) form_error(f, "duplicate program");
      u.program = f[1];
      have_program = true;
      continue;
    }
    if (head == "spec") {
      if (f.size() != 3 || f[1].kind != Sexp::Kind::Sym) form_error(f, "expected (spec name formula)");
      for (const auto& [n, sx] : raw_specs)
        if (n == f[1].sym) form_error(f[1], "duplicate spec " + f[1].sym);
      raw_specs.emplace_back(f[1].sym, detail::normalize_spec_sexp(f[2]));
      continue;
    }
    form_error(f, "unknown declaration " + head);
  }
  u.domains.validate();
  // atom names must not collide across carriers
  for (const auto& a : u.domains.st)
    if (u.domains.has_atom(Carrier::Ev, a) || u.domains.has_atom(Carrier::Wr, a))
      throw ParseError("atom " + a + " declared in two carriers");
  for (const auto& a : u.domains.ev)
    if (u.domains.has_atom(Carrier::Wr, a)) throw ParseError("atom " + a + " declared in two carriers");
  for (const auto& [n, t] : u.params)
    if (detail::atom_literal(n, u.domains)) throw ParseError("parameter " + n + " shadows an atom");
  if (!have_program) throw ParseError("missing (program …) form");

  CompileScope sc;
  sc.unit = &u;
  for (const auto& [n, t] : u.params) sc.vars.insert(n);
  validate_program_form(u.program, sc);
  u.specs = raw_specs;
  for (const auto& [n, sx] : u.specs) compile_spec(u, n);  // validates
  return u;
}

// ---- program compilation

using UnitPtr = std::shared_ptr<const SourceUnit>;

inline ProgramPtr compile_program_form(const Sexp& s, const Binding& env, const UnitPtr& u);

namespace detail {

inline PackagedFn compile_lambda(const Sexp& s, const Binding& env, const SourceUnit& u) {
  CompileScope sc;
  sc.unit = &u;
  for (const auto& [n, v] : env) sc.vars.insert(n);
  auto [var, body] = lambda_parts(s, sc);
  CompileScope inner = sc;
  if (var != "_") inner.vars.insert(var);
  ExprPtr compiled = compile_expr(body, inner);
  std::string v = var;
  return PackagedFn{[compiled, env, v](const Value& arg) {
    Binding e2 = env;
    if (v != "_") e2[v] = arg;
    return eval_expr(compiled, e2);
  }};
}

inline Value compile_value(const Sexp& s, const Binding& env, const SourceUnit& u) {
  CompileScope sc;
  sc.unit = &u;
  for (const auto& [n, v] : env) sc.vars.insert(n);
  return eval_expr(compile_expr(s, sc), env);
}

}  // namespace detail

inline ProgramPtr compile_program_form(const Sexp& s, const Binding& env, const UnitPtr& u) {
  const std::string& head = s[0].sym;
  if (head == "return") return Program::pure(detail::compile_value(s[1], env, *u));
  if (head == "bind") {
    ProgramPtr m = compile_program_form(s[1], env, u);
    std::string var = s[2][0].sym;
    Sexp body = s[3];
    Cont k = [body, var, env, u](const Value& v) {
      Binding e2 = env;
      if (var != "_") e2[var] = v;
      return compile_program_form(body, e2, u);
    };
    return Program::bind(m, k);
  }
  if (head == "gets")
    return Program::op({"rws", "gets", {detail::compile_lambda(s[1], env, *u)}});
  if (head == "puts")
    return Program::op({"rws", "puts", {detail::compile_lambda(s[1], env, *u)}});
  if (head == "tell")
    return Program::op({"rws", "tell", {detail::compile_value(s[1], env, *u)}});
  if (head == "ask") return Program::op({"rws", "ask", {}});
  if (head == "local") {
    Sexp body = s[2];
    Cont sub = [body, env, u](const Value&) { return compile_program_form(body, env, u); };
    return Program::op({"rws", "local", {detail::compile_lambda(s[1], env, *u)}}, sub);
  }
  if (head == "pass") {
    Sexp body = s[1];
    Cont sub = [body, env, u](const Value&) { return compile_program_form(body, env, u); };
    return Program::op({"rws", "pass", {}}, sub);
  }
  if (head == "if") {
    Value scrut = detail::compile_value(s[1], env, *u);
    Sexp then_form = s[2], else_form = s[3];
    Cont subs = [then_form, else_form, env, u](const Value& b) {
      return compile_program_form(b.as_bool() ? then_form : else_form, env, u);
    };
    return Program::op({"branch", "if", {scrut}}, subs);
  }
  if (head == "maybe") {
    Value scrut = detail::compile_value(s[1], env, *u);
    std::string jv = s[2][0].sym;
    Sexp just_form = s[2][1], nothing_form = s[3];
    Cont subs = [jv, just_form, nothing_form, env, u](const Value& arg) {
      if (arg.is(Value::Tag::Just)) {
        Binding e2 = env;
        if (jv != "_") e2[jv] = arg.items()[0];
        return compile_program_form(just_form, e2, u);
      }
      return compile_program_form(nothing_form, env, u);
    };
    return Program::op({"branch", "maybe", {scrut}}, subs);
  }
  if (head == "either") {
    Value scrut = detail::compile_value(s[1], env, *u);
    std::string lv = s[2][0].sym, rv = s[3][0].sym;
    Sexp left_form = s[2][1], right_form = s[3][1];
    Cont subs = [lv, rv, left_form, right_form, env, u](const Value& arg) {
      Binding e2 = env;
      if (arg.is(Value::Tag::Left)) {
        if (lv != "_") e2[lv] = arg.items()[0];
        return compile_program_form(left_form, e2, u);
      }
      if (rv != "_") e2[rv] = arg.items()[0];
      return compile_program_form(right_form, e2, u);
    };
    return Program::op({"branch", "either", {scrut}}, subs);
  }
  throw ParseError("unknown program form " + head, s.line, s.col);
}

// Compiles the unit's program; parameters absent from the binding stay
// symbolic. The unit is shared into the continuations, which re-enter the
// compiler lazily.
inline ProgramPtr compile(const UnitPtr& u, const Binding& params) {
  Binding env;
  for (const auto& [n, t] : u->params) {
    auto it = params.find(n);
    if (it == params.end()) {
      env[n] = Value::sym(n);
    } else {
      if (!it->second.is(Value::Tag::Table) && !it->second.is(Value::Tag::Sym))
        throw TypeError("parameter " + n + " must be bound to a function table");
      env[n] = it->second;
    }
  }
  return compile_program_form(u->program, env, u);
}

inline ProgramPtr compile(const SourceUnit& u, const Binding& params) {
  return compile(std::make_shared<SourceUnit>(u), params);
}

// ---- printing

inline std::string print_unit(const SourceUnit& u) {
  std::ostringstream os;
  auto domain_line = [&](const char* name, const std::vector<std::string>& atoms) {
    std::vector<Sexp> as;
    for (const auto& a : atoms) as.push_back(Sexp::symbol(a));
    os << detail::flat_print(Sexp::list({Sexp::symbol("domain"), Sexp::symbol(name), Sexp::list(as)})) << "\n";
  };
  domain_line("St", u.domains.st);
  domain_line("Ev", u.domains.ev);
  domain_line("Wr", u.domains.wr);
  for (const auto& [n, t] : u.params)
    os << detail::flat_print(Sexp::list({Sexp::symbol("param"), Sexp::symbol(n), detail::type_to_sexp(t)}))
       << "\n";
  os << detail::pretty_print(Sexp::list({Sexp::symbol("program"), u.program}), 0) << "\n";
  for (const auto& [n, f] : u.specs)
    os << detail::pretty_print(Sexp::list({Sexp::symbol("spec"), Sexp::symbol(n), f}), 0) << "\n";
  return os.str();
}

// ---- theory registry

inline const EffectTheory& base_rws_theory() {
  static const EffectTheory T = rws_theory();
  return T;
}

inline const EffectTheory& default_theory() {
  static const EffectTheory T = extend_with_branching(rws_theory());
  return T;
}

inline const EffectTheory& theory_by_name(const std::string& name) {
  if (name == "rws") return base_rws_theory();
  if (name == "rws+branching" || name == "branching") return default_theory();
  throw ParseError("unknown theory " + name);
}

// ---- value literals (command line)

// Dash-joined constructor literals: unit, true, false, naturals, atoms,
// nothing, just-X, left-X, right-X.
inline Value parse_value_token(const std::string& tok, const Domains& dom) {
  if (tok == "unit") return Value::unit();
  if (tok == "true") return Value::boolean(true);
  if (tok == "false") return Value::boolean(false);
  if (tok == "nothing") return Value::nothing();
  if (tok.rfind("just-", 0) == 0) return Value::just(parse_value_token(tok.substr(5), dom));
  if (tok.rfind("left-", 0) == 0) return Value::left(parse_value_token(tok.substr(5), dom));
  if (tok.rfind("right-", 0) == 0) return Value::right(parse_value_token(tok.substr(6), dom));
  if (!tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }))
    return Value::nat(std::stoull(tok));
  if (auto a = detail::atom_literal(tok, dom)) return *a;
  throw ParseError("unknown value literal " + tok);
}

// "s0:just-w0,s1:nothing" — must cover the whole domain exactly once.
inline Value parse_table_literal(const std::string& text, const TypeDesc& fn_type, const Domains& dom,
                                 const Bounds& bounds) {
  if (fn_type.tag != TypeDesc::Tag::Fn) throw TypeError("parameter is not function-typed");
  std::map<std::string, Value> given;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string entry = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!entry.empty()) {
      std::size_t colon = entry.find(':');
      if (colon == std::string::npos) throw ParseError("table entry missing ':' in " + entry);
      std::string k = entry.substr(0, colon), v = entry.substr(colon + 1);
      if (given.count(k)) throw ParseError("duplicate table key " + k);
      given[k] = parse_value_token(v, dom);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  auto rep = std::make_shared<FnTableRep>();
  rep->dom = fn_type.args[0];
  rep->cod = fn_type.args[1];
  for (const Value& key : enumerate_carrier(fn_type.args[0], dom, bounds)) {
    auto it = given.find(to_string(key));
    if (it == given.end()) throw ParseError("table is missing an entry for " + to_string(key));
    rep->entries.emplace_back(key, it->second);
    given.erase(it);
  }
  if (!given.empty()) throw ParseError("table has an entry outside the domain: " + given.begin()->first);
  return Value::table(rep);
}

inline std::string table_to_literal(const Value& table) {
  std::string s;
  for (std::size_t i = 0; i < table.fn_table()->entries.size(); ++i) {
    const auto& [k, v] = table.fn_table()->entries[i];
    if (i) s += ",";
    std::string vs = to_string(v);
    for (auto& c : vs)
      if (c == ' ') c = '-';
    s += to_string(k) + ":" + vs;
  }
  return s;
}

// "(e0 s0)"
inline Input parse_input_literal(const std::string& text, const Domains& dom) {
  std::vector<Sexp> forms = read_sexps(text);
  if (forms.size() != 1 || !forms[0].is_list() || forms[0].size() != 2 ||
      forms[0][0].kind != Sexp::Kind::Sym || forms[0][1].kind != Sexp::Kind::Sym)
    throw ParseError("expected an input of the form (e0 s0)");
  const std::string& en = forms[0][0].sym;
  const std::string& sn = forms[0][1].sym;
  if (!dom.has_atom(Carrier::Ev, en)) throw ParseError("unknown environment atom " + en);
  if (!dom.has_atom(Carrier::St, sn)) throw ParseError("unknown state atom " + sn);
  return Input{Value::ev(en), Value::st(sn)};
}

inline std::string input_to_string(const Input& i) {
  return "(" + to_string(i.env) + " " + to_string(i.state) + ")";
}

inline std::string output_to_string(const Output& o) {
  return "(" + to_string(o.result) + ", " + to_string(o.state) + ", " + to_string(o.out) + ")";
}

// ---- built-in example

inline const char* paper_intro_source() {
  return R"((domain St (s0 s1 s2))
(domain Ev (e0))
(domain Wr (w0 w1 w2))
(param g (Fn St (Maybe Wr)))
(program
  (pass
    (bind (gets (lambda (s) (apply g s))) (m)
      (maybe m
        (j (bind (tell (list j)) (_) (return (pair unit (wf-const (list))))))
        (return (pair unit (wf-self-append)))))))
(spec ProgPost (and (eq pre-state post-state) (eq 0 (length output))))
)";
}

}  // namespace wpcheck
