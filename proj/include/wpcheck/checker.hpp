#pragma once

#include "wpcheck/frontend.hpp"
#include "wpcheck/report.hpp"

#include <random>
#include <thread>

namespace wpcheck {

struct CheckOptions {
  Bounds bounds;
  Binding fixed_params;  // parameters bound on the command line; the rest are quantified
  unsigned seed = 0;
  int jobs = 1;
  const EffectTheory* theory = nullptr;       // defaults to rws+branching
  const EffectTheory* base_theory = nullptr;  // defaults to rws (extension checks)
};

namespace detail {

struct PreparedCheck {
  UnitPtr unit;
  const EffectTheory* theory;
  const EffectTheory* base;
  Bounds bounds;
  unsigned seed = 0;
  int jobs = 1;
  Binding fixed;
  std::vector<Input> inputs;
  std::vector<std::string> qnames;
  std::vector<ValueList> qchoices;
  std::size_t param_space = 1;
  SymTypes sym_types;
};

inline PreparedCheck prepare_check(const SourceUnit& u, const CheckOptions& opt) {
  PreparedCheck pc;
  pc.unit = std::make_shared<SourceUnit>(u);
  pc.theory = opt.theory ? opt.theory : &default_theory();
  pc.base = opt.base_theory ? opt.base_theory : &base_rws_theory();
  pc.bounds = opt.bounds;
  pc.seed = opt.seed;
  pc.jobs = std::max(1, opt.jobs);
  pc.fixed = opt.fixed_params;
  for (const auto& e : u.domains.ev)
    for (const auto& s : u.domains.st) pc.inputs.push_back(Input{Value::ev(e), Value::st(s)});
  for (const auto& [n, t] : u.params) {
    pc.sym_types[n] = t;
    if (pc.fixed.count(n)) continue;
    pc.qnames.push_back(n);
    pc.qchoices.push_back(enumerate_fn_tables(t.args[0], t.args[1], u.domains, opt.bounds));
    pc.param_space *= pc.qchoices.back().size();
  }
  return pc;
}

inline Binding param_binding_at(const PreparedCheck& pc, std::size_t pi) {
  Binding b = pc.fixed;
  for (std::size_t k = pc.qnames.size(); k-- > 0;) {
    b[pc.qnames[k]] = pc.qchoices[k][pi % pc.qchoices[k].size()];
    pi /= pc.qchoices[k].size();
  }
  return b;
}

inline std::string params_to_string(const Binding& pb) {
  std::string s;
  for (const auto& [n, v] : pb) {
    if (!s.empty()) s += " ";
    s += n + "=" + (v.is(Value::Tag::Table) ? table_to_literal(v) : to_string(v));
  }
  return s;
}

// Runs one predicate per enumerated (parameter binding, input) case,
// splitting cases across workers; counterexamples merge in enumeration
// order.
template <typename CaseFn>
inline CheckReport run_cases(const PreparedCheck& pc, const std::string& mode, const CaseFn& case_fn) {
  auto t0 = std::chrono::steady_clock::now();
  CheckReport rep;
  rep.mode = mode;
  rep.inputs_checked = pc.inputs.size();
  rep.params_checked = pc.param_space;
  std::size_t total = pc.param_space * pc.inputs.size();
  int jobs = std::min<std::size_t>(pc.jobs, total == 0 ? 1 : total);
  std::vector<std::vector<Counterexample>> found(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  auto worker = [&](int w) {
    try {
      for (std::size_t idx = w; idx < total; idx += jobs) {
        std::size_t pi = idx / pc.inputs.size();
        std::size_t ii = idx % pc.inputs.size();
        Binding pb = param_binding_at(pc, pi);
        if (auto cex = case_fn(pb, pc.inputs[ii])) {
          cex->index = idx;
          cex->params = params_to_string(pb);
          cex->input = input_to_string(pc.inputs[ii]);
          found[w].push_back(*cex);
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& f : found) rep.counterexamples.insert(rep.counterexamples.end(), f.begin(), f.end());
  std::sort(rep.counterexamples.begin(), rep.counterexamples.end(),
            [](const Counterexample& a, const Counterexample& b) { return a.index < b.index; });
  rep.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  return rep;
}

inline Binding with_input(const Binding& pb, const Input& i) {
  Binding b = pb;
  b["e"] = i.env;
  b["s"] = i.state;
  return b;
}

}  // namespace detail

enum class AgreementMode { Sufficiency, Necessity, Both };

inline const char* agreement_mode_name(AgreementMode m) {
  switch (m) {
    case AgreementMode::Sufficiency: return "sufficiency";
    case AgreementMode::Necessity: return "necessity";
    case AgreementMode::Both: return "both";
  }
  return "?";
}

// Sufficiency (wp ⇒ post∘run), necessity (post∘run ⇒ wp), or both, checked
// exhaustively over the parameter tables and the input space.
inline CheckReport check_agreement(const SourceUnit& u, const FormulaPtr& spec, AgreementMode mode,
                                   const CheckOptions& opt = {}) {
  detail::PreparedCheck pc = detail::prepare_check(u, opt);
  FormulaPtr wp_formula = wp(compile(pc.unit, pc.unit->symbolic_params()), *pc.theory,
                             post_from_formula(spec), make_wp_ctx(pc.sym_types, pc.seed));
  const Domains& dom = pc.unit->domains;
  auto case_fn = [&, spec, wp_formula](const Binding& pb, const Input& i) -> std::optional<Counterexample> {
    Binding base = detail::with_input(pb, i);
    bool wpv = eval_formula(wp_formula, base, dom, pc.bounds);
    Output out = run(compile(pc.unit, pb), *pc.theory, i);
    bool postv = holds_of_output(spec, out, base, dom, pc.bounds);
    bool bad = mode == AgreementMode::Sufficiency ? (wpv && !postv)
               : mode == AgreementMode::Necessity ? (postv && !wpv)
                                                  : (wpv != postv);
    if (!bad) return std::nullopt;
    return Counterexample{0, "", "", wpv, postv};
  };
  return detail::run_cases(pc, agreement_mode_name(mode), case_fn);
}

inline CheckReport check_sufficiency(const SourceUnit& u, const FormulaPtr& spec, const CheckOptions& opt = {}) {
  return check_agreement(u, spec, AgreementMode::Sufficiency, opt);
}
inline CheckReport check_necessity(const SourceUnit& u, const FormulaPtr& spec, const CheckOptions& opt = {}) {
  return check_agreement(u, spec, AgreementMode::Necessity, opt);
}

// ---- entailment (⊆ₒ): pointwise implication over enumerated output triples

struct EntailsResult {
  bool holds = true;
  std::string witness;
};

inline EntailsResult entails(const FormulaPtr& stronger, const FormulaPtr& weaker, const TypeDesc& result_type,
                             const Domains& dom, const Bounds& bounds, const Binding& base = {}) {
  ValueList results = enumerate_carrier(result_type, dom, bounds);
  ValueList states = enumerate_carrier(TypeDesc::st(), dom, bounds);
  ValueList outputs = enumerate_carrier(TypeDesc::list(TypeDesc::wr()), dom, bounds);
  for (const auto& x : results)
    for (const auto& st : states)
      for (const auto& o : outputs) {
        Binding b = base;
        b["result"] = x;
        b["post-state"] = st;
        b["output"] = o;
        if (eval_formula(stronger, b, dom, bounds) && !eval_formula(weaker, b, dom, bounds))
          return {false, "(" + to_string(x) + ", " + to_string(st) + ", " + to_string(o) + ")"};
      }
  return {true, ""};
}

// Monotonicity (MonoPT): a stronger postcondition yields a stronger
// precondition. The pair must be ⊆ₒ-ordered; violation of that contract is an
// error, not a failing verdict.
inline CheckReport check_monotonicity(const SourceUnit& u, const FormulaPtr& stronger, const FormulaPtr& weaker,
                                      const CheckOptions& opt = {}) {
  detail::PreparedCheck pc = detail::prepare_check(u, opt);
  const Domains& dom = pc.unit->domains;

  // result type from a probe execution
  Output probe = run(compile(pc.unit, detail::param_binding_at(pc, 0)), *pc.theory, pc.inputs.front());
  TypeDesc result_type = type_of_term(probe.result, {});

  for (std::size_t pi = 0; pi < pc.param_space; ++pi) {
    Binding pb = detail::param_binding_at(pc, pi);
    for (const auto& i : pc.inputs) {
      EntailsResult er = entails(stronger, weaker, result_type, dom, pc.bounds, detail::with_input(pb, i));
      if (!er.holds) throw Error("pair not ⊆ₒ-ordered (witness " + er.witness + ")");
    }
  }

  WpCtx ctx = make_wp_ctx(pc.sym_types, pc.seed);
  ProgramPtr symbolic = compile(pc.unit, pc.unit->symbolic_params());
  FormulaPtr wp1 = wp(symbolic, *pc.theory, post_from_formula(stronger), ctx);
  FormulaPtr wp2 = wp(symbolic, *pc.theory, post_from_formula(weaker), ctx);
  auto case_fn = [&, wp1, wp2](const Binding& pb, const Input& i) -> std::optional<Counterexample> {
    Binding base = detail::with_input(pb, i);
    bool v1 = eval_formula(wp1, base, dom, pc.bounds);
    bool v2 = eval_formula(wp2, base, dom, pc.bounds);
    if (v1 && !v2) return Counterexample{0, "", "", v1, v2};
    return std::nullopt;
  };
  return detail::run_cases(pc, "monotonicity", case_fn);
}

// Extension agreement (semantic form): the extended WP verdict coincides with
// the postcondition evaluated on the base-theory run of the unextended
// program, on every enumerated input.
inline CheckReport check_extension_agreement(const SourceUnit& u, const FormulaPtr& spec,
                                             const CheckOptions& opt = {}) {
  detail::PreparedCheck pc = detail::prepare_check(u, opt);
  const Domains& dom = pc.unit->domains;
  FormulaPtr wp_ext = wp(compile(pc.unit, pc.unit->symbolic_params()), *pc.theory, post_from_formula(spec),
                         make_wp_ctx(pc.sym_types, pc.seed));
  auto case_fn = [&, spec, wp_ext](const Binding& pb, const Input& i) -> std::optional<Counterexample> {
    Binding base = detail::with_input(pb, i);
    bool wpv = eval_formula(wp_ext, base, dom, pc.bounds);
    Output out = run(unextend(compile(pc.unit, pb)), *pc.base, i);
    bool postv = holds_of_output(spec, out, base, dom, pc.bounds);
    if (wpv != postv) return Counterexample{0, "", "", wpv, postv};
    return std::nullopt;
  };
  return detail::run_cases(pc, "extension", case_fn);
}

// ---- program corpus generation

struct GeneratedProgram {
  Sexp form;
  TypeDesc result_type;
  bool has_branch = false;
};

namespace detail {

class CorpusGen {
 public:
  CorpusGen(const Domains& dom, std::uint64_t seed) : dom_(dom), rng_(seed) {}

  GeneratedProgram next(int depth) {
    var_counter_ = 0;
    has_branch_ = false;
    TypeDesc ty = pick_result_type();
    Scope scope;
    Sexp form = gen_program(ty, depth, scope);
    return {std::move(form), ty, has_branch_};
  }

  Sexp postcondition(const TypeDesc& result_type) {
    std::vector<Sexp> atoms;
    std::size_t n = 1 + draw(3);
    for (std::size_t k = 0; k < n; ++k) atoms.push_back(post_atom(result_type));
    if (atoms.size() == 1) return atoms[0];
    std::vector<Sexp> items{Sexp::symbol("and")};
    items.insert(items.end(), atoms.begin(), atoms.end());
    return Sexp::list(items);
  }

 private:
  using Scope = std::vector<std::pair<std::string, TypeDesc>>;

  const Domains& dom_;
  std::mt19937_64 rng_;
  unsigned var_counter_ = 0;
  bool has_branch_ = false;

  std::size_t draw(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(std::size_t percent) { return draw(100) < percent; }

  std::string fresh_var() {
    for (;;) {
      std::string n = "x" + std::to_string(var_counter_++);
      if (!dom_.has_atom(Carrier::St, n) && !dom_.has_atom(Carrier::Ev, n) && !dom_.has_atom(Carrier::Wr, n))
        return n;
    }
  }

  Sexp atom_of(Carrier c) {
    const auto& as = dom_.atoms(c);
    return Sexp::symbol(as[draw(as.size())]);
  }

  TypeDesc pick_result_type() {
    switch (draw(7)) {
      case 0: return TypeDesc::unit();
      case 1: return TypeDesc::boolean();
      case 2: return TypeDesc::wr();
      case 3: return TypeDesc::st();
      case 4: return TypeDesc::ev();
      case 5: return TypeDesc::maybe(TypeDesc::wr());
      default: return TypeDesc::list(TypeDesc::wr());
    }
  }

  TypeDesc pick_bind_type() {
    switch (draw(8)) {
      case 0: return TypeDesc::unit();
      case 1: return TypeDesc::boolean();
      case 2: return TypeDesc::wr();
      case 3: return TypeDesc::st();
      case 4: return TypeDesc::ev();
      case 5: return TypeDesc::maybe(TypeDesc::wr());
      case 6: return TypeDesc::either(TypeDesc::wr(), TypeDesc::st());
      default: return TypeDesc::list(TypeDesc::wr());
    }
  }

  std::optional<Sexp> scoped_var(const TypeDesc& ty, const Scope& scope) {
    std::vector<const std::string*> hits;
    for (const auto& [n, t] : scope)
      if (t == ty) hits.push_back(&n);
    if (hits.empty() || chance(40)) return std::nullopt;
    return Sexp::symbol(*hits[draw(hits.size())]);
  }

  Sexp gen_expr(const TypeDesc& ty, const Scope& scope, int fuel = 2) {
    if (auto v = scoped_var(ty, scope)) return *v;
    switch (ty.tag) {
      case TypeDesc::Tag::Unit: return Sexp::symbol("unit");
      case TypeDesc::Tag::Bool:
        if (fuel > 0 && chance(35))
          return Sexp::list({Sexp::symbol("eq"), gen_expr(TypeDesc::st(), scope, fuel - 1),
                             gen_expr(TypeDesc::st(), scope, fuel - 1)});
        return Sexp::symbol(chance(50) ? "true" : "false");
      case TypeDesc::Tag::Nat: return Sexp::number(draw(3));
      case TypeDesc::Tag::St: return atom_of(Carrier::St);
      case TypeDesc::Tag::Ev: return atom_of(Carrier::Ev);
      case TypeDesc::Tag::Wr: return atom_of(Carrier::Wr);
      case TypeDesc::Tag::Maybe:
        if (chance(40)) return Sexp::symbol("nothing");
        return Sexp::list({Sexp::symbol("just"), gen_expr(ty.args[0], scope, fuel - 1)});
      case TypeDesc::Tag::Either: {
        bool leftSide = chance(50);
        return Sexp::list({Sexp::symbol(leftSide ? "left" : "right"),
                           gen_expr(ty.args[leftSide ? 0 : 1], scope, fuel - 1),
                           detail::type_to_sexp(ty)});
      }
      case TypeDesc::Tag::List: {
        if (fuel > 0 && chance(15))
          return Sexp::list({Sexp::symbol("append"), gen_expr(ty, scope, 0), gen_expr(ty, scope, 0)});
        std::vector<Sexp> items{Sexp::symbol("list")};
        std::size_t n = draw(3);
        for (std::size_t k = 0; k < n; ++k) items.push_back(gen_expr(ty.args[0], scope, fuel - 1));
        return Sexp::list(items);
      }
      case TypeDesc::Tag::Pair:
        return Sexp::list({Sexp::symbol("pair"), gen_expr(ty.args[0], scope, fuel - 1),
                           gen_expr(ty.args[1], scope, fuel - 1)});
      case TypeDesc::Tag::WriterFn: {
        // payload spines must be literal so the transformer stays applicable
        // to symbolic outputs; elements may still be variables
        switch (draw(6)) {
          case 0: return Sexp::list({Sexp::symbol("wf-id")});
          case 1: return Sexp::list({Sexp::symbol("wf-self-append")});
          case 2: return Sexp::list({Sexp::symbol("wf-const"), gen_list_literal(scope)});
          case 3: return Sexp::list({Sexp::symbol("wf-prepend"), gen_list_literal(scope)});
          case 4: return Sexp::list({Sexp::symbol("wf-append"), gen_list_literal(scope)});
          default:
            return Sexp::list({Sexp::symbol("wf-compose"), gen_expr(ty, scope, 0), gen_expr(ty, scope, 0)});
        }
      }
      default: throw Error("corpus: cannot generate type " + to_string(ty));
    }
  }

  Sexp gen_list_literal(const Scope& scope) {
    std::vector<Sexp> items{Sexp::symbol("list")};
    std::size_t n = draw(3);
    for (std::size_t k = 0; k < n; ++k) items.push_back(gen_expr(TypeDesc::wr(), scope, 0));
    return Sexp::list(items);
  }

  Sexp gen_lambda(Carrier argc, const TypeDesc& body_ty, Scope scope) {
    std::string v = fresh_var();
    scope.emplace_back(v, TypeDesc::carrier(argc));
    Sexp body = gen_expr(body_ty, scope);
    return Sexp::list({Sexp::symbol("lambda"), Sexp::list({Sexp::symbol(v)}), body});
  }

  Sexp gen_program(const TypeDesc& ty, int fuel, const Scope& scope) {
    enum class Cmd { Return, Bind, Gets, Puts, Tell, Ask, Local, Pass, If, Maybe, Either };
    std::vector<Cmd> options{Cmd::Return, Cmd::Return};
    if (fuel >= 1) {
      options.push_back(Cmd::Gets);
      if (ty.tag == TypeDesc::Tag::Unit) {
        options.insert(options.end(), {Cmd::Puts, Cmd::Tell, Cmd::Tell});
      }
      if (ty.tag == TypeDesc::Tag::Ev) options.push_back(Cmd::Ask);
    }
    if (fuel >= 2) {
      options.insert(options.end(), {Cmd::Bind, Cmd::Bind, Cmd::Bind, Cmd::Local, Cmd::Pass, Cmd::If,
                                     Cmd::Maybe, Cmd::Maybe, Cmd::Either});
    }
    switch (options[draw(options.size())]) {
      case Cmd::Return: return Sexp::list({Sexp::symbol("return"), gen_expr(ty, scope)});
      case Cmd::Gets: return Sexp::list({Sexp::symbol("gets"), gen_lambda(Carrier::St, ty, scope)});
      case Cmd::Puts:
        return Sexp::list({Sexp::symbol("puts"), gen_lambda(Carrier::St, TypeDesc::st(), scope)});
      case Cmd::Tell:
        return Sexp::list({Sexp::symbol("tell"), gen_expr(TypeDesc::list(TypeDesc::wr()), scope)});
      case Cmd::Ask: return Sexp::list({Sexp::symbol("ask")});
      case Cmd::Bind: {
        TypeDesc bty = pick_bind_type();
        Sexp m = gen_program(bty, fuel - 1, scope);
        std::string v = fresh_var();
        Scope inner = scope;
        inner.emplace_back(v, bty);
        Sexp rest = gen_program(ty, fuel - 1, inner);
        return Sexp::list({Sexp::symbol("bind"), m, Sexp::list({Sexp::symbol(v)}), rest});
      }
      case Cmd::Local:
        return Sexp::list({Sexp::symbol("local"), gen_lambda(Carrier::Ev, TypeDesc::ev(), scope),
                           gen_program(ty, fuel - 1, scope)});
      case Cmd::Pass:
        return Sexp::list({Sexp::symbol("pass"),
                           gen_program(TypeDesc::pair(ty, TypeDesc::writer_fn()), fuel - 1, scope)});
      case Cmd::If: {
        has_branch_ = true;
        return Sexp::list({Sexp::symbol("if"), gen_expr(TypeDesc::boolean(), scope),
                           gen_program(ty, fuel - 1, scope), gen_program(ty, fuel - 1, scope)});
      }
      case Cmd::Maybe: {
        has_branch_ = true;
        Sexp scrut = gen_expr(TypeDesc::maybe(TypeDesc::wr()), scope);
        std::string v = fresh_var();
        Scope inner = scope;
        inner.emplace_back(v, TypeDesc::wr());
        Sexp just_branch = Sexp::list({Sexp::symbol(v), gen_program(ty, fuel - 1, inner)});
        return Sexp::list({Sexp::symbol("maybe"), scrut, just_branch, gen_program(ty, fuel - 1, scope)});
      }
      case Cmd::Either: {
        has_branch_ = true;
        Sexp scrut = gen_expr(TypeDesc::either(TypeDesc::wr(), TypeDesc::st()), scope);
        std::string lv = fresh_var(), rv = fresh_var();
        Scope ls = scope, rs = scope;
        ls.emplace_back(lv, TypeDesc::wr());
        rs.emplace_back(rv, TypeDesc::st());
        return Sexp::list({Sexp::symbol("either"), scrut,
                           Sexp::list({Sexp::symbol(lv), gen_program(ty, fuel - 1, ls)}),
                           Sexp::list({Sexp::symbol(rv), gen_program(ty, fuel - 1, rs)})});
      }
    }
    throw Error("unreachable");
  }

  Sexp post_atom(const TypeDesc& result_type) {
    Scope none;
    switch (draw(6)) {
      case 0: return Sexp::list({Sexp::symbol("eq"), Sexp::symbol("pre-state"), Sexp::symbol("post-state")});
      case 1: return Sexp::list({Sexp::symbol("eq"), Sexp::symbol("post-state"), atom_of(Carrier::St)});
      case 2:
        return Sexp::list({Sexp::symbol("eq"), Sexp::number(draw(2)),
                           Sexp::list({Sexp::symbol("length"), Sexp::symbol("output")})});
      case 3: {
        std::vector<Sexp> items{Sexp::symbol("list")};
        std::size_t n = draw(2);
        for (std::size_t k = 0; k < n; ++k) items.push_back(atom_of(Carrier::Wr));
        return Sexp::list({Sexp::symbol("eq"), Sexp::symbol("output"), Sexp::list(items)});
      }
      case 4: return Sexp::list({Sexp::symbol("eq"), Sexp::symbol("pre-env"), atom_of(Carrier::Ev)});
      default:
        return Sexp::list({Sexp::symbol("eq"), Sexp::symbol("result"), gen_expr(result_type, none)});
    }
  }
};

}  // namespace detail

// Deterministic-per-seed stream of well-typed programs combining the RWS and
// branching commands up to the depth bound.
inline std::vector<GeneratedProgram> generate_program_corpus(std::size_t count, int depth, const Domains& dom,
                                                             std::uint64_t seed) {
  detail::CorpusGen gen(dom, seed);
  std::vector<GeneratedProgram> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(gen.next(depth));
  return out;
}

// Postconditions for a generated program, drawn from the same seeded stream.
inline std::vector<Sexp> generate_postconditions(std::size_t count, const TypeDesc& result_type,
                                                 const Domains& dom, std::uint64_t seed) {
  detail::CorpusGen gen(dom, seed);
  std::vector<Sexp> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(gen.postcondition(result_type));
  return out;
}

// Wraps a generated program form into a parameterless unit over the given
// domains.
inline SourceUnit unit_for_generated(const GeneratedProgram& g, const Domains& dom,
                                     const std::vector<Sexp>& specs = {}) {
  SourceUnit u;
  u.domains = dom;
  u.program = g.form;
  for (std::size_t i = 0; i < specs.size(); ++i)
    u.specs.emplace_back("P" + std::to_string(i), detail::normalize_spec_sexp(specs[i]));
  return u;
}

inline std::uint64_t corpus_seed_from_env(std::uint64_t fallback = 7) {
  if (const char* s = std::getenv("WPCHECK_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      throw ParseError("WPCHECK_SEED must be a number");
    }
  }
  return fallback;
}

}  // namespace wpcheck
