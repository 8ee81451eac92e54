#pragma once

#include "wpcheck/enumerate.hpp"
#include "wpcheck/value.hpp"

#include <json.hpp>

namespace wpcheck {

struct Atom {
  Value lhs, rhs;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// First-order obligation language: conjunction, implication with an equality
// hypothesis, and the guarded universal quantifiers produced by aliasing.
struct Formula {
  enum class Tag { Top, Bottom, And, Implies, ForallGuarded, ForallPlain, Atom };
  Tag tag = Tag::Top;
  std::vector<FormulaPtr> conjuncts;  // And
  Atom atom;                          // Atom payload / Implies hypothesis / guard
  FormulaPtr body;                    // Implies / quantifiers
  std::string var;                    // quantifiers
  TypeDesc var_type;
};

inline FormulaPtr f_top() {
  static const FormulaPtr t = std::make_shared<Formula>();
  return t;
}
inline FormulaPtr f_bottom() {
  auto f = std::make_shared<Formula>();
  f->tag = Formula::Tag::Bottom;
  return f;
}
inline FormulaPtr f_atom(Value lhs, Value rhs) {
  auto f = std::make_shared<Formula>();
  f->tag = Formula::Tag::Atom;
  f->atom = {std::move(lhs), std::move(rhs)};
  return f;
}
inline FormulaPtr f_and(std::vector<FormulaPtr> fs) {
  auto f = std::make_shared<Formula>();
  f->tag = Formula::Tag::And;
  f->conjuncts = std::move(fs);
  return f;
}
inline FormulaPtr f_implies(Atom hyp, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->tag = Formula::Tag::Implies;
  f->atom = std::move(hyp);
  f->body = std::move(body);
  return f;
}
inline FormulaPtr f_forall_guarded(std::string var, TypeDesc ty, Atom guard, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->tag = Formula::Tag::ForallGuarded;
  f->var = std::move(var);
  f->var_type = std::move(ty);
  f->atom = std::move(guard);
  f->body = std::move(body);
  return f;
}
inline FormulaPtr f_forall_plain(std::string var, TypeDesc ty, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->tag = Formula::Tag::ForallPlain;
  f->var = std::move(var);
  f->var_type = std::move(ty);
  f->body = std::move(body);
  return f;
}

// ---- free symbols

inline void collect_free_syms(const FormulaPtr& f, std::vector<std::string>& bound,
                              std::vector<std::string>& out) {
  auto add_from = [&](const Value& v) {
    std::vector<std::string> syms;
    collect_syms(v, syms);
    for (const auto& s : syms) {
      bool isBound = false;
      for (const auto& b : bound)
        if (b == s) { isBound = true; break; }
      if (isBound) continue;
      bool seen = false;
      for (const auto& o : out)
        if (o == s) { seen = true; break; }
      if (!seen) out.push_back(s);
    }
  };
  switch (f->tag) {
    case Formula::Tag::Top:
    case Formula::Tag::Bottom: return;
    case Formula::Tag::Atom:
      add_from(f->atom.lhs);
      add_from(f->atom.rhs);
      return;
    case Formula::Tag::And:
      for (const auto& c : f->conjuncts) collect_free_syms(c, bound, out);
      return;
    case Formula::Tag::Implies:
      add_from(f->atom.lhs);
      add_from(f->atom.rhs);
      collect_free_syms(f->body, bound, out);
      return;
    case Formula::Tag::ForallGuarded:
      bound.push_back(f->var);  // the guard mentions the bound variable
      add_from(f->atom.lhs);
      add_from(f->atom.rhs);
      collect_free_syms(f->body, bound, out);
      bound.pop_back();
      return;
    case Formula::Tag::ForallPlain:
      bound.push_back(f->var);
      collect_free_syms(f->body, bound, out);
      bound.pop_back();
      return;
  }
}

inline std::vector<std::string> free_vars(const FormulaPtr& f) {
  std::vector<std::string> bound, out;
  collect_free_syms(f, bound, out);
  // guards mention their own bound variable; it is not free
  return out;
}

inline bool term_mentions(const Value& v, const std::string& name) {
  std::vector<std::string> syms;
  collect_syms(v, syms);
  for (const auto& s : syms)
    if (s == name) return true;
  return false;
}

// ---- capture-free substitution over formulas

inline FormulaPtr subst_formula(const FormulaPtr& f, const Binding& b) {
  if (b.empty()) return f;
  switch (f->tag) {
    case Formula::Tag::Top:
    case Formula::Tag::Bottom: return f;
    case Formula::Tag::Atom: return f_atom(substitute(f->atom.lhs, b), substitute(f->atom.rhs, b));
    case Formula::Tag::And: {
      std::vector<FormulaPtr> cs;
      cs.reserve(f->conjuncts.size());
      for (const auto& c : f->conjuncts) cs.push_back(subst_formula(c, b));
      return f_and(std::move(cs));
    }
    case Formula::Tag::Implies:
      return f_implies({substitute(f->atom.lhs, b), substitute(f->atom.rhs, b)}, subst_formula(f->body, b));
    case Formula::Tag::ForallGuarded: {
      Binding inner = b;
      inner.erase(f->var);
      return f_forall_guarded(f->var, f->var_type,
                              {substitute(f->atom.lhs, inner), substitute(f->atom.rhs, inner)},
                              subst_formula(f->body, inner));
    }
    case Formula::Tag::ForallPlain: {
      Binding inner = b;
      inner.erase(f->var);
      return f_forall_plain(f->var, f->var_type, subst_formula(f->body, inner));
    }
  }
  throw Error("unreachable");
}

// ---- evaluation

struct GuardShape {
  // guard is `var ≡ term`, or `term ≡ C var` / `C var ≡ term` for a
  // constructor pattern C ∈ {just, left, right}
  enum class Kind { Alias, PatJust, PatLeft, PatRight };
  Kind kind;
  Value other;  // the non-variable side (for patterns: the scrutinee term)
};

inline std::optional<GuardShape> classify_guard(const Atom& g, const std::string& var) {
  auto classify_side = [&](const Value& vside, const Value& other) -> std::optional<GuardShape> {
    if (vside.is(Value::Tag::Sym) && vside.name() == var) return GuardShape{GuardShape::Kind::Alias, other};
    if (vside.is(Value::Tag::Just) && vside.items()[0].is(Value::Tag::Sym) && vside.items()[0].name() == var)
      return GuardShape{GuardShape::Kind::PatJust, other};
    if (vside.is(Value::Tag::Left) && vside.items()[0].is(Value::Tag::Sym) && vside.items()[0].name() == var)
      return GuardShape{GuardShape::Kind::PatLeft, other};
    if (vside.is(Value::Tag::Right) && vside.items()[0].is(Value::Tag::Sym) && vside.items()[0].name() == var)
      return GuardShape{GuardShape::Kind::PatRight, other};
    return std::nullopt;
  };
  bool inL = term_mentions(g.lhs, var), inR = term_mentions(g.rhs, var);
  if (inL == inR) return std::nullopt;
  return inL ? classify_side(g.lhs, g.rhs) : classify_side(g.rhs, g.lhs);
}

inline bool eval_formula(const FormulaPtr& f, const Binding& b, const Domains& dom, const Bounds& bounds) {
  switch (f->tag) {
    case Formula::Tag::Top: return true;
    case Formula::Tag::Bottom: return false;
    case Formula::Tag::Atom: return concretize(f->atom.lhs, b) == concretize(f->atom.rhs, b);
    case Formula::Tag::And:
      for (const auto& c : f->conjuncts)
        if (!eval_formula(c, b, dom, bounds)) return false;
      return true;
    case Formula::Tag::Implies: {
      if (concretize(f->atom.lhs, b) != concretize(f->atom.rhs, b)) return true;
      return eval_formula(f->body, b, dom, bounds);
    }
    case Formula::Tag::ForallGuarded: {
      auto shape = classify_guard(f->atom, f->var);
      if (!shape) throw EvalError("unsupported guard shape for " + f->var);
      Value t = concretize(shape->other, b);
      Binding inner = b;
      switch (shape->kind) {
        case GuardShape::Kind::Alias:
          inner[f->var] = t;
          break;
        case GuardShape::Kind::PatJust:
          if (!t.is(Value::Tag::Just)) return true;
          inner[f->var] = t.items()[0];
          break;
        case GuardShape::Kind::PatLeft:
          if (!t.is(Value::Tag::Left)) return true;
          inner[f->var] = t.items()[0];
          break;
        case GuardShape::Kind::PatRight:
          if (!t.is(Value::Tag::Right)) return true;
          inner[f->var] = t.items()[0];
          break;
      }
      return eval_formula(f->body, inner, dom, bounds);
    }
    case Formula::Tag::ForallPlain: {
      if (f->var_type.tag == TypeDesc::Tag::Fn || f->var_type.tag == TypeDesc::Tag::WriterFn)
        throw EnumError("plain quantifier over function-typed variable " + f->var);
      Binding inner = b;
      for (const auto& v : enumerate_carrier(f->var_type, dom, bounds)) {
        inner[f->var] = v;
        if (!eval_formula(f->body, inner, dom, bounds)) return false;
      }
      return true;
    }
  }
  throw Error("unreachable");
}

// ---- simplifier

// Substitutable guard heads: constructor-shaped literals whose substitution
// eliminates the quantifier. Lists stay guarded so the obligation keeps the
// `(o' : List Wr) → o' ≡ …` shape.
inline bool substitutable_literal(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Unit:
    case Value::Tag::Bool:
    case Value::Tag::Nat:
    case Value::Tag::Atom:
    case Value::Tag::Just:
    case Value::Tag::Nothing:
    case Value::Tag::Left:
    case Value::Tag::Right:
    case Value::Tag::Pair:
    case Value::Tag::WriterFn: return true;
    default: return false;
  }
}

inline FormulaPtr simplify(const FormulaPtr& f) {
  auto norm = [](const Value& v) { return substitute(v, {}); };
  switch (f->tag) {
    case Formula::Tag::Top:
    case Formula::Tag::Bottom: return f;
    case Formula::Tag::Atom: return f_atom(norm(f->atom.lhs), norm(f->atom.rhs));
    case Formula::Tag::And: {
      std::vector<FormulaPtr> out;
      for (const auto& c : f->conjuncts) {
        FormulaPtr s = simplify(c);
        if (s->tag == Formula::Tag::Top) continue;
        if (s->tag == Formula::Tag::And)
          out.insert(out.end(), s->conjuncts.begin(), s->conjuncts.end());
        else
          out.push_back(s);
      }
      if (out.empty()) return f_top();
      if (out.size() == 1) return out[0];
      return f_and(std::move(out));
    }
    case Formula::Tag::Implies: {
      FormulaPtr body = simplify(f->body);
      if (body->tag == Formula::Tag::Top) return f_top();
      return f_implies({norm(f->atom.lhs), norm(f->atom.rhs)}, body);
    }
    case Formula::Tag::ForallPlain: {
      FormulaPtr body = simplify(f->body);
      if (body->tag == Formula::Tag::Top) return f_top();
      return f_forall_plain(f->var, f->var_type, body);
    }
    case Formula::Tag::ForallGuarded: {
      Atom g{norm(f->atom.lhs), norm(f->atom.rhs)};
      auto shape = classify_guard(g, f->var);
      if (shape) {
        if (shape->kind == GuardShape::Kind::Alias && substitutable_literal(shape->other)) {
          Binding b{{f->var, shape->other}};
          return simplify(subst_formula(f->body, b));
        }
        // literal scrutinee against a constructor pattern resolves the case
        if (shape->kind == GuardShape::Kind::PatJust && shape->other.is(Value::Tag::Just)) {
          Binding b{{f->var, shape->other.items()[0]}};
          return simplify(subst_formula(f->body, b));
        }
        if (shape->kind == GuardShape::Kind::PatJust && shape->other.is(Value::Tag::Nothing)) return f_top();
        if (shape->kind == GuardShape::Kind::PatLeft && shape->other.is(Value::Tag::Left)) {
          Binding b{{f->var, shape->other.items()[0]}};
          return simplify(subst_formula(f->body, b));
        }
        if (shape->kind == GuardShape::Kind::PatLeft && shape->other.is(Value::Tag::Right)) return f_top();
        if (shape->kind == GuardShape::Kind::PatRight && shape->other.is(Value::Tag::Right)) {
          Binding b{{f->var, shape->other.items()[0]}};
          return simplify(subst_formula(f->body, b));
        }
        if (shape->kind == GuardShape::Kind::PatRight && shape->other.is(Value::Tag::Left)) return f_top();
      }
      FormulaPtr body = simplify(f->body);
      if (body->tag == Formula::Tag::Top) return f_top();
      return f_forall_guarded(f->var, f->var_type, g, body);
    }
  }
  throw Error("unreachable");
}

// ---- alpha equivalence

inline bool alpha_eq_term(const Value& a, const Value& b, const Binding& rename) {
  return substitute(a, rename) == b;
}

inline bool alpha_eq_rec(const FormulaPtr& a, const FormulaPtr& b, Binding& rename) {
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Formula::Tag::Top:
    case Formula::Tag::Bottom: return true;
    case Formula::Tag::Atom:
      return alpha_eq_term(a->atom.lhs, b->atom.lhs, rename) && alpha_eq_term(a->atom.rhs, b->atom.rhs, rename);
    case Formula::Tag::And: {
      if (a->conjuncts.size() != b->conjuncts.size()) return false;
      for (size_t i = 0; i < a->conjuncts.size(); ++i)
        if (!alpha_eq_rec(a->conjuncts[i], b->conjuncts[i], rename)) return false;
      return true;
    }
    case Formula::Tag::Implies:
      return alpha_eq_term(a->atom.lhs, b->atom.lhs, rename) &&
             alpha_eq_term(a->atom.rhs, b->atom.rhs, rename) && alpha_eq_rec(a->body, b->body, rename);
    case Formula::Tag::ForallGuarded: {
      if (a->var_type != b->var_type) return false;
      Binding inner = rename;
      inner[a->var] = Value::sym(b->var);
      if (!(substitute(a->atom.lhs, inner) == b->atom.lhs)) return false;
      if (!(substitute(a->atom.rhs, inner) == b->atom.rhs)) return false;
      return alpha_eq_rec(a->body, b->body, inner);
    }
    case Formula::Tag::ForallPlain: {
      if (a->var_type != b->var_type) return false;
      Binding inner = rename;
      inner[a->var] = Value::sym(b->var);
      return alpha_eq_rec(a->body, b->body, inner);
    }
  }
  return false;
}

inline bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b) {
  Binding rename;
  return alpha_eq_rec(a, b, rename);
}

// ---- printing (the arrow/∀/×-as-∧ obligation style)

inline std::string atom_to_string(const Atom& a) { return to_string(a.lhs) + " ≡ " + to_string(a.rhs); }

inline std::string print_inline(const FormulaPtr& f) {
  switch (f->tag) {
    case Formula::Tag::Top: return "⊤";
    case Formula::Tag::Bottom: return "⊥";
    case Formula::Tag::Atom: return atom_to_string(f->atom);
    case Formula::Tag::And: {
      std::string s;
      for (size_t i = 0; i < f->conjuncts.size(); ++i) {
        if (i) s += " × ";
        s += "(" + print_inline(f->conjuncts[i]) + ")";
      }
      return s;
    }
    case Formula::Tag::Implies: return atom_to_string(f->atom) + " → " + print_inline(f->body);
    case Formula::Tag::ForallGuarded:
      return "(" + f->var + " : " + to_string(f->var_type) + ") → " + atom_to_string(f->atom) + " → " +
             print_inline(f->body);
    case Formula::Tag::ForallPlain:
      return "(" + f->var + " : " + to_string(f->var_type) + ") → " + print_inline(f->body);
  }
  return "?";
}

inline std::string print_block(const FormulaPtr& f, std::size_t indent, std::size_t width) {
  std::string flat = print_inline(f);
  if (indent + flat.size() <= width) return flat;
  std::string pad(indent, ' ');
  switch (f->tag) {
    case Formula::Tag::And: {
      std::string s;
      for (size_t i = 0; i < f->conjuncts.size(); ++i) {
        if (i) s += "\n" + pad + "× ";
        s += "(" + print_block(f->conjuncts[i], indent + 2, width) + ")";
      }
      return s;
    }
    case Formula::Tag::Implies:
      return atom_to_string(f->atom) + " →\n" + pad + "  " + print_block(f->body, indent + 2, width);
    case Formula::Tag::ForallGuarded:
      return "(" + f->var + " : " + to_string(f->var_type) + ") → " + atom_to_string(f->atom) + " →\n" + pad +
             "  " + print_block(f->body, indent + 2, width);
    case Formula::Tag::ForallPlain:
      return "(" + f->var + " : " + to_string(f->var_type) + ") →\n" + pad + "  " +
             print_block(f->body, indent + 2, width);
    default: return flat;
  }
}

inline std::string print_formula(const FormulaPtr& f, std::size_t width = 100) {
  return print_block(f, 0, width);
}

// ---- JSON rendering (nested tagged nodes)

inline nlohmann::json value_to_json(const Value& v) {
  using nlohmann::json;
  switch (v.tag()) {
    case Value::Tag::Unit: return json{{"t", "unit"}};
    case Value::Tag::Bool: return json{{"t", "bool"}, {"v", v.as_bool()}};
    case Value::Tag::Nat: return json{{"t", "nat"}, {"v", v.as_nat()}};
    case Value::Tag::Atom:
      return json{{"t", "atom"}, {"carrier", carrier_name(v.atom_carrier())}, {"name", v.name()}};
    case Value::Tag::List: {
      json items = json::array();
      for (const auto& it : v.items()) items.push_back(value_to_json(it));
      return json{{"t", "list"}, {"items", items}};
    }
    case Value::Tag::Pair:
      return json{{"t", "pair"}, {"fst", value_to_json(v.items()[0])}, {"snd", value_to_json(v.items()[1])}};
    case Value::Tag::Just: return json{{"t", "just"}, {"v", value_to_json(v.items()[0])}};
    case Value::Tag::Nothing: return json{{"t", "nothing"}};
    case Value::Tag::Left: return json{{"t", "left"}, {"v", value_to_json(v.items()[0])}};
    case Value::Tag::Right: return json{{"t", "right"}, {"v", value_to_json(v.items()[0])}};
    case Value::Tag::WriterFn: return json{{"t", "wf"}, {"text", writer_fn_to_string(*v.wf())}};
    case Value::Tag::Table: {
      json entries = json::array();
      for (const auto& [k, val] : v.fn_table()->entries)
        entries.push_back(json::array({value_to_json(k), value_to_json(val)}));
      return json{{"t", "table"}, {"entries", entries}};
    }
    case Value::Tag::Sym: return json{{"t", "sym"}, {"name", v.name()}};
    case Value::Tag::Neutral: {
      json args = json::array();
      for (const auto& a : v.items()) args.push_back(value_to_json(a));
      return json{{"t", "neutral"}, {"head", neutral_head_name(v.head())}, {"args", args}};
    }
  }
  return nullptr;
}

inline nlohmann::json formula_to_json(const FormulaPtr& f) {
  using nlohmann::json;
  switch (f->tag) {
    case Formula::Tag::Top: return json{{"f", "top"}};
    case Formula::Tag::Bottom: return json{{"f", "bottom"}};
    case Formula::Tag::Atom:
      return json{{"f", "atom"}, {"lhs", value_to_json(f->atom.lhs)}, {"rhs", value_to_json(f->atom.rhs)}};
    case Formula::Tag::And: {
      json items = json::array();
      for (const auto& c : f->conjuncts) items.push_back(formula_to_json(c));
      return json{{"f", "and"}, {"items", items}};
    }
    case Formula::Tag::Implies:
      return json{{"f", "implies"},
                  {"hyp", json{{"lhs", value_to_json(f->atom.lhs)}, {"rhs", value_to_json(f->atom.rhs)}}},
                  {"body", formula_to_json(f->body)}};
    case Formula::Tag::ForallGuarded:
      return json{{"f", "forall-guarded"},
                  {"var", f->var},
                  {"type", to_string(f->var_type)},
                  {"guard", json{{"lhs", value_to_json(f->atom.lhs)}, {"rhs", value_to_json(f->atom.rhs)}}},
                  {"body", formula_to_json(f->body)}};
    case Formula::Tag::ForallPlain:
      return json{{"f", "forall-plain"},
                  {"var", f->var},
                  {"type", to_string(f->var_type)},
                  {"body", formula_to_json(f->body)}};
  }
  return nullptr;
}

}  // namespace wpcheck
