#pragma once

#include "wpcheck/value.hpp"

namespace wpcheck {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Surface expression AST; payload lambdas, return payloads and scrutinees
// compile down to these.
struct Expr {
  enum class Tag {
    Var, Lit, List, Pair, Fst, Snd, Append, Length, Apply,
    Just, Nothing, Left, Right, Eq, If,
    WfId, WfConst, WfSelfAppend, WfPrepend, WfAppend, WfCompose
  };
  Tag tag = Tag::Lit;
  std::string name;  // Var
  Value lit;         // Lit
  std::vector<ExprPtr> args;
  std::optional<TypeDesc> ann;  // constructor annotation (nothing elem / full Either type)

  static ExprPtr var(std::string n) {
    auto e = std::make_shared<Expr>();
    e->tag = Tag::Var;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr literal(Value v) {
    auto e = std::make_shared<Expr>();
    e->tag = Tag::Lit;
    e->lit = std::move(v);
    return e;
  }
  static ExprPtr node(Tag t, std::vector<ExprPtr> as, std::optional<TypeDesc> ann = std::nullopt) {
    auto e = std::make_shared<Expr>();
    e->tag = t;
    e->args = std::move(as);
    e->ann = std::move(ann);
    return e;
  }
};

// Evaluates an expression under a variable binding. Concrete operands yield
// concrete values; Sym/Neutral operands propagate as Neutral applications.
inline Value eval_expr(const ExprPtr& e, const Binding& env) {
  switch (e->tag) {
    case Expr::Tag::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) throw EvalError("unbound variable " + e->name);
      return it->second;
    }
    case Expr::Tag::Lit: return e->lit;
    case Expr::Tag::List: {
      ValueList items;
      items.reserve(e->args.size());
      for (const auto& a : e->args) items.push_back(eval_expr(a, env));
      // homogeneity over the typeable elements
      std::optional<TypeDesc> elem;
      for (const auto& it : items) {
        if (!fully_concrete(it)) continue;
        TypeDesc t = type_of_term(it, {});
        if (!elem) {
          elem = t;
        } else if (*elem != t) {
          throw TypeError("heterogeneous list literal");
        }
      }
      return Value::list(std::move(items), elem);
    }
    case Expr::Tag::Pair: return Value::pair(eval_expr(e->args[0], env), eval_expr(e->args[1], env));
    case Expr::Tag::Fst: return mk_fst(eval_expr(e->args[0], env));
    case Expr::Tag::Snd: return mk_snd(eval_expr(e->args[0], env));
    case Expr::Tag::Append: return mk_append(eval_expr(e->args[0], env), eval_expr(e->args[1], env));
    case Expr::Tag::Length: return mk_length(eval_expr(e->args[0], env));
    case Expr::Tag::Apply: return mk_apply(eval_expr(e->args[0], env), eval_expr(e->args[1], env));
    case Expr::Tag::Just: return Value::just(eval_expr(e->args[0], env));
    case Expr::Tag::Nothing: return Value::nothing(e->ann);
    case Expr::Tag::Left: return Value::left(eval_expr(e->args[0], env), e->ann);
    case Expr::Tag::Right: return Value::right(eval_expr(e->args[0], env), e->ann);
    case Expr::Tag::Eq: return mk_eq_test(eval_expr(e->args[0], env), eval_expr(e->args[1], env));
    case Expr::Tag::If:
      return mk_ite(eval_expr(e->args[0], env), eval_expr(e->args[1], env), eval_expr(e->args[2], env));
    case Expr::Tag::WfId: return Value::writer_fn(wf_id());
    case Expr::Tag::WfSelfAppend: return Value::writer_fn(wf_self_append());
    case Expr::Tag::WfConst:
    case Expr::Tag::WfPrepend:
    case Expr::Tag::WfAppend: {
      Value xs = eval_expr(e->args[0], env);
      if (!xs.is(Value::Tag::List)) throw TypeError("writer transformer payload must be a list");
      if (e->tag == Expr::Tag::WfConst) return Value::writer_fn(wf_const(xs.items()));
      if (e->tag == Expr::Tag::WfPrepend) return Value::writer_fn(wf_prepend(xs.items()));
      return Value::writer_fn(wf_append(xs.items()));
    }
    case Expr::Tag::WfCompose: {
      Value f = eval_expr(e->args[0], env);
      Value g = eval_expr(e->args[1], env);
      if (!f.is(Value::Tag::WriterFn) || !g.is(Value::Tag::WriterFn))
        throw TypeError("wf-compose expects writer transformers");
      return Value::writer_fn(wf_compose(f.wf(), g.wf()));
    }
  }
  throw Error("unreachable");
}

}  // namespace wpcheck
