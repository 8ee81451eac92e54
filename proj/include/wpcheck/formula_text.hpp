#pragma once

#include "wpcheck/formula.hpp"

#include <algorithm>
#include <cctype>

namespace wpcheck {

inline FormulaPtr canonical_forall(const std::string& var, const TypeDesc& ty, const FormulaPtr& body);

namespace detail {

struct FTok {
  enum class Kind { LParen, RParen, LBracket, RBracket, LAngle, RAngle, Comma, Colon, Times, Equiv,
                    Arrow, Concat, EqEq, Top, Bottom, Ident, Number, End };
  Kind kind;
  std::string text;
  std::uint64_t num = 0;
  int line = 1, col = 1;
};

inline std::vector<FTok> formula_lex(const std::string& src) {
  std::vector<FTok> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](FTok::Kind k, std::string t = "") { out.push_back({k, std::move(t), 0, line, col}); };
  auto starts = [&](const char* s) { return src.compare(i, std::char_traits<char>::length(s), s) == 0; };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (c == ' ' || c == '\t' || c == '\r') { ++col; ++i; continue; }
    auto adv = [&](size_t n) { i += n; col += static_cast<int>(n); };
    if (starts("≡")) { push(FTok::Kind::Equiv); adv(3); continue; }       // ≡
    if (starts("→")) { push(FTok::Kind::Arrow); adv(3); continue; }       // →
    if (starts("×")) { push(FTok::Kind::Times); adv(2); continue; }       // ×
    if (starts("⊤")) { push(FTok::Kind::Top); adv(3); continue; }         // ⊤
    if (starts("⊥")) { push(FTok::Kind::Bottom); adv(3); continue; }      // ⊥
    if (starts("⟨")) { push(FTok::Kind::LAngle); adv(3); continue; }      // ⟨
    if (starts("⟩")) { push(FTok::Kind::RAngle); adv(3); continue; }      // ⟩
    if (starts("->")) { push(FTok::Kind::Arrow); adv(2); continue; }
    if (starts("++")) { push(FTok::Kind::Concat); adv(2); continue; }
    if (starts("==")) { push(FTok::Kind::EqEq); adv(2); continue; }
    switch (c) {
      case '(': push(FTok::Kind::LParen); adv(1); continue;
      case ')': push(FTok::Kind::RParen); adv(1); continue;
      case '[': push(FTok::Kind::LBracket); adv(1); continue;
      case ']': push(FTok::Kind::RBracket); adv(1); continue;
      case ',': push(FTok::Kind::Comma); adv(1); continue;
      case ':': push(FTok::Kind::Colon); adv(1); continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      FTok t{FTok::Kind::Number, src.substr(i, j - i), 0, line, col};
      t.num = std::stoull(t.text);
      out.push_back(t);
      adv(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      auto cont = [&](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'' || ch == '-';
      };
      while (j < src.size() && cont(src[j])) ++j;
      // do not swallow a trailing "->"
      while (j >= i + 2 && src[j - 1] == '-') --j;
      out.push_back({FTok::Kind::Ident, src.substr(i, j - i), 0, line, col});
      adv(j - i);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  push(FTok::Kind::End);
  return out;
}

class FormulaParser {
 public:
  FormulaParser(std::vector<FTok> toks, const Domains& dom) : toks_(std::move(toks)), dom_(dom) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    expect(FTok::Kind::End, "end of input");
    return f;
  }

  TypeDesc parse_type_only() {
    TypeDesc t = type();
    expect(FTok::Kind::End, "end of input");
    return t;
  }

 private:
  std::vector<FTok> toks_;
  const Domains& dom_;
  size_t pos_ = 0;

  const FTok& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(FTok::Kind k, size_t o = 0) const { return peek(o).kind == k; }
  bool at_ident(const char* s, size_t o = 0) const { return at(FTok::Kind::Ident, o) && peek(o).text == s; }
  const FTok& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  void expect(FTok::Kind k, const char* what) {
    if (!at(k)) throw ParseError(std::string("expected ") + what, peek().line, peek().col);
    take();
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, peek().line, peek().col); }

  FormulaPtr formula() {
    FormulaPtr first = item();
    if (!at(FTok::Kind::Times)) return first;
    std::vector<FormulaPtr> cs{first};
    while (at(FTok::Kind::Times)) {
      take();
      cs.push_back(item());
    }
    return f_and(std::move(cs));
  }

  FormulaPtr item() {
    if (at(FTok::Kind::Top)) { take(); return f_top(); }
    if (at(FTok::Kind::Bottom)) { take(); return f_bottom(); }
    // quantifier: "(" IDENT ":" ...
    if (at(FTok::Kind::LParen) && at(FTok::Kind::Ident, 1) && at(FTok::Kind::Colon, 2)) {
      take();
      std::string var = take().text;
      take();  // ':'
      TypeDesc ty = type();
      expect(FTok::Kind::RParen, ")");
      expect(FTok::Kind::Arrow, "→");
      FormulaPtr body = formula();
      return canonical_forall(var, ty, body);
    }
    // try: atom [→ formula]
    size_t save = pos_;
    try {
      Atom a = atom();
      if (at(FTok::Kind::Arrow)) {
        take();
        return f_implies(a, formula());
      }
      return f_atom(a.lhs, a.rhs);
    } catch (const ParseError&) {
      pos_ = save;
    }
    expect(FTok::Kind::LParen, "formula");
    FormulaPtr f = formula();
    expect(FTok::Kind::RParen, ")");
    return f;
  }

  Atom atom() {
    Value l = term();
    expect(FTok::Kind::Equiv, "≡");
    Value r = term();
    return {l, r};
  }

  Value term() {
    Value v = appterm();
    while (at(FTok::Kind::Concat)) {
      take();
      v = mk_append(v, appterm());
    }
    return v;
  }

  Value appterm() {
    if (at_ident("length")) { take(); return mk_length(prim()); }
    if (at_ident("fst")) { take(); return mk_fst(prim()); }
    if (at_ident("snd")) { take(); return mk_snd(prim()); }
    if (at_ident("just")) { take(); return Value::just(prim()); }
    if (at_ident("left")) { take(); return Value::left(prim()); }
    if (at_ident("right")) { take(); return Value::right(prim()); }
    Value v = prim();
    while (prim_start()) v = mk_apply_lenient(v, prim());
    return v;
  }

  // parsed application heads may be symbols; keep the neutral instead of
  // rejecting non-function heads
  static Value mk_apply_lenient(const Value& f, const Value& x) {
    if (f.is(Value::Tag::Sym) || f.is(Value::Tag::Neutral)) return Value::neutral(NeutralHead::Apply, {f, x});
    return mk_apply(f, x);
  }

  bool prim_start() const {
    return at(FTok::Kind::Ident) || at(FTok::Kind::Number) || at(FTok::Kind::LParen) ||
           at(FTok::Kind::LBracket) || at(FTok::Kind::LAngle);
  }

  Value prim() {
    if (at(FTok::Kind::Number)) return Value::nat(take().num);
    if (at(FTok::Kind::LBracket)) {
      take();
      ValueList items;
      if (!at(FTok::Kind::RBracket)) {
        items.push_back(term());
        while (at(FTok::Kind::Comma)) {
          take();
          items.push_back(term());
        }
      }
      expect(FTok::Kind::RBracket, "]");
      return Value::list(std::move(items));
    }
    if (at(FTok::Kind::LAngle)) return writer_fn_value();
    if (at(FTok::Kind::LParen)) {
      take();
      if (at_ident("if")) {
        take();
        Value c = term();
        if (!at_ident("then")) fail("expected then");
        take();
        Value t = term();
        if (!at_ident("else")) fail("expected else");
        take();
        Value e = term();
        expect(FTok::Kind::RParen, ")");
        return mk_ite(c, t, e);
      }
      Value v = term();
      if (at(FTok::Kind::Comma)) {
        take();
        Value w = term();
        expect(FTok::Kind::RParen, ")");
        return Value::pair(v, w);
      }
      if (at(FTok::Kind::EqEq)) {
        take();
        Value w = term();
        expect(FTok::Kind::RParen, ")");
        return mk_eq_test(v, w);
      }
      expect(FTok::Kind::RParen, ")");
      return v;
    }
    if (at(FTok::Kind::Ident)) {
      std::string n = take().text;
      if (n == "unit") return Value::unit();
      if (n == "true") return Value::boolean(true);
      if (n == "false") return Value::boolean(false);
      if (n == "nothing") return Value::nothing();
      if (dom_.has_atom(Carrier::St, n)) return Value::st(n);
      if (dom_.has_atom(Carrier::Ev, n)) return Value::ev(n);
      if (dom_.has_atom(Carrier::Wr, n)) return Value::wr(n);
      return Value::sym(n);
    }
    fail("expected a term");
  }

  Value writer_fn_value() {
    expect(FTok::Kind::LAngle, "⟨");
    if (!at(FTok::Kind::Ident)) fail("expected writer transformer tag");
    std::string tag = take().text;
    std::shared_ptr<const WriterFn> w;
    auto payload = [&]() {
      Value xs = prim();
      if (!xs.is(Value::Tag::List)) fail("expected a list payload");
      return xs.items();
    };
    if (tag == "wf-id") w = wf_id();
    else if (tag == "wf-self-append") w = wf_self_append();
    else if (tag == "wf-const") w = wf_const(payload());
    else if (tag == "wf-prepend") w = wf_prepend(payload());
    else if (tag == "wf-append") w = wf_append(payload());
    else if (tag == "wf-compose") {
      Value f = writer_fn_value(), g = writer_fn_value();
      w = wf_compose(f.wf(), g.wf());
    } else
      fail("unknown writer transformer " + tag);
    expect(FTok::Kind::RAngle, "⟩");
    return Value::writer_fn(w);
  }

  TypeDesc type() {
    TypeDesc t = type_prod();
    if (at(FTok::Kind::Arrow)) {
      take();
      TypeDesc u = type();
      TypeDesc fn = TypeDesc::fn(t, u);
      if (t == TypeDesc::list(TypeDesc::wr()) && u == TypeDesc::list(TypeDesc::wr()))
        return TypeDesc::writer_fn();
      return fn;
    }
    return t;
  }

  TypeDesc type_prod() {
    TypeDesc t = type_app();
    while (at(FTok::Kind::Times)) {
      take();
      t = TypeDesc::pair(t, type_app());
    }
    return t;
  }

  TypeDesc type_app() {
    if (at_ident("Maybe")) { take(); return TypeDesc::maybe(type_atom()); }
    if (at_ident("List")) { take(); return TypeDesc::list(type_atom()); }
    if (at_ident("Either")) {
      take();
      TypeDesc a = type_atom();
      TypeDesc b = type_atom();
      return TypeDesc::either(a, b);
    }
    return type_atom();
  }

  TypeDesc type_atom() {
    if (at(FTok::Kind::LParen)) {
      take();
      TypeDesc t = type();
      expect(FTok::Kind::RParen, ")");
      return t;
    }
    if (!at(FTok::Kind::Ident)) fail("expected a type");
    std::string n = take().text;
    if (n == "Unit") return TypeDesc::unit();
    if (n == "Bool") return TypeDesc::boolean();
    if (n == "Nat") return TypeDesc::nat();
    if (n == "St") return TypeDesc::st();
    if (n == "Ev") return TypeDesc::ev();
    if (n == "Wr") return TypeDesc::wr();
    fail("unknown type " + n);
  }
};

}  // namespace detail

// A plain quantifier whose body is an implication guarding the bound variable
// is the same obligation as a guarded quantifier; parsing canonicalizes to the
// guarded form so printing round-trips.
inline FormulaPtr canonical_forall(const std::string& var, const TypeDesc& ty, const FormulaPtr& body) {
  if (body->tag == Formula::Tag::Implies && classify_guard(body->atom, var))
    return f_forall_guarded(var, ty, body->atom, body->body);
  return f_forall_plain(var, ty, body);
}

inline FormulaPtr parse_formula_text(const std::string& text, const Domains& dom) {
  detail::FormulaParser p(detail::formula_lex(text), dom);
  return p.parse();
}

}  // namespace wpcheck
