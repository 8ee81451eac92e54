#pragma once

#include "wpcheck/branching.hpp"
#include "wpcheck/expr.hpp"
#include "wpcheck/formula_text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace wpcheck {

// ---- s-expressions

struct Sexp {
  enum class Kind { Sym, Num, List };
  Kind kind = Kind::Sym;
  std::string sym;
  std::uint64_t num = 0;
  std::vector<Sexp> items;
  int line = 1, col = 1;

  static Sexp symbol(std::string s) {
    Sexp x;
    x.kind = Kind::Sym;
    x.sym = std::move(s);
    return x;
  }
  static Sexp number(std::uint64_t n) {
    Sexp x;
    x.kind = Kind::Num;
    x.num = n;
    return x;
  }
  static Sexp list(std::vector<Sexp> items) {
    Sexp x;
    x.kind = Kind::List;
    x.items = std::move(items);
    return x;
  }

  bool is_sym(const char* s) const { return kind == Kind::Sym && sym == s; }
  bool is_list() const { return kind == Kind::List; }
  std::size_t size() const { return items.size(); }
  const Sexp& operator[](std::size_t i) const { return items[i]; }

  friend bool operator==(const Sexp& a, const Sexp& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::Sym: return a.sym == b.sym;
      case Kind::Num: return a.num == b.num;
      case Kind::List: return a.items == b.items;
    }
    return false;
  }
};

namespace detail {

class SexpReader {
 public:
  explicit SexpReader(const std::string& src) : src_(src) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip_ws();
    while (!eof()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

 private:
  const std::string& src_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;
  int last_line_ = 1, last_col_ = 1;

  bool eof() const { return i_ >= src_.size(); }
  char peek() const { return src_[i_]; }
  char take() {
    char c = src_[i_++];
    last_line_ = line_;
    last_col_ = col_;
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') take();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        take();
      } else {
        return;
      }
    }
  }

  Sexp read() {
    skip_ws();
    if (eof()) throw ParseError("unexpected end of input", line_, col_);
    int ln = line_, cl = col_;
    char c = peek();
    if (c == '(') {
      take();
      Sexp s = Sexp::list({});
      s.line = ln;
      s.col = cl;
      for (;;) {
        skip_ws();
        if (eof()) throw ParseError("unbalanced parenthesis", last_line_, last_col_);
        if (peek() == ')') {
          take();
          return s;
        }
        s.items.push_back(read());
      }
    }
    if (c == ')') throw ParseError("unexpected ')'", ln, cl);
    std::string tok;
    auto is_delim = [](char ch) {
      return ch == '(' || ch == ')' || ch == ';' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r';
    };
    while (!eof() && !is_delim(peek())) tok.push_back(take());
    bool digits = !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char ch) {
      return std::isdigit(static_cast<unsigned char>(ch));
    });
    Sexp s = digits ? Sexp::number(std::stoull(tok)) : Sexp::symbol(tok);
    s.line = ln;
    s.col = cl;
    return s;
  }
};

inline std::string flat_print(const Sexp& s) {
  switch (s.kind) {
    case Sexp::Kind::Sym: return s.sym;
    case Sexp::Kind::Num: return std::to_string(s.num);
    case Sexp::Kind::List: {
      std::string out = "(";
      for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (i) out += " ";
        out += flat_print(s.items[i]);
      }
      return out + ")";
    }
  }
  return "";
}

inline std::string pretty_print(const Sexp& s, std::size_t indent, std::size_t width = 90) {
  std::string flat = flat_print(s);
  if (indent + flat.size() <= width || s.kind != Sexp::Kind::List || s.items.size() < 2) return flat;
  std::string pad(indent + 2, ' ');
  std::string out = "(" + pretty_print(s.items[0], indent + 1, width);
  for (std::size_t i = 1; i < s.items.size(); ++i)
    out += "\n" + pad + pretty_print(s.items[i], indent + 2, width);
  return out + ")";
}

}  // namespace detail

inline std::vector<Sexp> read_sexps(const std::string& src) { return detail::SexpReader(src).read_all(); }

// ---- source units

struct SourceUnit {
  Domains domains;
  std::vector<std::pair<std::string, TypeDesc>> params;
  Sexp program = Sexp::list({});
  std::vector<std::pair<std::string, Sexp>> specs;

  const TypeDesc* param_type(const std::string& name) const {
    for (const auto& [n, t] : params)
      if (n == name) return &t;
    return nullptr;
  }
  const Sexp* spec(const std::string& name) const {
    for (const auto& [n, f] : specs)
      if (n == name) return &f;
    return nullptr;
  }
  SymTypes param_sym_types() const {
    SymTypes st;
    for (const auto& [n, t] : params) st[n] = t;
    return st;
  }
  Binding symbolic_params() const {
    Binding b;
    for (const auto& [n, t] : params) b[n] = Value::sym(n);
    return b;
  }

  friend bool operator==(const SourceUnit& a, const SourceUnit& b) {
    return a.domains.st == b.domains.st && a.domains.ev == b.domains.ev && a.domains.wr == b.domains.wr &&
           a.params == b.params && a.program == b.program && a.specs == b.specs;
  }
};

namespace detail {

inline const std::set<std::string>& surface_keywords() {
  static const std::set<std::string> kw{
      "return", "bind", "gets", "puts", "tell", "ask", "local", "pass", "if", "maybe", "either", "lambda",
      "list", "pair", "fst", "snd", "append", "length", "apply", "just", "nothing", "left", "right", "eq",
      "wf-id", "wf-const", "wf-self-append", "wf-prepend", "wf-append", "wf-compose",
      "unit", "true", "false", "and", "implies", "forall", "top", "bottom",
      "domain", "param", "program", "spec",
      "Unit", "Bool", "Nat", "St", "Ev", "Wr", "Maybe", "Either", "List", "Pair", "Fn", "Wf"};
  return kw;
}

inline const std::set<std::string>& distinguished_vars() {
  static const std::set<std::string> d{"pre-env", "pre-state", "result", "post-state", "output"};
  return d;
}

inline bool reserved_formula_var(const std::string& n) {
  if (n == "s" || n == "e" || distinguished_vars().count(n)) return true;
  // shapes claimed by the fresh-name source
  auto all_digits = [](const std::string& t) {
    return std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if ((n[0] == 'r' || n[0] == 'j' || n[0] == 'l') && (n.size() == 1 || all_digits(n.substr(1)))) return true;
  if (n[0] == 'o' && n.size() > 1 && n.find_first_not_of('\'', 1) == std::string::npos) return true;
  return false;
}

[[noreturn]] inline void form_error(const Sexp& s, const std::string& msg) {
  throw ParseError(msg, s.line, s.col);
}

inline TypeDesc type_from_sexp(const Sexp& s) {
  if (s.kind == Sexp::Kind::Sym) {
    if (s.sym == "Unit") return TypeDesc::unit();
    if (s.sym == "Bool") return TypeDesc::boolean();
    if (s.sym == "Nat") return TypeDesc::nat();
    if (s.sym == "St") return TypeDesc::st();
    if (s.sym == "Ev") return TypeDesc::ev();
    if (s.sym == "Wr") return TypeDesc::wr();
    if (s.sym == "Wf") return TypeDesc::writer_fn();
    form_error(s, "unknown type " + s.sym);
  }
  if (!s.is_list() || s.size() < 2 || s[0].kind != Sexp::Kind::Sym) form_error(s, "malformed type");
  const std::string& head = s[0].sym;
  if (head == "Maybe" && s.size() == 2) return TypeDesc::maybe(type_from_sexp(s[1]));
  if (head == "List" && s.size() == 2) return TypeDesc::list(type_from_sexp(s[1]));
  if (head == "Either" && s.size() == 3) return TypeDesc::either(type_from_sexp(s[1]), type_from_sexp(s[2]));
  if (head == "Pair" && s.size() == 3) return TypeDesc::pair(type_from_sexp(s[1]), type_from_sexp(s[2]));
  if (head == "Fn" && s.size() == 3) return TypeDesc::fn(type_from_sexp(s[1]), type_from_sexp(s[2]));
  form_error(s, "unknown type form " + head);
}

inline Sexp type_to_sexp(const TypeDesc& t) {
  switch (t.tag) {
    case TypeDesc::Tag::Unit: return Sexp::symbol("Unit");
    case TypeDesc::Tag::Bool: return Sexp::symbol("Bool");
    case TypeDesc::Tag::Nat: return Sexp::symbol("Nat");
    case TypeDesc::Tag::St: return Sexp::symbol("St");
    case TypeDesc::Tag::Ev: return Sexp::symbol("Ev");
    case TypeDesc::Tag::Wr: return Sexp::symbol("Wr");
    case TypeDesc::Tag::WriterFn: return Sexp::symbol("Wf");
    case TypeDesc::Tag::List: return Sexp::list({Sexp::symbol("List"), type_to_sexp(t.args[0])});
    case TypeDesc::Tag::Maybe: return Sexp::list({Sexp::symbol("Maybe"), type_to_sexp(t.args[0])});
    case TypeDesc::Tag::Either:
      return Sexp::list({Sexp::symbol("Either"), type_to_sexp(t.args[0]), type_to_sexp(t.args[1])});
    case TypeDesc::Tag::Pair:
      return Sexp::list({Sexp::symbol("Pair"), type_to_sexp(t.args[0]), type_to_sexp(t.args[1])});
    case TypeDesc::Tag::Fn:
      return Sexp::list({Sexp::symbol("Fn"), type_to_sexp(t.args[0]), type_to_sexp(t.args[1])});
  }
  return Sexp::symbol("?");
}

}  // namespace detail

// ---- expression compilation

struct CompileScope {
  const SourceUnit* unit = nullptr;
  std::set<std::string> vars;  // binder and parameter names in scope

  bool known(const std::string& n) const { return vars.count(n) > 0; }
};

inline ExprPtr compile_expr(const Sexp& s, const CompileScope& sc);

namespace detail {

inline std::optional<Value> atom_literal(const std::string& n, const Domains& d) {
  if (d.has_atom(Carrier::St, n)) return Value::st(n);
  if (d.has_atom(Carrier::Ev, n)) return Value::ev(n);
  if (d.has_atom(Carrier::Wr, n)) return Value::wr(n);
  return std::nullopt;
}

}  // namespace detail

inline ExprPtr compile_expr(const Sexp& s, const CompileScope& sc) {
  using detail::form_error;
  if (s.kind == Sexp::Kind::Num) return Expr::literal(Value::nat(s.num));
  if (s.kind == Sexp::Kind::Sym) {
    const std::string& n = s.sym;
    if (n == "unit") return Expr::literal(Value::unit());
    if (n == "true") return Expr::literal(Value::boolean(true));
    if (n == "false") return Expr::literal(Value::boolean(false));
    if (n == "nothing") return Expr::node(Expr::Tag::Nothing, {});
    if (sc.known(n)) return Expr::var(n);
    if (auto a = detail::atom_literal(n, sc.unit->domains)) return Expr::literal(*a);
    form_error(s, "undeclared name " + n);
  }
  if (!s.is_list() || s.size() == 0 || s[0].kind != Sexp::Kind::Sym) form_error(s, "malformed expression");
  const std::string& head = s[0].sym;
  auto arity = [&](std::size_t n) {
    if (s.size() != n + 1) form_error(s, head + " expects " + std::to_string(n) + " arguments");
  };
  auto sub = [&](std::size_t i) { return compile_expr(s[i], sc); };
  if (head == "list") {
    std::vector<ExprPtr> items;
    for (std::size_t i = 1; i < s.size(); ++i) items.push_back(sub(i));
    return Expr::node(Expr::Tag::List, std::move(items));
  }
  if (head == "pair") { arity(2); return Expr::node(Expr::Tag::Pair, {sub(1), sub(2)}); }
  if (head == "fst") { arity(1); return Expr::node(Expr::Tag::Fst, {sub(1)}); }
  if (head == "snd") { arity(1); return Expr::node(Expr::Tag::Snd, {sub(1)}); }
  if (head == "append") { arity(2); return Expr::node(Expr::Tag::Append, {sub(1), sub(2)}); }
  if (head == "length") { arity(1); return Expr::node(Expr::Tag::Length, {sub(1)}); }
  if (head == "apply") { arity(2); return Expr::node(Expr::Tag::Apply, {sub(1), sub(2)}); }
  if (head == "just") { arity(1); return Expr::node(Expr::Tag::Just, {sub(1)}); }
  if (head == "nothing") {
    if (s.size() == 2) return Expr::node(Expr::Tag::Nothing, {}, detail::type_from_sexp(s[1]));
    arity(0);
    return Expr::node(Expr::Tag::Nothing, {});
  }
  if (head == "left" || head == "right") {
    bool isLeft = head == "left";
    std::optional<TypeDesc> ann;
    if (s.size() == 3) {
      ann = detail::type_from_sexp(s[2]);
      if (ann->tag != TypeDesc::Tag::Either) form_error(s[2], "annotation must be an Either type");
    } else {
      arity(1);
    }
    return Expr::node(isLeft ? Expr::Tag::Left : Expr::Tag::Right, {sub(1)}, std::move(ann));
  }
  if (head == "eq") { arity(2); return Expr::node(Expr::Tag::Eq, {sub(1), sub(2)}); }
  if (head == "if") { arity(3); return Expr::node(Expr::Tag::If, {sub(1), sub(2), sub(3)}); }
  if (head == "wf-id") { arity(0); return Expr::node(Expr::Tag::WfId, {}); }
  if (head == "wf-self-append") { arity(0); return Expr::node(Expr::Tag::WfSelfAppend, {}); }
  if (head == "wf-const") { arity(1); return Expr::node(Expr::Tag::WfConst, {sub(1)}); }
  if (head == "wf-prepend") { arity(1); return Expr::node(Expr::Tag::WfPrepend, {sub(1)}); }
  if (head == "wf-append") { arity(1); return Expr::node(Expr::Tag::WfAppend, {sub(1)}); }
  if (head == "wf-compose") { arity(2); return Expr::node(Expr::Tag::WfCompose, {sub(1), sub(2)}); }
  form_error(s, "unknown expression form " + head);
}

}  // namespace wpcheck

#include "wpcheck/frontend_compile.hpp"
