#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wpcheck {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TypeError : Error {
  using Error::Error;
};
struct EvalError : Error {
  using Error::Error;
};
struct EnumError : Error {
  using Error::Error;
};
struct ParseError : Error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int l, int c)
      : Error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)), line(l), col(c) {}
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

enum class Carrier { St, Ev, Wr };

inline const char* carrier_name(Carrier c) {
  switch (c) {
    case Carrier::St: return "St";
    case Carrier::Ev: return "Ev";
    case Carrier::Wr: return "Wr";
  }
  return "?";
}

// Closed universe of type descriptors for carriers, finite data and function tables.
struct TypeDesc {
  enum class Tag { Unit, Bool, Nat, St, Ev, Wr, List, Maybe, Pair, Either, Fn, WriterFn };
  Tag tag = Tag::Unit;
  std::vector<TypeDesc> args;  // List/Maybe: 1, Pair/Either/Fn: 2

  TypeDesc() = default;
  explicit TypeDesc(Tag t) : tag(t) {}
  TypeDesc(Tag t, std::vector<TypeDesc> a) : tag(t), args(std::move(a)) {}

  static TypeDesc unit() { return TypeDesc(Tag::Unit); }
  static TypeDesc boolean() { return TypeDesc(Tag::Bool); }
  static TypeDesc nat() { return TypeDesc(Tag::Nat); }
  static TypeDesc carrier(Carrier c) {
    switch (c) {
      case Carrier::St: return TypeDesc(Tag::St);
      case Carrier::Ev: return TypeDesc(Tag::Ev);
      default: return TypeDesc(Tag::Wr);
    }
  }
  static TypeDesc st() { return TypeDesc(Tag::St); }
  static TypeDesc ev() { return TypeDesc(Tag::Ev); }
  static TypeDesc wr() { return TypeDesc(Tag::Wr); }
  static TypeDesc list(TypeDesc el) { return TypeDesc(Tag::List, {std::move(el)}); }
  static TypeDesc maybe(TypeDesc el) { return TypeDesc(Tag::Maybe, {std::move(el)}); }
  static TypeDesc pair(TypeDesc a, TypeDesc b) { return TypeDesc(Tag::Pair, {std::move(a), std::move(b)}); }
  static TypeDesc either(TypeDesc a, TypeDesc b) { return TypeDesc(Tag::Either, {std::move(a), std::move(b)}); }
  static TypeDesc fn(TypeDesc dom, TypeDesc cod) { return TypeDesc(Tag::Fn, {std::move(dom), std::move(cod)}); }
  static TypeDesc writer_fn() { return TypeDesc(Tag::WriterFn); }

  bool is_carrier() const { return tag == Tag::St || tag == Tag::Ev || tag == Tag::Wr; }

  friend bool operator==(const TypeDesc& a, const TypeDesc& b) {
    return a.tag == b.tag && a.args == b.args;
  }
  friend bool operator!=(const TypeDesc& a, const TypeDesc& b) { return !(a == b); }
};

// Renders in the obligation style: "Maybe Wr", "List Wr", "St × Bool", "(St → Maybe Wr)".
inline std::string to_string(const TypeDesc& t) {
  auto atomic = [](const TypeDesc& u) {
    return u.args.empty();
  };
  auto wrap = [&](const TypeDesc& u) {
    std::string s = to_string(u);
    return atomic(u) ? s : "(" + s + ")";
  };
  switch (t.tag) {
    case TypeDesc::Tag::Unit: return "Unit";
    case TypeDesc::Tag::Bool: return "Bool";
    case TypeDesc::Tag::Nat: return "Nat";
    case TypeDesc::Tag::St: return "St";
    case TypeDesc::Tag::Ev: return "Ev";
    case TypeDesc::Tag::Wr: return "Wr";
    case TypeDesc::Tag::List: return "List " + wrap(t.args[0]);
    case TypeDesc::Tag::Maybe: return "Maybe " + wrap(t.args[0]);
    case TypeDesc::Tag::Pair: return wrap(t.args[0]) + " × " + wrap(t.args[1]);
    case TypeDesc::Tag::Either: return "Either " + wrap(t.args[0]) + " " + wrap(t.args[1]);
    case TypeDesc::Tag::Fn: return "(" + to_string(t.args[0]) + " → " + to_string(t.args[1]) + ")";
    case TypeDesc::Tag::WriterFn: return "(List Wr → List Wr)";
  }
  return "?";
}

// Finite carrier declaration: name plus ordered distinct atoms.
struct CarrierDecl {
  Carrier carrier;
  std::vector<std::string> atoms;
};

struct Domains {
  std::vector<std::string> st, ev, wr;

  const std::vector<std::string>& atoms(Carrier c) const {
    switch (c) {
      case Carrier::St: return st;
      case Carrier::Ev: return ev;
      default: return wr;
    }
  }

  void validate() const {
    for (Carrier c : {Carrier::St, Carrier::Ev, Carrier::Wr}) {
      const auto& as = atoms(c);
      if (as.empty()) throw EnumError(std::string("carrier ") + carrier_name(c) + " is empty");
      for (size_t i = 0; i < as.size(); ++i)
        for (size_t j = i + 1; j < as.size(); ++j)
          if (as[i] == as[j]) throw EnumError("duplicate atom " + as[i]);
    }
  }

  bool has_atom(Carrier c, const std::string& name) const {
    for (const auto& a : atoms(c))
      if (a == name) return true;
    return false;
  }
};

class Value;
using ValueList = std::vector<Value>;

// Writer transformer grammar; closed so that values of type List Wr → List Wr
// stay printable and enumerable.
struct WriterFn {
  enum class Tag { Id, ConstList, SelfAppend, Prepend, Append, Compose };
  Tag tag = Tag::Id;
  ValueList items;                                // ConstList / Prepend / Append payload
  std::shared_ptr<const WriterFn> first, second;  // Compose
};

struct FnTableRep {
  TypeDesc dom, cod;
  std::vector<std::pair<Value, Value>> entries;  // total, in domain enumeration order
};

enum class NeutralHead { Apply, Append, Length, Fst, Snd, EqTest, IfThenElse };

inline const char* neutral_head_name(NeutralHead h) {
  switch (h) {
    case NeutralHead::Apply: return "apply";
    case NeutralHead::Append: return "append";
    case NeutralHead::Length: return "length";
    case NeutralHead::Fst: return "fst";
    case NeutralHead::Snd: return "snd";
    case NeutralHead::EqTest: return "eq";
    case NeutralHead::IfThenElse: return "if";
  }
  return "?";
}

struct ValueRep;
using ValueRepPtr = std::shared_ptr<const ValueRep>;

// Immutable runtime value. Sym and Neutral occur only during symbolic WP
// generation; concrete execution rejects them.
class Value {
 public:
  enum class Tag { Unit, Bool, Nat, Atom, List, Pair, Just, Nothing, Left, Right, WriterFn, Table, Sym, Neutral };

  Value();  // unit

  static Value unit();
  static Value boolean(bool b);
  static Value nat(std::uint64_t n);
  static Value atom(Carrier c, std::string name);
  static Value st(std::string name) { return atom(Carrier::St, std::move(name)); }
  static Value ev(std::string name) { return atom(Carrier::Ev, std::move(name)); }
  static Value wr(std::string name) { return atom(Carrier::Wr, std::move(name)); }
  static Value list(ValueList items, std::optional<TypeDesc> elem = std::nullopt);
  static Value pair(Value a, Value b);
  static Value just(Value v);
  static Value nothing(std::optional<TypeDesc> elem = std::nullopt);
  static Value left(Value v, std::optional<TypeDesc> either_type = std::nullopt);
  static Value right(Value v, std::optional<TypeDesc> either_type = std::nullopt);
  static Value writer_fn(std::shared_ptr<const WriterFn> wf);
  static Value table(std::shared_ptr<const FnTableRep> t);
  static Value sym(std::string name);
  static Value neutral(NeutralHead head, ValueList args);

  Tag tag() const;
  bool as_bool() const;
  std::uint64_t as_nat() const;
  Carrier atom_carrier() const;
  const std::string& name() const;  // atom or sym name
  const ValueList& items() const;   // list elements, constructor payloads, neutral args
  NeutralHead head() const;
  const std::shared_ptr<const WriterFn>& wf() const;
  const std::shared_ptr<const FnTableRep>& fn_table() const;
  const std::optional<TypeDesc>& annotation() const;

  bool is(Tag t) const { return tag() == t; }
  bool is_symbolic_node() const { return is(Tag::Sym) || is(Tag::Neutral); }

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  explicit Value(ValueRepPtr rep) : rep_(std::move(rep)) {}
  ValueRepPtr rep_;
};

struct ValueRep {
  Value::Tag tag = Value::Tag::Unit;
  bool b = false;
  std::uint64_t nat = 0;
  Carrier carrier = Carrier::St;
  std::string name;
  ValueList items;
  NeutralHead head = NeutralHead::Apply;
  std::shared_ptr<const WriterFn> wf;
  std::shared_ptr<const FnTableRep> table;
  std::optional<TypeDesc> ann;
};

inline Value::Value() {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Unit;
  rep_ = std::move(r);
}

inline Value Value::unit() { return Value(); }

inline Value Value::boolean(bool b) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Bool;
  r->b = b;
  return Value(std::move(r));
}

inline Value Value::nat(std::uint64_t n) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Nat;
  r->nat = n;
  return Value(std::move(r));
}

inline Value Value::atom(Carrier c, std::string name) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Atom;
  r->carrier = c;
  r->name = std::move(name);
  return Value(std::move(r));
}

inline Value Value::list(ValueList items, std::optional<TypeDesc> elem) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::List;
  r->items = std::move(items);
  r->ann = std::move(elem);
  return Value(std::move(r));
}

inline Value Value::pair(Value a, Value b) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Pair;
  r->items = {std::move(a), std::move(b)};
  return Value(std::move(r));
}

inline Value Value::just(Value v) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Just;
  r->items = {std::move(v)};
  return Value(std::move(r));
}

inline Value Value::nothing(std::optional<TypeDesc> elem) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Nothing;
  r->ann = std::move(elem);
  return Value(std::move(r));
}

inline Value Value::left(Value v, std::optional<TypeDesc> either_type) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Left;
  r->items = {std::move(v)};
  r->ann = std::move(either_type);
  return Value(std::move(r));
}

inline Value Value::right(Value v, std::optional<TypeDesc> either_type) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Right;
  r->items = {std::move(v)};
  r->ann = std::move(either_type);
  return Value(std::move(r));
}

inline Value Value::writer_fn(std::shared_ptr<const WriterFn> wf) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::WriterFn;
  r->wf = std::move(wf);
  return Value(std::move(r));
}

inline Value Value::table(std::shared_ptr<const FnTableRep> t) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Table;
  r->table = std::move(t);
  return Value(std::move(r));
}

inline Value Value::sym(std::string name) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Sym;
  r->name = std::move(name);
  return Value(std::move(r));
}

inline Value Value::neutral(NeutralHead head, ValueList args) {
  auto r = std::make_shared<ValueRep>();
  r->tag = Tag::Neutral;
  r->head = head;
  r->items = std::move(args);
  return Value(std::move(r));
}

inline Value::Tag Value::tag() const { return rep_->tag; }
inline bool Value::as_bool() const {
  if (tag() != Tag::Bool) throw TypeError("expected Bool value");
  return rep_->b;
}
inline std::uint64_t Value::as_nat() const {
  if (tag() != Tag::Nat) throw TypeError("expected Nat value");
  return rep_->nat;
}
inline Carrier Value::atom_carrier() const { return rep_->carrier; }
inline const std::string& Value::name() const { return rep_->name; }
inline const ValueList& Value::items() const { return rep_->items; }
inline NeutralHead Value::head() const { return rep_->head; }
inline const std::shared_ptr<const WriterFn>& Value::wf() const { return rep_->wf; }
inline const std::shared_ptr<const FnTableRep>& Value::fn_table() const { return rep_->table; }
inline const std::optional<TypeDesc>& Value::annotation() const { return rep_->ann; }

inline bool writer_fn_equal(const WriterFn& a, const WriterFn& b);

inline bool operator==(const Value& a, const Value& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.tag() != b.tag()) return false;
  switch (a.tag()) {
    case Value::Tag::Unit: return true;
    case Value::Tag::Bool: return a.rep_->b == b.rep_->b;
    case Value::Tag::Nat: return a.rep_->nat == b.rep_->nat;
    case Value::Tag::Atom: return a.rep_->carrier == b.rep_->carrier && a.rep_->name == b.rep_->name;
    case Value::Tag::Nothing: return true;  // annotations are metadata, not identity
    case Value::Tag::List:
    case Value::Tag::Pair:
    case Value::Tag::Just:
    case Value::Tag::Left:
    case Value::Tag::Right: return a.rep_->items == b.rep_->items;
    case Value::Tag::WriterFn: return writer_fn_equal(*a.rep_->wf, *b.rep_->wf);
    case Value::Tag::Table: {
      const auto& ta = *a.rep_->table;
      const auto& tb = *b.rep_->table;
      return ta.dom == tb.dom && ta.cod == tb.cod && ta.entries == tb.entries;
    }
    case Value::Tag::Sym: return a.rep_->name == b.rep_->name;
    case Value::Tag::Neutral: return a.rep_->head == b.rep_->head && a.rep_->items == b.rep_->items;
  }
  return false;
}

inline bool writer_fn_equal(const WriterFn& a, const WriterFn& b) {
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case WriterFn::Tag::Id:
    case WriterFn::Tag::SelfAppend: return true;
    case WriterFn::Tag::ConstList:
    case WriterFn::Tag::Prepend:
    case WriterFn::Tag::Append: return a.items == b.items;
    case WriterFn::Tag::Compose: return writer_fn_equal(*a.first, *b.first) && writer_fn_equal(*a.second, *b.second);
  }
  return false;
}

// ---- writer transformer helpers

inline std::shared_ptr<const WriterFn> wf_id() {
  auto w = std::make_shared<WriterFn>();
  w->tag = WriterFn::Tag::Id;
  return w;
}
inline std::shared_ptr<const WriterFn> wf_const(ValueList items) {
  auto w = std::make_shared<WriterFn>();
  w->tag = WriterFn::Tag::ConstList;
  w->items = std::move(items);
  return w;
}
inline std::shared_ptr<const WriterFn> wf_self_append() {
  auto w = std::make_shared<WriterFn>();
  w->tag = WriterFn::Tag::SelfAppend;
  return w;
}
inline std::shared_ptr<const WriterFn> wf_prepend(ValueList items) {
  auto w = std::make_shared<WriterFn>();
  w->tag = WriterFn::Tag::Prepend;
  w->items = std::move(items);
  return w;
}
inline std::shared_ptr<const WriterFn> wf_append(ValueList items) {
  auto w = std::make_shared<WriterFn>();
  w->tag = WriterFn::Tag::Append;
  w->items = std::move(items);
  return w;
}
inline std::shared_ptr<const WriterFn> wf_compose(std::shared_ptr<const WriterFn> f,
                                                  std::shared_ptr<const WriterFn> g) {
  auto w = std::make_shared<WriterFn>();
  w->tag = WriterFn::Tag::Compose;
  w->first = std::move(f);
  w->second = std::move(g);
  return w;
}

// Denotation of the writer transformer grammar on message lists.
inline ValueList apply_writer_fn(const WriterFn& wf, const ValueList& xs) {
  switch (wf.tag) {
    case WriterFn::Tag::Id: return xs;
    case WriterFn::Tag::ConstList: return wf.items;
    case WriterFn::Tag::SelfAppend: {
      ValueList r = xs;
      r.insert(r.end(), xs.begin(), xs.end());
      return r;
    }
    case WriterFn::Tag::Prepend: {
      ValueList r = wf.items;
      r.insert(r.end(), xs.begin(), xs.end());
      return r;
    }
    case WriterFn::Tag::Append: {
      ValueList r = xs;
      r.insert(r.end(), wf.items.begin(), wf.items.end());
      return r;
    }
    case WriterFn::Tag::Compose: return apply_writer_fn(*wf.first, apply_writer_fn(*wf.second, xs));
  }
  return xs;
}

// ---- concreteness and term construction with reduction

inline bool fully_concrete(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Sym:
    case Value::Tag::Neutral: return false;
    case Value::Tag::WriterFn: {
      // payload lists inside the grammar may carry symbols
      std::function<bool(const WriterFn&)> ok = [&](const WriterFn& w) -> bool {
        for (const auto& it : w.items)
          if (!fully_concrete(it)) return false;
        if (w.tag == WriterFn::Tag::Compose) return ok(*w.first) && ok(*w.second);
        return true;
      };
      return ok(*v.wf());
    }
    default:
      for (const auto& it : v.items())
        if (!fully_concrete(it)) return false;
      return true;
  }
}

inline Value table_lookup(const FnTableRep& t, const Value& key) {
  for (const auto& [k, v] : t.entries)
    if (k == key) return v;
  throw TypeError("value outside function table domain");
}

// Smart constructors: reduce when the arguments are concrete enough,
// otherwise form a Neutral recording the application head.
inline Value mk_apply(const Value& f, const Value& x) {
  if (f.is(Value::Tag::Table) && fully_concrete(x)) return table_lookup(*f.fn_table(), x);
  if (f.is(Value::Tag::WriterFn) && x.is(Value::Tag::List))
    return Value::list(apply_writer_fn(*f.wf(), x.items()));
  if (!f.is(Value::Tag::Table) && !f.is(Value::Tag::WriterFn) && !f.is_symbolic_node())
    throw TypeError("apply: not a function value");
  return Value::neutral(NeutralHead::Apply, {f, x});
}

inline Value mk_append(const Value& a, const Value& b) {
  if (a.is(Value::Tag::List) && a.items().empty()) return b;
  if (b.is(Value::Tag::List) && b.items().empty()) return a;
  if (a.is(Value::Tag::List) && b.is(Value::Tag::List)) {
    ValueList r = a.items();
    r.insert(r.end(), b.items().begin(), b.items().end());
    return Value::list(std::move(r), a.annotation());
  }
  if ((!a.is(Value::Tag::List) && !a.is_symbolic_node()) || (!b.is(Value::Tag::List) && !b.is_symbolic_node()))
    throw TypeError("append: not a list");
  return Value::neutral(NeutralHead::Append, {a, b});
}

inline Value mk_length(const Value& v) {
  if (v.is(Value::Tag::List)) return Value::nat(v.items().size());
  if (!v.is_symbolic_node()) throw TypeError("length: not a list");
  return Value::neutral(NeutralHead::Length, {v});
}

inline Value mk_fst(const Value& v) {
  if (v.is(Value::Tag::Pair)) return v.items()[0];
  if (!v.is_symbolic_node()) throw TypeError("fst: not a pair");
  return Value::neutral(NeutralHead::Fst, {v});
}

inline Value mk_snd(const Value& v) {
  if (v.is(Value::Tag::Pair)) return v.items()[1];
  if (!v.is_symbolic_node()) throw TypeError("snd: not a pair");
  return Value::neutral(NeutralHead::Snd, {v});
}

inline Value mk_eq_test(const Value& a, const Value& b) {
  if (fully_concrete(a) && fully_concrete(b)) return Value::boolean(a == b);
  return Value::neutral(NeutralHead::EqTest, {a, b});
}

inline Value mk_ite(const Value& c, const Value& t, const Value& e) {
  if (c.is(Value::Tag::Bool)) return c.as_bool() ? t : e;
  if (!c.is_symbolic_node()) throw TypeError("if: condition is not Bool");
  return Value::neutral(NeutralHead::IfThenElse, {c, t, e});
}

inline Value reduce_neutral(NeutralHead h, const ValueList& args) {
  switch (h) {
    case NeutralHead::Apply: return mk_apply(args[0], args[1]);
    case NeutralHead::Append: return mk_append(args[0], args[1]);
    case NeutralHead::Length: return mk_length(args[0]);
    case NeutralHead::Fst: return mk_fst(args[0]);
    case NeutralHead::Snd: return mk_snd(args[0]);
    case NeutralHead::EqTest: return mk_eq_test(args[0], args[1]);
    case NeutralHead::IfThenElse: return mk_ite(args[0], args[1], args[2]);
  }
  throw Error("unreachable");
}

using Binding = std::map<std::string, Value>;

// Substitutes symbols and re-reduces stuck applications; symbols absent from
// the binding are left in place.
inline Value substitute(const Value& v, const Binding& b) {
  switch (v.tag()) {
    case Value::Tag::Sym: {
      auto it = b.find(v.name());
      return it == b.end() ? v : it->second;
    }
    case Value::Tag::Neutral: {
      ValueList args;
      args.reserve(v.items().size());
      for (const auto& a : v.items()) args.push_back(substitute(a, b));
      return reduce_neutral(v.head(), args);
    }
    case Value::Tag::List: {
      ValueList items;
      items.reserve(v.items().size());
      for (const auto& a : v.items()) items.push_back(substitute(a, b));
      return Value::list(std::move(items), v.annotation());
    }
    case Value::Tag::Pair: return Value::pair(substitute(v.items()[0], b), substitute(v.items()[1], b));
    case Value::Tag::Just: return Value::just(substitute(v.items()[0], b));
    case Value::Tag::Left: return Value::left(substitute(v.items()[0], b), v.annotation());
    case Value::Tag::Right: return Value::right(substitute(v.items()[0], b), v.annotation());
    case Value::Tag::WriterFn: {
      std::function<std::shared_ptr<const WriterFn>(const WriterFn&)> go =
          [&](const WriterFn& w) -> std::shared_ptr<const WriterFn> {
        auto nw = std::make_shared<WriterFn>();
        nw->tag = w.tag;
        for (const auto& it : w.items) nw->items.push_back(substitute(it, b));
        if (w.tag == WriterFn::Tag::Compose) {
          nw->first = go(*w.first);
          nw->second = go(*w.second);
        }
        return nw;
      };
      return Value::writer_fn(go(*v.wf()));
    }
    default: return v;
  }
}

// Strict variant: the result must be fully concrete.
inline Value concretize(const Value& v, const Binding& b) {
  Value r = substitute(v, b);
  if (!fully_concrete(r)) throw EvalError("unresolved symbolic value");
  return r;
}

// ---- typing of terms (used to annotate generated quantifiers)

using SymTypes = std::map<std::string, TypeDesc>;

inline TypeDesc type_of_term(const Value& v, const SymTypes& syms) {
  switch (v.tag()) {
    case Value::Tag::Unit: return TypeDesc::unit();
    case Value::Tag::Bool: return TypeDesc::boolean();
    case Value::Tag::Nat: return TypeDesc::nat();
    case Value::Tag::Atom: return TypeDesc::carrier(v.atom_carrier());
    case Value::Tag::List:
      if (v.annotation()) return TypeDesc::list(*v.annotation());
      if (!v.items().empty()) return TypeDesc::list(type_of_term(v.items()[0], syms));
      return TypeDesc::list(TypeDesc::wr());
    case Value::Tag::Pair:
      return TypeDesc::pair(type_of_term(v.items()[0], syms), type_of_term(v.items()[1], syms));
    case Value::Tag::Just: return TypeDesc::maybe(type_of_term(v.items()[0], syms));
    case Value::Tag::Nothing: return TypeDesc::maybe(v.annotation() ? *v.annotation() : TypeDesc::wr());
    case Value::Tag::Left:
      if (v.annotation()) return *v.annotation();
      return TypeDesc::either(type_of_term(v.items()[0], syms), TypeDesc::unit());
    case Value::Tag::Right:
      if (v.annotation()) return *v.annotation();
      return TypeDesc::either(TypeDesc::unit(), type_of_term(v.items()[0], syms));
    case Value::Tag::WriterFn: return TypeDesc::writer_fn();
    case Value::Tag::Table: return TypeDesc::fn(v.fn_table()->dom, v.fn_table()->cod);
    case Value::Tag::Sym: {
      auto it = syms.find(v.name());
      if (it == syms.end()) throw TypeError("untyped symbol " + v.name());
      return it->second;
    }
    case Value::Tag::Neutral: {
      const auto& as = v.items();
      switch (v.head()) {
        case NeutralHead::Apply: {
          TypeDesc ft = type_of_term(as[0], syms);
          if (ft.tag == TypeDesc::Tag::Fn) return ft.args[1];
          if (ft.tag == TypeDesc::Tag::WriterFn) return TypeDesc::list(TypeDesc::wr());
          throw TypeError("apply head is not function-typed");
        }
        case NeutralHead::Append: {
          TypeDesc lt = type_of_term(as[0], syms);
          if (lt.tag == TypeDesc::Tag::List) return lt;
          return type_of_term(as[1], syms);
        }
        case NeutralHead::Length: return TypeDesc::nat();
        case NeutralHead::Fst: {
          TypeDesc pt = type_of_term(as[0], syms);
          if (pt.tag != TypeDesc::Tag::Pair) throw TypeError("fst of non-pair term");
          return pt.args[0];
        }
        case NeutralHead::Snd: {
          TypeDesc pt = type_of_term(as[0], syms);
          if (pt.tag != TypeDesc::Tag::Pair) throw TypeError("snd of non-pair term");
          return pt.args[1];
        }
        case NeutralHead::EqTest: return TypeDesc::boolean();
        case NeutralHead::IfThenElse: return type_of_term(as[1], syms);
      }
      throw Error("unreachable");
    }
  }
  throw Error("unreachable");
}

// ---- free symbols

inline void collect_syms(const Value& v, std::vector<std::string>& out) {
  switch (v.tag()) {
    case Value::Tag::Sym:
      for (const auto& s : out)
        if (s == v.name()) return;
      out.push_back(v.name());
      return;
    case Value::Tag::WriterFn: {
      std::function<void(const WriterFn&)> go = [&](const WriterFn& w) {
        for (const auto& it : w.items) collect_syms(it, out);
        if (w.tag == WriterFn::Tag::Compose) {
          go(*w.first);
          go(*w.second);
        }
      };
      go(*v.wf());
      return;
    }
    default:
      for (const auto& it : v.items()) collect_syms(it, out);
      return;
  }
}

// ---- rendering

inline std::string to_string(const Value& v);

inline std::string writer_fn_to_string(const WriterFn& w) {
  auto list_str = [](const ValueList& xs) {
    if (xs.empty()) return std::string("[]");
    std::string s = "[ ";
    for (size_t i = 0; i < xs.size(); ++i) {
      if (i) s += " , ";
      s += to_string(xs[i]);
    }
    return s + " ]";
  };
  switch (w.tag) {
    case WriterFn::Tag::Id: return "⟨wf-id⟩";
    case WriterFn::Tag::ConstList: return "⟨wf-const " + list_str(w.items) + "⟩";
    case WriterFn::Tag::SelfAppend: return "⟨wf-self-append⟩";
    case WriterFn::Tag::Prepend: return "⟨wf-prepend " + list_str(w.items) + "⟩";
    case WriterFn::Tag::Append: return "⟨wf-append " + list_str(w.items) + "⟩";
    case WriterFn::Tag::Compose:
      return "⟨wf-compose " + writer_fn_to_string(*w.first) + " " + writer_fn_to_string(*w.second) + "⟩";
  }
  return "?";
}

// True when the rendering is self-delimiting and may appear as an
// application argument without parentheses.
inline bool renders_atomically(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Unit:
    case Value::Tag::Bool:
    case Value::Tag::Nat:
    case Value::Tag::Atom:
    case Value::Tag::Nothing:
    case Value::Tag::Sym:
    case Value::Tag::List:
    case Value::Tag::Pair:
    case Value::Tag::WriterFn: return true;
    case Value::Tag::Neutral:
      return v.head() == NeutralHead::EqTest || v.head() == NeutralHead::IfThenElse;
    default: return false;
  }
}

inline std::string render_arg(const Value& v) {
  std::string s = to_string(v);
  return renders_atomically(v) ? s : "(" + s + ")";
}

inline std::string to_string(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Unit: return "unit";
    case Value::Tag::Bool: return v.as_bool() ? "true" : "false";
    case Value::Tag::Nat: return std::to_string(v.as_nat());
    case Value::Tag::Atom:
    case Value::Tag::Sym: return v.name();
    case Value::Tag::List: {
      if (v.items().empty()) return "[]";
      std::string s = "[ ";
      for (size_t i = 0; i < v.items().size(); ++i) {
        if (i) s += " , ";
        s += to_string(v.items()[i]);
      }
      return s + " ]";
    }
    case Value::Tag::Pair: return "(" + to_string(v.items()[0]) + " , " + to_string(v.items()[1]) + ")";
    case Value::Tag::Just: return "just " + render_arg(v.items()[0]);
    case Value::Tag::Nothing: return "nothing";
    case Value::Tag::Left: return "left " + render_arg(v.items()[0]);
    case Value::Tag::Right: return "right " + render_arg(v.items()[0]);
    case Value::Tag::WriterFn: return writer_fn_to_string(*v.wf());
    case Value::Tag::Table: {
      std::string s = "{";
      const auto& es = v.fn_table()->entries;
      for (size_t i = 0; i < es.size(); ++i) {
        if (i) s += ",";
        s += to_string(es[i].first) + ":" + to_string(es[i].second);
      }
      return s + "}";
    }
    case Value::Tag::Neutral: {
      const auto& as = v.items();
      switch (v.head()) {
        case NeutralHead::Apply: return render_arg(as[0]) + " " + render_arg(as[1]);
        case NeutralHead::Append: return render_arg(as[0]) + " ++ " + render_arg(as[1]);
        case NeutralHead::Length: return "length " + render_arg(as[0]);
        case NeutralHead::Fst: return "fst " + render_arg(as[0]);
        case NeutralHead::Snd: return "snd " + render_arg(as[0]);
        case NeutralHead::EqTest: return "(" + to_string(as[0]) + " == " + to_string(as[1]) + ")";
        case NeutralHead::IfThenElse:
          return "(if " + to_string(as[0]) + " then " + to_string(as[1]) + " else " + to_string(as[2]) + ")";
      }
      return "?";
    }
  }
  return "?";
}

}  // namespace wpcheck
