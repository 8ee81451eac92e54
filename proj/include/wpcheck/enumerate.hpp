#pragma once

#include "wpcheck/value.hpp"

namespace wpcheck {

struct Bounds {
  std::size_t max_list_len = 4;   // bound for List carriers (also ⊆ₒ output enumeration)
  std::size_t nat_max = 64;       // naturals enumerate 0..nat_max
  std::size_t wf_list_len = 2;    // payload list bound inside writer transformers
  std::size_t wf_compose_depth = 0;
};

inline ValueList enumerate_fn_tables(const TypeDesc& dom_t, const TypeDesc& cod_t, const Domains& dom,
                                     const Bounds& bounds);

// Every value of the type within bounds, exactly once, in a fixed order:
// declaration order for atoms, false before true, length-then-lexicographic
// for lists, nothing before just, left before right, first component major
// for pairs.
inline ValueList enumerate_carrier(const TypeDesc& t, const Domains& dom, const Bounds& bounds) {
  switch (t.tag) {
    case TypeDesc::Tag::Unit: return {Value::unit()};
    case TypeDesc::Tag::Bool: return {Value::boolean(false), Value::boolean(true)};
    case TypeDesc::Tag::Nat: {
      ValueList r;
      for (std::uint64_t n = 0; n <= bounds.nat_max; ++n) r.push_back(Value::nat(n));
      return r;
    }
    case TypeDesc::Tag::St:
    case TypeDesc::Tag::Ev:
    case TypeDesc::Tag::Wr: {
      Carrier c = t.tag == TypeDesc::Tag::St ? Carrier::St : t.tag == TypeDesc::Tag::Ev ? Carrier::Ev : Carrier::Wr;
      ValueList r;
      for (const auto& a : dom.atoms(c)) r.push_back(Value::atom(c, a));
      return r;
    }
    case TypeDesc::Tag::Maybe: {
      ValueList r = {Value::nothing(t.args[0])};
      for (const auto& v : enumerate_carrier(t.args[0], dom, bounds)) r.push_back(Value::just(v));
      return r;
    }
    case TypeDesc::Tag::Either: {
      ValueList r;
      for (const auto& v : enumerate_carrier(t.args[0], dom, bounds)) r.push_back(Value::left(v, t));
      for (const auto& v : enumerate_carrier(t.args[1], dom, bounds)) r.push_back(Value::right(v, t));
      return r;
    }
    case TypeDesc::Tag::Pair: {
      ValueList r;
      for (const auto& a : enumerate_carrier(t.args[0], dom, bounds))
        for (const auto& b : enumerate_carrier(t.args[1], dom, bounds)) r.push_back(Value::pair(a, b));
      return r;
    }
    case TypeDesc::Tag::List: {
      ValueList elems = enumerate_carrier(t.args[0], dom, bounds);
      ValueList r = {Value::list({}, t.args[0])};
      ValueList prev = r;
      for (std::size_t len = 1; len <= bounds.max_list_len; ++len) {
        ValueList next;
        for (const auto& shorter : prev)
          for (const auto& e : elems) {
            ValueList items = shorter.items();
            items.push_back(e);
            next.push_back(Value::list(std::move(items), t.args[0]));
          }
        r.insert(r.end(), next.begin(), next.end());
        prev = std::move(next);
      }
      return r;
    }
    case TypeDesc::Tag::WriterFn: {
      // atoms of the grammar, then one compose layer per depth step
      Bounds pb = bounds;
      pb.max_list_len = bounds.wf_list_len;
      ValueList payloads = enumerate_carrier(TypeDesc::list(TypeDesc::wr()), dom, pb);
      std::vector<std::shared_ptr<const WriterFn>> atoms;
      atoms.push_back(wf_id());
      atoms.push_back(wf_self_append());
      for (const auto& p : payloads) atoms.push_back(wf_const(p.items()));
      for (const auto& p : payloads) atoms.push_back(wf_prepend(p.items()));
      for (const auto& p : payloads) atoms.push_back(wf_append(p.items()));
      std::vector<std::shared_ptr<const WriterFn>> all = atoms;
      std::vector<std::shared_ptr<const WriterFn>> prev = atoms;
      for (std::size_t d = 0; d < bounds.wf_compose_depth; ++d) {
        std::vector<std::shared_ptr<const WriterFn>> next;
        for (const auto& f : prev)
          for (const auto& g : atoms) next.push_back(wf_compose(f, g));
        all.insert(all.end(), next.begin(), next.end());
        prev = std::move(next);
      }
      ValueList r;
      for (const auto& w : all) r.push_back(Value::writer_fn(w));
      return r;
    }
    case TypeDesc::Tag::Fn: {
      ValueList r;
      for (const auto& tab : enumerate_fn_tables(t.args[0], t.args[1], dom, bounds)) r.push_back(tab);
      return r;
    }
  }
  throw EnumError("non-enumerable type " + to_string(t));
}

// All |cod|^|dom| total tables; the first domain entry varies slowest.
inline ValueList enumerate_fn_tables(const TypeDesc& dom_t, const TypeDesc& cod_t, const Domains& dom,
                                     const Bounds& bounds) {
  if (dom_t.tag == TypeDesc::Tag::Fn || dom_t.tag == TypeDesc::Tag::WriterFn)
    throw EnumError("non-enumerable table domain " + to_string(dom_t));
  if (cod_t.tag == TypeDesc::Tag::Fn)
    throw EnumError("non-enumerable table codomain " + to_string(cod_t));
  ValueList keys = enumerate_carrier(dom_t, dom, bounds);
  ValueList outs = enumerate_carrier(cod_t, dom, bounds);
  std::vector<std::size_t> digits(keys.size(), 0);
  ValueList r;
  for (;;) {
    auto rep = std::make_shared<FnTableRep>();
    rep->dom = dom_t;
    rep->cod = cod_t;
    for (std::size_t i = 0; i < keys.size(); ++i) rep->entries.emplace_back(keys[i], outs[digits[i]]);
    r.push_back(Value::table(rep));
    std::size_t i = keys.size();
    while (i > 0) {
      --i;
      if (++digits[i] < outs.size()) break;
      digits[i] = 0;
      if (i == 0) return r;
    }
  }
}

}  // namespace wpcheck
