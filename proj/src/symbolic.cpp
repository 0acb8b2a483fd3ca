// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Region abstractions: callee initialization, projector reduction, abstract
// calls and the termination of abstractions.

#include <algorithm>

#include "engine.hpp"

namespace llbc::engine {

namespace {

Value collapse(Value v) {
  bool all = !v.kids.empty() && std::all_of(v.kids.begin(), v.kids.end(),
                                            [](const Value& k) { return k.kind == Value::Kind::Ignored; });
  return all ? Value::ignored() : v;
}

Value proj_in(const Value& v, const Ty& t, const std::string& region) {
  if (v.kind == Value::Kind::Ignored) return v;
  if (!contains_borrow(t)) return contains_symbolic(v) ? v : Value::ignored();
  switch (t.kind) {
  case Ty::Kind::MutRef:
  case Ty::Kind::SharedRef:
    if (!v.is_borrow())
      throw Error("RESTRICTION_VIOLATION", "argument " + value_str(v) + " of borrow type " + t.str() + " is not a borrow");
    return t.name == region ? v : Value::ignored();
  case Ty::Kind::Tuple:
  case Ty::Kind::Box: {
    if (v.kids.size() != t.args.size() && t.kind == Ty::Kind::Tuple)
      throw Error("RESTRICTION_VIOLATION", "argument " + value_str(v) + " does not match " + t.str());
    if ((t.kind == Ty::Kind::Tuple && v.kind != Value::Kind::Tuple) || (t.kind == Ty::Kind::Box && v.kind != Value::Kind::Box))
      throw Error("RESTRICTION_VIOLATION", "argument " + value_str(v) + " does not match " + t.str());
    Value out = v;
    for (size_t i = 0; i < v.kids.size(); ++i) out.kids[i] = proj_in(v.kids[i], t.args[i], region);
    return collapse(std::move(out));
  }
  default: return Value::ignored();
  }
}

bool find_first_loan(const Value& v, LoanId& out) {
  if (v.kind == Value::Kind::MutLoan) {
    out = v.id;
    return true;
  }
  if (v.kind == Value::Kind::SharedLoan) {
    out = v.ids.front();
    return true;
  }
  for (const auto& k : v.kids)
    if (find_first_loan(k, out)) return true;
  return false;
}

std::string loan_site_hint(const State& st, LoanId l) {
  auto loc = st.env.find_loan(l);
  if (!loc) return "s";
  if (const auto* b = std::get_if<Binding>(&st.env.entries[loc->entry])) return b->var;
  return "s";
}

} // namespace

void region_leaves(const Value& v, const Ty& t, const std::string& region, std::vector<RegionLeaf>& out) {
  if (v.kind == Value::Kind::Ignored) return;
  switch (t.kind) {
  case Ty::Kind::MutRef:
  case Ty::Kind::SharedRef:
    if (t.name == region) out.push_back({v, t});
    return;
  case Ty::Kind::Tuple:
  case Ty::Kind::Box:
    if (v.kids.size() != t.args.size()) return;
    for (size_t i = 0; i < t.args.size(); ++i) region_leaves(v.kids[i], t.args[i], region, out);
    return;
  default: return;
  }
}

std::optional<size_t> Machine::find_abs(const State& st, uint32_t abs_id) const {
  for (size_t i = 0; i < st.env.entries.size(); ++i)
    if (const auto* a = std::get_if<Abstraction>(&st.env.entries[i]))
      if (a->id == abs_id) return i;
  return std::nullopt;
}

Machine::Decomp Machine::decompose(State& st, const Ty& t, const std::string& hint) {
  Decomp d;
  if (!contains_borrow(t)) {
    d.caller = fresh_value(st, t, hint);
    d.pat = pattern_of(st, d.caller);
    return d;
  }
  switch (t.kind) {
  case Ty::Kind::MutRef: {
    if (contains_borrow(t.inner())) throw Error("RESTRICTION_VIOLATION", "nested borrow in " + t.str());
    Value s = fresh_value(st, t.inner(), hint);
    LoanId l = st.env.fresh_loan();
    d.pat = pattern_of(st, s);
    d.caller = Value::mut_borrow(l, std::move(s));
    d.views[t.name] = Value::mut_loan(l);
    return d;
  }
  case Ty::Kind::SharedRef: {
    if (contains_borrow(t.inner())) throw Error("RESTRICTION_VIOLATION", "nested borrow in " + t.str());
    Value s = fresh_value(st, t.inner(), hint);
    LoanId l = st.env.fresh_loan();
    d.pat = pattern_of(st, s);
    d.caller = Value::shared_borrow(l);
    d.views[t.name] = Value::shared_loan({l}, std::move(s));
    return d;
  }
  case Ty::Kind::Tuple:
  case Ty::Kind::Box: {
    std::vector<Decomp> ks;
    for (const auto& a : t.args) ks.push_back(decompose(st, a, hint));
    std::set<std::string> regions;
    std::vector<Value> callers;
    std::vector<pure::Pattern> pats;
    for (auto& k : ks) {
      for (const auto& [r, _] : k.views) regions.insert(r);
      callers.push_back(k.caller);
      pats.push_back(k.pat);
    }
    if (t.kind == Ty::Kind::Box) {
      d.caller = Value::box(std::move(callers[0]));
      d.pat = std::move(pats[0]);
    } else {
      d.caller = Value::tuple(std::move(callers));
      d.pat = pure::Pattern::tuple(std::move(pats));
    }
    for (const auto& r : regions) {
      std::vector<Value> vs;
      for (auto& k : ks) {
        auto it = k.views.find(r);
        vs.push_back(it == k.views.end() ? Value::ignored() : it->second);
      }
      d.views[r] = t.kind == Ty::Kind::Box ? collapse(Value::box(std::move(vs[0]))) : collapse(Value::tuple(std::move(vs)));
    }
    return d;
  }
  default: throw Error("RESTRICTION_VIOLATION", "borrow inside type " + t.str());
  }
}

State Machine::init_callee(const FnDecl& f, std::vector<pure::Param>& params) {
  State st;
  st.frames[0] = FrameInfo{&f, {}};
  fresh(st, "ret"); // reserve
  st.env.push_binding(f.ret.name, f.ret.ty.is_unit() ? Value::unit() : Value::bottom(), f.ret.ty, false);
  std::vector<Decomp> ds;
  for (const auto& a : f.args) {
    std::string pname;
    bool whole = !contains_borrow(a.ty) || a.ty.kind != Ty::Kind::Tuple;
    if (!whole) pname = fresh(st, a.name);
    Decomp d = decompose(st, a.ty, a.name);
    if (whole && d.pat.kind == pure::Pattern::Kind::Var) {
      params.push_back({d.pat.name, erase_ty(a.ty)});
    } else {
      if (pname.empty()) pname = fresh(st, a.name);
      params.push_back({pname, erase_ty(a.ty)});
      st.events.push_back(Event{false, d.pat, pure::Expr::var(pname)});
    }
    st.env.push_binding(a.name, d.caller, a.ty, false);
    ds.push_back(std::move(d));
  }
  for (const auto& l : f.locals) st.env.push_binding(l.name, Value::bottom(), l.ty, false);
  for (const auto& r : f.region_params) {
    Abstraction a;
    a.id = st.env.next_abs++;
    a.region = r;
    a.fn = f.name;
    a.input = true;
    for (size_t i = 0; i < f.args.size(); ++i) {
      auto it = ds[i].views.find(r);
      a.values.push_back(it == ds[i].views.end() ? Value::ignored() : it->second);
      a.tys.push_back(f.args[i].ty);
    }
    st.env.entries.emplace_back(std::move(a));
  }
  return st;
}

std::map<SymId, pure::Pattern> Machine::reduce_projectors(State& st) {
  std::map<SymId, Decomp> dec;
  // ProjOut values live in bindings only.
  for (size_t e = 0; e < st.env.entries.size(); ++e) {
    auto* b = std::get_if<Binding>(&st.env.entries[e]);
    if (!b) continue;
    std::function<void(Value&)> go = [&](Value& v) {
      if (v.kind == Value::Kind::ProjOut) {
        SymId s = v.id;
        Decomp d = decompose(st, v.ty, v.name.empty() ? "s" : v.name);
        v = d.caller;
        dec[s] = std::move(d);
        return;
      }
      for (auto& k : v.kids) go(k);
    };
    go(b->value);
  }
  for (auto& e : st.env.entries) {
    auto* a = std::get_if<Abstraction>(&e);
    if (!a) continue;
    for (size_t i = 0; i < a->values.size(); ++i) {
      Value& v = a->values[i];
      if (v.kind == Value::Kind::ProjIn) {
        Value inner = v.kids[0];
        v = proj_in(inner, a->tys.at(i), a->region);
      } else if (v.kind == Value::Kind::ProjLoans) {
        auto it = dec.find(v.id);
        if (it != dec.end()) {
          auto vi = it->second.views.find(a->region);
          v = vi == it->second.views.end() ? Value::ignored() : vi->second;
        } else if (!mentions_region(v.ty, a->region)) {
          v = Value::ignored();
        }
      }
    }
  }
  std::map<SymId, pure::Pattern> out;
  for (auto& [s, d] : dec) out[s] = d.pat;
  return out;
}

void Machine::abstract_call(State& st, const Stmt& s) {
  const FnDecl* callee = prog_.find_fn(s.fn);
  if (!callee) throw Error("UNKNOWN_FN", "unknown function " + s.fn);
  std::vector<Value> args;
  for (const auto& op : s.args) args.push_back(eval_operand(st, op));
  CallMeta meta;
  meta.fn = s.fn;
  meta.ty_args = s.ty_args;
  for (size_t i = 0; i < callee->ty_params.size() && i < s.ty_args.size(); ++i) meta.subst[callee->ty_params[i]] = s.ty_args[i];
  for (const auto& v : args) meta.args.push_back(to_expr(st, v));
  std::vector<Ty> pty;
  for (const auto& t : s.ty_args) pty.push_back(erase_ty(t));
  int call_idx = static_cast<int>(st.calls.size());
  st.calls.push_back(meta);

  Ty ret_ty = subst_ty(callee->ret.ty, meta.subst);
  std::vector<Ty> arg_tys;
  for (const auto& a : callee->args) arg_tys.push_back(subst_ty(a.ty, meta.subst));
  SymId sr = st.env.fresh_sym();
  std::map<std::string, uint32_t> abs_of;
  for (const auto& r : callee->region_params) {
    Abstraction a;
    a.id = st.env.next_abs++;
    a.region = r;
    a.fn = s.fn;
    a.call = call_idx;
    for (size_t i = 0; i < args.size(); ++i) {
      Value pi;
      pi.kind = Value::Kind::ProjIn;
      pi.name = r;
      pi.kids = {args[i]};
      a.values.push_back(std::move(pi));
      a.tys.push_back(arg_tys.at(i));
    }
    Value pl;
    pl.kind = Value::Kind::ProjLoans;
    pl.id = sr;
    pl.ty = ret_ty;
    pl.name = r;
    a.values.push_back(std::move(pl));
    a.tys.push_back(ret_ty);
    abs_of[r] = a.id;
    st.env.entries.emplace_back(std::move(a));
  }
  reduce_projectors(st);

  size_t ev = st.events.size();
  st.events.push_back(Event{true, pure::Pattern::wild(), pure::Expr::call(fwd_name(s.fn), pty, meta.args)});
  Value out;
  if (contains_borrow(ret_ty)) {
    out.kind = Value::Kind::ProjOut;
    out.id = sr;
    out.ty = ret_ty;
    out.name = s.place.base;
  } else {
    out = fresh_value(st, ret_ty, s.place.base);
  }
  pure::Pattern ret_pat = pattern_of(st, out);
  assign(st, s.place, out);
  auto pats = reduce_projectors(st);
  if (auto it = pats.find(sr); it != pats.end()) ret_pat = it->second;

  std::vector<pure::Pattern> all;
  if (!callee->ret.ty.is_unit()) all.push_back(ret_pat);
  for (const auto& r : callee->region_params) {
    if (!is_merged(*callee, r)) continue;
    auto given = release_abstraction(st, abs_of[r]);
    for (auto& g : given) all.push_back(std::move(g));
  }
  st.events[ev].pat = all.empty() ? pure::Pattern::wild() : pure::Pattern::tuple(std::move(all));
}

void Machine::drain_abstraction(State& st, uint32_t abs_id) {
  for (int guard = 0;; ++guard) {
    if (guard > 100000) throw Error("STUCK_REORG", "cannot end region abstraction A" + std::to_string(abs_id));
    auto idx = find_abs(st, abs_id);
    if (!idx) return;
    const auto& a = std::get<Abstraction>(st.env.entries[*idx]);
    LoanId l = 0;
    bool found = false;
    for (const auto& v : a.values)
      if (find_first_loan(v, l)) {
        found = true;
        break;
      }
    if (found) {
      end_loan(st, l);
      continue;
    }
    for (const auto& v : a.values)
      if (contains_kind(v, Value::Kind::ProjLoans))
        throw Error("STUCK_REORG", "region abstraction A" + std::to_string(abs_id) + " still has a pending loan projector");
    return;
  }
}

std::vector<pure::Pattern> Machine::release_abstraction(State& st, uint32_t abs_id) {
  drain_abstraction(st, abs_id);
  auto idx = find_abs(st, abs_id);
  if (!idx) return {};
  Abstraction a = std::get<Abstraction>(st.env.entries[*idx]);
  st.env.entries.erase(st.env.entries.begin() + static_cast<long>(*idx));
  size_t nargs = a.input ? a.values.size() : a.values.size() - 1;
  std::vector<pure::Pattern> pats;
  for (size_t j = 0; j < nargs; ++j) {
    std::vector<RegionLeaf> leaves;
    region_leaves(a.values[j], a.tys[j], a.region, leaves);
    for (auto& lf : leaves) {
      if (lf.v.kind == Value::Kind::MutBorrow) {
        std::string hint = loan_site_hint(st, lf.v.id);
        Value s = fresh_value(st, lf.ty.inner(), hint);
        pats.push_back(pattern_of(st, s));
        st.env.push_binding(hint, Value::mut_borrow(lf.v.id, std::move(s)), lf.ty, true);
      } else if (lf.v.kind == Value::Kind::SharedBorrow) {
        std::string hint = loan_site_hint(st, lf.v.id);
        st.env.push_binding(hint, lf.v, lf.ty, true);
      }
    }
  }
  return pats;
}

void Machine::end_abstraction(State& st, uint32_t abs_id) {
  drain_abstraction(st, abs_id);
  auto idx = find_abs(st, abs_id);
  if (!idx) return;
  const Abstraction a = std::get<Abstraction>(st.env.entries[*idx]);
  if (a.input) throw Error("STUCK_REORG", "cannot end the input abstraction of " + a.fn + " in the middle of its body");
  const CallMeta& meta = st.calls.at(static_cast<size_t>(a.call));
  const FnDecl* callee = prog_.find_fn(a.fn);
  std::vector<pure::Expr> ret_parts;
  {
    std::vector<RegionLeaf> leaves;
    region_leaves(a.values.back(), a.tys.back(), a.region, leaves);
    for (const auto& lf : leaves)
      if (lf.ty.kind == Ty::Kind::MutRef) ret_parts.push_back(to_expr(st, lf.v));
  }
  auto pats = release_abstraction(st, abs_id);
  if (!callee || !has_back(*callee, a.region)) return;
  std::vector<pure::Expr> args = meta.args;
  if (!ret_parts.empty()) args.push_back(pure::Expr::tuple(std::move(ret_parts)));
  std::vector<Ty> pty;
  for (const auto& t : meta.ty_args) pty.push_back(erase_ty(t));
  st.events.push_back(Event{true, pats.empty() ? pure::Pattern::wild() : pure::Pattern::tuple(std::move(pats)),
                            pure::Expr::call(back_name(*callee, a.region), std::move(pty), std::move(args))});
}

} // namespace llbc::engine
