// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "llbc/synth.hpp"

#include <functional>

#include "engine.hpp"
#include "llbc/syntax.hpp"

namespace llbc {

using namespace engine;

bool TranslateResult::ok() const {
  for (const auto& r : reports)
    if (!r.ok) return false;
  return true;
}

pure::PTy erase_type(const Ty& t) { return erase_ty(t); }

namespace {

Value sym_rec(const std::string& region, const std::vector<Value>& comps, size_t& k, const Value& v, const Ty& t) {
  switch (t.kind) {
  case Ty::Kind::MutRef:
    if (t.name != region) return Value::ignored();
    if (v.kind != Value::Kind::MutBorrow || k >= comps.size()) return v;
    return Value::mut_borrow(v.id, comps[k++]);
  case Ty::Kind::SharedRef: return t.name == region ? v : Value::ignored();
  case Ty::Kind::Tuple:
  case Ty::Kind::Box: {
    if (v.kids.size() != t.args.size()) return v;
    Value out = v;
    for (size_t i = 0; i < t.args.size(); ++i) out.kids[i] = sym_rec(region, comps, k, v.kids[i], t.args[i]);
    return out;
  }
  default: return v;
  }
}

void ignored_to_bottom(Value& v) {
  if (v.kind == Value::Kind::Ignored) {
    v = Value::bottom();
    return;
  }
  for (auto& k : v.kids) ignored_to_bottom(k);
}

pure::Expr wrap_events(std::vector<Event> evs, pure::Expr body) {
  for (auto it = evs.rbegin(); it != evs.rend(); ++it)
    body = it->monadic ? pure::Expr::bind(std::move(it->pat), std::move(it->rhs), std::move(body))
                       : pure::Expr::let(std::move(it->pat), std::move(it->rhs), std::move(body));
  return body;
}

pure::Expr fold(const Tree& t, const std::function<pure::Expr(const Tree&)>& leaf) {
  switch (t.kind) {
  case Tree::Kind::Let: return pure::Expr::let(t.pat, t.rhs, fold(t.kids[0], leaf));
  case Tree::Kind::Bind: return pure::Expr::bind(t.pat, t.rhs, fold(t.kids[0], leaf));
  case Tree::Kind::If: return pure::Expr::if_(t.scrut, fold(t.kids[0], leaf), fold(t.kids[1], leaf));
  case Tree::Kind::Match: {
    pure::Expr e;
    e.kind = pure::Expr::Kind::Match;
    e.kids.push_back(t.scrut);
    for (const auto& k : t.kids) e.kids.push_back(fold(k, leaf));
    e.pats = t.arms;
    return e;
  }
  case Tree::Kind::Leaf: return leaf(t);
  }
  return pure::Expr::fail();
}

std::optional<uint32_t> input_abs(const State& st, const std::string& region) {
  for (const auto& e : st.env.entries)
    if (const auto* a = std::get_if<Abstraction>(&e))
      if (a->input && a->region == region) return a->id;
  return std::nullopt;
}

Value& ret_binding(State& st, const FnDecl& f) {
  auto i = st.env.find_var(f.ret.name);
  if (!i) throw Error("INTERNAL", "return variable of " + f.name + " is gone");
  return std::get<Binding>(st.env.entries[*i]).value;
}

void collect_borrows(const Value& v, std::set<LoanId>& out) {
  if (v.is_borrow()) out.insert(v.id);
  for (const auto& k : v.kids) collect_borrows(k, out);
}

// Pure expressions of the values sitting at mutable references of region in
// the input abstraction of region.
std::vector<pure::Expr> given_back(const Machine& m, const State& st, const FnDecl& f, const std::string& region) {
  std::vector<pure::Expr> out;
  auto id = input_abs(st, region);
  if (!id) return out;
  auto idx = m.find_abs(st, *id);
  if (!idx) return out;
  const auto& a = std::get<Abstraction>(st.env.entries[*idx]);
  for (size_t j = 0; j < f.args.size() && j < a.values.size(); ++j) {
    std::vector<RegionLeaf> leaves;
    region_leaves(a.values[j], f.args[j].ty, region, leaves);
    for (const auto& lf : leaves)
      if (lf.ty.kind == Ty::Kind::MutRef) out.push_back(m.to_expr(st, lf.v));
  }
  return out;
}

pure::Expr fwd_leaf(Machine& m, const FnDecl& f, const Tree& t) {
  if (t.panic) return pure::Expr::fail();
  State st = *t.leaf;
  Value rv = ret_binding(st, f);
  std::vector<pure::Expr> parts;
  if (!f.ret.ty.is_unit()) parts.push_back(m.to_expr(st, rv));
  collect_borrows(rv, st.protected_loans);
  for (const auto& r : f.region_params) {
    if (!is_merged(f, r)) continue;
    auto id = input_abs(st, r);
    if (!id) continue;
    m.drain_abstraction(st, *id);
    for (auto& e : given_back(m, st, f, r)) parts.push_back(std::move(e));
  }
  st.protected_loans.clear();
  pure::Expr body = pure::Expr::ret(parts.empty() ? pure::Expr::unit() : pure::Expr::tuple(std::move(parts)));
  return wrap_events(std::move(st.events), std::move(body));
}

pure::Expr back_leaf(Machine& m, const FnDecl& f, const std::string& region, const Tree& t) {
  if (t.panic) return pure::Expr::fail();
  State st = *t.leaf;
  std::vector<Ty> rl;
  mut_leaves(f.ret.ty, region, rl);
  std::vector<Value> comps;
  std::vector<Event> pre;
  if (rl.size() == 1) {
    SymId id = st.env.fresh_sym();
    st.names[id] = "ret";
    comps.push_back(rl[0].kind == Ty::Kind::Box ? Value::box(m.fresh_value(st, rl[0].inner(), "ret"))
                                                : Value::symbolic(id, rl[0]));
    if (rl[0].kind == Ty::Kind::Box) pre.push_back(Event{false, m.pattern_of(st, comps[0]), pure::Expr::var("ret")});
  } else if (rl.size() > 1) {
    std::vector<pure::Pattern> ps;
    for (const auto& ty : rl) {
      comps.push_back(m.fresh_value(st, ty, "ret"));
      ps.push_back(m.pattern_of(st, comps.back()));
    }
    pre.push_back(Event{false, pure::Pattern::tuple(std::move(ps)), pure::Expr::var("ret")});
  }
  Value& rb = ret_binding(st, f);
  Value nv = sym(region, comps, rb, f.ret.ty);
  ignored_to_bottom(nv);
  rb = std::move(nv);
  auto id = input_abs(st, region);
  try {
    if (id) m.drain_abstraction(st, *id);
  } catch (Error& e) {
    throw Error("BACKWARD_STUCK", "backward function of " + f.name + " for region '" + region + ": " + e.what(), e.loc());
  }
  auto parts = given_back(m, st, f, region);
  pure::Expr body = pure::Expr::ret(parts.empty() ? pure::Expr::unit() : pure::Expr::tuple(std::move(parts)));
  for (auto& e : st.events) pre.push_back(std::move(e));
  return wrap_events(std::move(pre), std::move(body));
}

pure::PTy tuple_ty(std::vector<pure::PTy> ts) {
  if (ts.size() == 1) return ts[0];
  return Ty::tuple(std::move(ts));
}

pure::PTy fwd_ret_ty(const FnDecl& f) {
  std::vector<pure::PTy> ts;
  if (!f.ret.ty.is_unit()) ts.push_back(erase_ty(f.ret.ty));
  for (const auto& r : f.region_params) {
    if (!is_merged(f, r)) continue;
    for (const auto& a : f.args) {
      std::vector<Ty> ls;
      mut_leaves(a.ty, r, ls);
      for (const auto& l : ls) ts.push_back(erase_ty(l));
    }
  }
  return tuple_ty(std::move(ts));
}

pure::PTy back_ret_ty(const FnDecl& f, const std::string& region) {
  std::vector<pure::PTy> ts;
  for (const auto& a : f.args) {
    std::vector<Ty> ls;
    mut_leaves(a.ty, region, ls);
    for (const auto& l : ls) ts.push_back(erase_ty(l));
  }
  return tuple_ty(std::move(ts));
}

std::optional<pure::Param> back_ret_param(const FnDecl& f, const std::string& region) {
  std::vector<Ty> rl;
  mut_leaves(f.ret.ty, region, rl);
  if (rl.empty()) return std::nullopt;
  std::vector<pure::PTy> ts;
  for (const auto& l : rl) ts.push_back(erase_ty(l));
  return pure::Param{"ret", tuple_ty(std::move(ts))};
}

bool calls_fn(const Stmt& s, const std::string& fn) {
  if (s.kind == Stmt::Kind::Call && s.fn == fn) return true;
  for (const auto& k : s.kids)
    if (calls_fn(k, fn)) return true;
  return false;
}

std::vector<std::string> lower_params(const std::vector<std::string>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(pure_ty_var(p));
  return out;
}

std::vector<pure::FunDef> translate_fn(const Program& q, const FnDecl& f, const SynthOptions& o, std::string& dump) {
  std::vector<pure::FunDef> defs;
  auto tps = lower_params(f.ty_params);
  if (!f.body) {
    std::vector<pure::Param> params;
    for (const auto& a : f.args) params.push_back({a.name, erase_ty(a.ty)});
    defs.push_back(pure::FunDef{fwd_name(f.name), tps, params, fwd_ret_ty(f), std::nullopt});
    for (const auto& r : f.region_params) {
      if (!has_back(f, r)) continue;
      auto ps = params;
      if (auto rp = back_ret_param(f, r)) ps.push_back(*rp);
      defs.push_back(pure::FunDef{back_name(f, r), tps, ps, back_ret_ty(f, r), std::nullopt});
    }
    return defs;
  }
  Machine m(q, o.run, true);
  std::vector<pure::Param> params;
  State st = m.init_callee(f, params);
  Tree tree;
  try {
    Cont k{Item{&*f.body, false, {}, 0}};
    tree = m.exec(std::move(st), std::move(k));
    auto finish = [&](pure::Expr e) { return o.inline_lets ? pure::inline_lets(e) : e; };
    pure::Expr fb = fold(tree, [&](const Tree& t) { return fwd_leaf(m, f, t); });
    defs.push_back(pure::FunDef{fwd_name(f.name), tps, params, fwd_ret_ty(f), finish(std::move(fb))});
    for (const auto& r : f.region_params) {
      if (!has_back(f, r)) continue;
      pure::Expr bb = fold(tree, [&](const Tree& t) { return back_leaf(m, f, r, t); });
      if (o.inline_lets) bb = pure::drop_dead_calls(bb, "_fwd");
      auto ps = params;
      if (auto rp = back_ret_param(f, r)) ps.push_back(*rp);
      defs.push_back(pure::FunDef{back_name(f, r), tps, ps, back_ret_ty(f, r), finish(std::move(bb))});
    }
  } catch (...) {
    dump = m.fail_dump;
    throw;
  }
  return defs;
}

} // namespace

Value sym(const std::string& region, const std::vector<Value>& components, const Value& v, const Ty& t) {
  size_t k = 0;
  return sym_rec(region, components, k, v, t);
}

pure::Expr value_to_expr(const Program& p, const Env& env, const std::map<SymId, std::string>& names, const Value& v) {
  Machine m(p, {}, true);
  State st;
  st.env = env;
  st.names = names;
  return m.to_expr(st, v);
}

TranslateResult translate(const Program& p, const SynthOptions& o) {
  Program q = p;
  terminalize_program(q);
  if (q.fn_groups.empty() && !q.fns.empty()) compute_groups(q);
  TranslateResult res;
  for (const auto& td : q.types) {
    pure::TypeDef d;
    d.name = pure_type_name(td.name);
    d.ty_params = lower_params(td.ty_params);
    for (const auto& c : td.ctors) {
      pure::CtorSig cs;
      cs.name = pure_ctor_name(q, c.name);
      for (const auto& ft : c.fields) cs.fields.push_back(erase_ty(ft));
      d.ctors.push_back(std::move(cs));
    }
    res.program.types.push_back(std::move(d));
  }
  std::map<std::string, std::vector<pure::FunDef>> by_fn;
  for (const auto& f : q.fns) {
    FnReport r;
    r.fn = f.name;
    try {
      by_fn[f.name] = translate_fn(q, f, o, r.env_dump);
    } catch (const Error& e) {
      r.ok = false;
      r.diag = Diagnostic{e.code(), e.what(), e.loc(), f.name};
    }
    res.reports.push_back(std::move(r));
  }
  for (const auto& g : q.fn_groups) {
    std::vector<std::string> names;
    bool rec = g.size() > 1;
    for (const auto& fname : g) {
      const FnDecl* f = q.find_fn(fname);
      if (f && f->body && calls_fn(*f->body, fname)) rec = true;
      auto it = by_fn.find(fname);
      if (it == by_fn.end()) continue;
      for (auto& d : it->second) {
        names.push_back(d.name);
        res.program.funs.push_back(std::move(d));
      }
    }
    if (names.empty()) continue;
    res.program.groups.push_back(std::move(names));
    res.program.group_rec.push_back(rec);
  }
  return res;
}

pure::Program translate_program(const Program& p, const SynthOptions& o) {
  TranslateResult r = translate(p, o);
  for (const auto& rep : r.reports)
    if (!rep.ok) throw Error(rep.diag.code, rep.fn + ": " + rep.diag.message, rep.diag.loc);
  return std::move(r.program);
}

std::vector<FnReport> borrow_check(const Program& p, const RunOptions& opts) {
  SynthOptions o;
  o.inline_lets = false;
  o.run = opts;
  return translate(p, o).reports;
}

} // namespace llbc
