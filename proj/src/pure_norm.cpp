// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Let inlining, normalization, alpha-equivalence and scope checking.

#include <functional>
#include <set>

#include "llbc/pure.hpp"

namespace llbc::pure {

namespace {

void pat_vars(const Pattern& p, std::set<std::string>& out) {
  if (p.kind == Pattern::Kind::Var) out.insert(p.name);
  for (const auto& k : p.kids) pat_vars(k, out);
}

bool binds(const Pattern& p, const std::string& x) {
  if (p.kind == Pattern::Kind::Var) return p.name == x;
  for (const auto& k : p.kids)
    if (binds(k, x)) return true;
  return false;
}

// Free occurrences of x in e.
size_t uses(const Expr& e, const std::string& x) {
  switch (e.kind) {
  case Expr::Kind::Var: return e.name == x ? 1 : 0;
  case Expr::Kind::Let:
  case Expr::Kind::Bind: return uses(e.kids[0], x) + (binds(e.pats[0], x) ? 0 : uses(e.kids[1], x));
  case Expr::Kind::Match: {
    size_t n = uses(e.kids[0], x);
    for (size_t i = 0; i < e.pats.size(); ++i)
      if (!binds(e.pats[i], x)) n += uses(e.kids[i + 1], x);
    return n;
  }
  default: {
    size_t n = 0;
    for (const auto& k : e.kids) n += uses(k, x);
    return n;
  }
  }
}

void free_vars(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  auto under = [&](const Pattern& p, const Expr& body) {
    std::set<std::string> vs;
    pat_vars(p, vs);
    std::set<std::string> added;
    for (const auto& v : vs)
      if (bound.insert(v).second) added.insert(v);
    free_vars(body, bound, out);
    for (const auto& v : added) bound.erase(v);
  };
  switch (e.kind) {
  case Expr::Kind::Var:
    if (!bound.count(e.name)) out.insert(e.name);
    return;
  case Expr::Kind::Let:
  case Expr::Kind::Bind:
    free_vars(e.kids[0], bound, out);
    under(e.pats[0], e.kids[1]);
    return;
  case Expr::Kind::Match:
    free_vars(e.kids[0], bound, out);
    for (size_t i = 0; i < e.pats.size(); ++i) under(e.pats[i], e.kids[i + 1]);
    return;
  default:
    for (const auto& k : e.kids) free_vars(k, bound, out);
  }
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> bound, out;
  free_vars(e, bound, out);
  return out;
}

// Replaces free x by v. Fails (returns false) when a binder would capture a
// free variable of v.
bool subst(Expr& e, const std::string& x, const Expr& v, const std::set<std::string>& fv) {
  auto under = [&](const Pattern& p, Expr& body) {
    if (binds(p, x)) return true;
    if (uses(body, x) == 0) return true;
    std::set<std::string> vs;
    pat_vars(p, vs);
    for (const auto& n : vs)
      if (fv.count(n)) return false;
    return subst(body, x, v, fv);
  };
  switch (e.kind) {
  case Expr::Kind::Var:
    if (e.name == x) e = v;
    return true;
  case Expr::Kind::Let:
  case Expr::Kind::Bind: return subst(e.kids[0], x, v, fv) && under(e.pats[0], e.kids[1]);
  case Expr::Kind::Match: {
    if (!subst(e.kids[0], x, v, fv)) return false;
    for (size_t i = 0; i < e.pats.size(); ++i)
      if (!under(e.pats[i], e.kids[i + 1])) return false;
    return true;
  }
  default:
    for (auto& k : e.kids)
      if (!subst(k, x, v, fv)) return false;
    return true;
  }
}

bool is_scalar(const Expr& e) { return e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Const; }

bool is_value(const Expr& e) {
  switch (e.kind) {
  case Expr::Kind::Var:
  case Expr::Kind::Const: return true;
  case Expr::Kind::Tuple:
  case Expr::Kind::Ctor:
    for (const auto& k : e.kids)
      if (!is_value(k)) return false;
    return true;
  default: return false;
  }
}

bool unused(const Pattern& p, const Expr& body) {
  std::set<std::string> vs;
  pat_vars(p, vs);
  for (const auto& v : vs)
    if (uses(body, v)) return false;
  return true;
}

Expr inline_let(Expr e);

Expr inline_rec(const Expr& e) {
  Expr out = e;
  for (auto& k : out.kids) k = inline_rec(k);
  if (out.kind == Expr::Kind::Let) return inline_let(std::move(out));
  return out;
}

Expr inline_let(Expr e) {
  Pattern& p = e.pats[0];
  Expr& rhs = e.kids[0];
  Expr& body = e.kids[1];
  if (p.kind == Pattern::Kind::Tuple && rhs.kind == Expr::Kind::Tuple && rhs.kids.size() == p.kids.size() &&
      !p.kids.empty()) {
    std::set<std::string> vs;
    pat_vars(p, vs);
    bool clash = false;
    for (const auto& k : rhs.kids)
      for (const auto& f : free_vars(k))
        if (vs.count(f)) clash = true;
    if (!clash) {
      Expr r = std::move(body);
      for (size_t i = p.kids.size(); i-- > 0;) r = inline_let(Expr::let(p.kids[i], rhs.kids[i], std::move(r)));
      return r;
    }
  }
  if (unused(p, body)) return std::move(body);
  if (p.kind != Pattern::Kind::Var) return e;
  size_t n = uses(body, p.name);
  if (!is_scalar(rhs) && n != 1) return e;
  Expr b = body;
  if (!subst(b, p.name, rhs, free_vars(rhs))) return e;
  return b;
}

std::optional<Expr> pat_expr(const Pattern& p) {
  switch (p.kind) {
  case Pattern::Kind::Var: return Expr::var(p.name);
  case Pattern::Kind::Const: return p.cty == Ty::Kind::Bool ? Expr::boolean(p.b) : Expr::integer(p.n, p.cty);
  case Pattern::Kind::Tuple:
  case Pattern::Kind::Ctor: {
    std::vector<Expr> ks;
    for (const auto& k : p.kids) {
      auto x = pat_expr(k);
      if (!x) return std::nullopt;
      ks.push_back(std::move(*x));
    }
    if (p.kind == Pattern::Kind::Ctor) return Expr::ctor(p.name, std::move(ks));
    Expr t;
    t.kind = Expr::Kind::Tuple;
    t.kids = std::move(ks);
    return t;
  }
  case Pattern::Kind::Wild: return std::nullopt;
  }
  return std::nullopt;
}

Pattern wild_unused(const Pattern& p, const Expr& body) {
  if (p.kind == Pattern::Kind::Var) return uses(body, p.name) ? p : Pattern::wild();
  Pattern q = p;
  for (auto& k : q.kids) k = wild_unused(k, body);
  if (q.kind == Pattern::Kind::Tuple && !q.kids.empty()) {
    bool all = true;
    for (const auto& k : q.kids) all = all && k.kind == Pattern::Kind::Wild;
    if (all) return Pattern::wild();
  }
  return q;
}

bool is_massert(const Expr& e) { return e.kind == Expr::Kind::Prim && e.name == "massert"; }

Expr negate(Expr c) {
  if (c.kind == Expr::Kind::Prim && c.name == "not") return std::move(c.kids[0]);
  return Expr::prim("not", {std::move(c)});
}

// One bottom-up rewriting pass.
Expr rewrite(const Expr& in) {
  Expr e = in;
  for (auto& k : e.kids) k = rewrite(k);
  switch (e.kind) {
  case Expr::Kind::Prim:
    if (e.name == "not" && e.kids[0].kind == Expr::Kind::Prim && e.kids[0].name == "not")
      return std::move(e.kids[0].kids[0]);
    return e;
  case Expr::Kind::Bind: {
    e.pats[0] = wild_unused(e.pats[0], e.kids[1]);
    const Expr& rhs = e.kids[0];
    const Expr& body = e.kids[1];
    if (rhs.kind == Expr::Kind::Ret) return Expr::let(e.pats[0], rhs.kids[0], body);
    if (body.kind == Expr::Kind::Ret) {
      auto pe = pat_expr(e.pats[0]);
      if (pe && *pe == body.kids[0]) return rhs;
      if (e.pats[0].kind == Pattern::Kind::Wild && body.kids[0] == Expr::unit() && is_massert(rhs)) return rhs;
    }
    return e;
  }
  case Expr::Kind::Let:
    if (e.pats[0].kind == Pattern::Kind::Var && is_value(e.kids[0])) {
      Expr b = e.kids[1];
      if (subst(b, e.pats[0].name, e.kids[0], free_vars(e.kids[0]))) return b;
    }
    return inline_let(std::move(e));
  case Expr::Kind::If: {
    if (e.kids[0].kind == Expr::Kind::Prim && e.kids[0].name == "not")
      return Expr::if_(std::move(e.kids[0].kids[0]), std::move(e.kids[2]), std::move(e.kids[1]));
    if (e.kids[2].kind == Expr::Kind::Fail)
      return Expr::bind(Pattern::wild(), Expr::prim("massert", {std::move(e.kids[0])}), std::move(e.kids[1]));
    if (e.kids[1].kind == Expr::Kind::Fail)
      return Expr::bind(Pattern::wild(), Expr::prim("massert", {negate(std::move(e.kids[0]))}), std::move(e.kids[2]));
    return e;
  }
  case Expr::Kind::Match: {
    for (size_t i = 0; i < e.pats.size(); ++i) e.pats[i] = wild_unused(e.pats[i], e.kids[i + 1]);
    if (e.pats.size() == 2 && e.pats[0].kind == Pattern::Kind::Const && e.pats[1].kind == Pattern::Kind::Wild) {
      const Pattern& k = e.pats[0];
      Expr c = k.cty == Ty::Kind::Bool ? (k.b ? e.kids[0] : negate(e.kids[0]))
                                       : Expr::prim("eq", {e.kids[0], Expr::integer(k.n, k.cty)});
      return Expr::if_(std::move(c), std::move(e.kids[1]), std::move(e.kids[2]));
    }
    return e;
  }
  default: return e;
  }
}

// ---- alpha-equivalence ----

struct Alpha {
  std::vector<std::pair<std::string, std::string>> scope;
  const std::map<std::string, std::string>* fns = nullptr;
  std::map<std::string, std::string> tyvars;
  std::string why;

  bool fail(const std::string& m) {
    if (why.empty()) why = m;
    return false;
  }

  bool ty(const PTy& a, const PTy& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == Ty::Kind::Var) {
      auto it = tyvars.find(a.name);
      return it != tyvars.end() ? it->second == b.name : a.name == b.name;
    }
    if (a.name != b.name) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
      if (!ty(a.args[i], b.args[i])) return false;
    return true;
  }

  bool pat(const Pattern& a, const Pattern& b, size_t& pushed) {
    if (a.kind != b.kind) return fail("pattern mismatch");
    switch (a.kind) {
    case Pattern::Kind::Wild: return true;
    case Pattern::Kind::Var:
      scope.emplace_back(a.name, b.name);
      ++pushed;
      return true;
    case Pattern::Kind::Const:
      if (a.cty != b.cty || a.n != b.n || a.b != b.b) return fail("constant pattern mismatch");
      return true;
    default:
      if (a.name != b.name || a.kids.size() != b.kids.size()) return fail("pattern " + a.name + " vs " + b.name);
      for (size_t i = 0; i < a.kids.size(); ++i)
        if (!pat(a.kids[i], b.kids[i], pushed)) return false;
      return true;
    }
  }

  bool var(const std::string& a, const std::string& b) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == a || it->second == b) {
        if (it->first == a && it->second == b) return true;
        return fail("variable " + a + " vs " + b);
      }
    }
    if (a != b) return fail("free variable " + a + " vs " + b);
    return true;
  }

  bool under(const Pattern& pa, const Expr& ea, const Pattern& pb, const Expr& eb) {
    size_t n = 0;
    bool ok = pat(pa, pb, n) && expr(ea, eb);
    scope.resize(scope.size() - n);
    return ok;
  }

  bool expr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind)
      return fail("shape mismatch: " + print_expr(a, Style::Neutral) + " vs " + print_expr(b, Style::Neutral));
    if (a.kids.size() != b.kids.size()) return fail("arity mismatch at " + a.name);
    switch (a.kind) {
    case Expr::Kind::Var: return var(a.name, b.name);
    case Expr::Kind::Const:
      if (a.cty != b.cty || a.n != b.n || a.b != b.b) return fail("constant mismatch");
      return true;
    case Expr::Kind::Call: {
      std::string an = a.name;
      if (fns) {
        auto it = fns->find(a.name);
        if (it != fns->end()) an = it->second;
      }
      if (an != b.name) return fail("call " + a.name + " vs " + b.name);
      if (a.ty_args.size() != b.ty_args.size()) return fail("type arguments of " + a.name);
      for (size_t i = 0; i < a.ty_args.size(); ++i)
        if (!ty(a.ty_args[i], b.ty_args[i])) return fail("type arguments of " + a.name);
      break;
    }
    case Expr::Kind::Ctor:
    case Expr::Kind::Prim:
      if (a.name != b.name) return fail(a.name + " vs " + b.name);
      break;
    case Expr::Kind::Let:
    case Expr::Kind::Bind: return expr(a.kids[0], b.kids[0]) && under(a.pats[0], a.kids[1], b.pats[0], b.kids[1]);
    case Expr::Kind::Match:
      if (!expr(a.kids[0], b.kids[0])) return false;
      for (size_t i = 0; i < a.pats.size(); ++i)
        if (!under(a.pats[i], a.kids[i + 1], b.pats[i], b.kids[i + 1])) return false;
      return true;
    default: break;
    }
    for (size_t i = 0; i < a.kids.size(); ++i)
      if (!expr(a.kids[i], b.kids[i])) return false;
    return true;
  }
};

} // namespace

Expr inline_lets(const Expr& e) { return inline_rec(e); }

Expr drop_dead_calls(const Expr& e, const std::string& suffix) {
  Expr out = e;
  for (auto& k : out.kids) k = drop_dead_calls(k, suffix);
  if (out.kind == Expr::Kind::Bind && out.kids[0].kind == Expr::Kind::Call) {
    const std::string& n = out.kids[0].name;
    bool hit = n.size() >= suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0;
    if (hit && unused(out.pats[0], out.kids[1])) return std::move(out.kids[1]);
  }
  return out;
}

Expr normalize(const Expr& e) {
  Expr cur = inline_lets(e);
  for (int i = 0; i < 64; ++i) {
    Expr next = rewrite(cur);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

Program normalize(const Program& p) {
  Program q = p;
  for (auto& f : q.funs)
    if (f.body) f.body = normalize(*f.body);
  return q;
}

bool alpha_equal(const Expr& a, const Expr& b) {
  Alpha al;
  return al.expr(a, b);
}

bool alpha_equal(const Program& a, const Program& b, std::string* why) {
  auto no = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (a.types.size() != b.types.size()) return no("type declaration count differs");
  for (size_t i = 0; i < a.types.size(); ++i) {
    const auto &ta = a.types[i], &tb = b.types[i];
    if (ta.name != tb.name || ta.ty_params.size() != tb.ty_params.size() || ta.ctors.size() != tb.ctors.size())
      return no("type " + ta.name + " vs " + tb.name);
    Alpha al;
    for (size_t k = 0; k < ta.ty_params.size(); ++k) al.tyvars[ta.ty_params[k]] = tb.ty_params[k];
    for (size_t c = 0; c < ta.ctors.size(); ++c) {
      const auto &ca = ta.ctors[c], &cb = tb.ctors[c];
      if (ca.name != cb.name || ca.fields.size() != cb.fields.size()) return no("constructor " + ca.name + " vs " + cb.name);
      for (size_t f = 0; f < ca.fields.size(); ++f)
        if (!al.ty(ca.fields[f], cb.fields[f])) return no("field types of " + ca.name);
    }
  }
  if (a.funs.size() != b.funs.size()) return no("function count differs");
  std::map<std::string, std::string> fns;
  std::set<std::string> seen;
  for (size_t i = 0; i < a.funs.size(); ++i) {
    if (!seen.insert(b.funs[i].name).second) return no("duplicate function " + b.funs[i].name);
    fns[a.funs[i].name] = b.funs[i].name;
  }
  for (size_t i = 0; i < a.funs.size(); ++i) {
    const auto &fa = a.funs[i], &fb = b.funs[i];
    std::string at = fa.name + " vs " + fb.name + ": ";
    if (fa.ty_params.size() != fb.ty_params.size()) return no(at + "type parameters");
    if (fa.params.size() != fb.params.size()) return no(at + "parameter count");
    if (fa.body.has_value() != fb.body.has_value()) return no(at + "body presence");
    Alpha al;
    al.fns = &fns;
    for (size_t k = 0; k < fa.ty_params.size(); ++k) al.tyvars[fa.ty_params[k]] = fb.ty_params[k];
    if (!al.ty(fa.ret, fb.ret)) return no(at + "return type");
    for (size_t k = 0; k < fa.params.size(); ++k) {
      if (!al.ty(fa.params[k].ty, fb.params[k].ty)) return no(at + "type of parameter " + fa.params[k].name);
      al.scope.emplace_back(fa.params[k].name, fb.params[k].name);
    }
    if (fa.body && !al.expr(*fa.body, *fb.body)) return no(at + al.why);
  }
  return true;
}

std::optional<std::string> scope_error(const Program& p) {
  std::optional<std::string> bad;
  std::set<std::string> in;
  std::function<void(const Expr&)> walk;
  auto under = [&](const Pattern& pat, const Expr& body) {
    std::set<std::string> vs;
    pat_vars(pat, vs);
    for (const auto& v : vs)
      if (in.count(v) && !bad) bad = v;
    for (const auto& v : vs) in.insert(v);
    walk(body);
    for (const auto& v : vs) in.erase(v);
  };
  walk = [&](const Expr& e) {
    if (bad) return;
    switch (e.kind) {
    case Expr::Kind::Var:
      if (!in.count(e.name)) bad = e.name;
      return;
    case Expr::Kind::Let:
    case Expr::Kind::Bind:
      walk(e.kids[0]);
      under(e.pats[0], e.kids[1]);
      return;
    case Expr::Kind::Match:
      walk(e.kids[0]);
      for (size_t i = 0; i < e.pats.size(); ++i) under(e.pats[i], e.kids[i + 1]);
      return;
    default:
      for (const auto& k : e.kids) walk(k);
    }
  };
  for (const auto& f : p.funs) {
    if (!f.body) continue;
    in.clear();
    for (const auto& prm : f.params) {
      if (!in.insert(prm.name).second) return prm.name;
    }
    walk(*f.body);
    if (bad) return bad;
  }
  return std::nullopt;
}

} // namespace llbc::pure
