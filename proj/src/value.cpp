// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "llbc/value.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace llbc {

std::string value_str(const Value& v) {
  auto list = [](const std::vector<Value>& vs) {
    std::string s;
    for (size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + value_str(vs[i]);
    return s;
  };
  switch (v.kind) {
  case Value::Kind::Bool: return v.b ? "true" : "false";
  case Value::Kind::Int: return std::to_string(v.n);
  case Value::Kind::MutBorrow: return "borrow^m l" + std::to_string(v.id) + " (" + value_str(v.kids[0]) + ")";
  case Value::Kind::SharedBorrow: return "borrow^s l" + std::to_string(v.id);
  case Value::Kind::ReservedBorrow: return "borrow^r l" + std::to_string(v.id);
  case Value::Kind::MutLoan: return "loan^m l" + std::to_string(v.id);
  case Value::Kind::SharedLoan: {
    std::string s = "loan^s {";
    for (size_t i = 0; i < v.ids.size(); ++i) s += (i ? ", l" : "l") + std::to_string(v.ids[i]);
    return s + "} (" + value_str(v.kids[0]) + ")";
  }
  case Value::Kind::Bottom: return "⊥";
  case Value::Kind::Ctor: return v.kids.empty() ? v.name : v.name + "(" + list(v.kids) + ")";
  case Value::Kind::Tuple: return "(" + list(v.kids) + ")";
  case Value::Kind::Box: return "box(" + value_str(v.kids[0]) + ")";
  case Value::Kind::Symbolic: return "s" + std::to_string(v.id);
  case Value::Kind::ProjIn: return "proj_in['" + v.name + "](" + value_str(v.kids[0]) + ")";
  case Value::Kind::ProjLoans: return "proj_loans['" + v.name + "](s" + std::to_string(v.id) + ")";
  case Value::Kind::ProjOut: return "proj_out(s" + std::to_string(v.id) + ")";
  case Value::Kind::Ignored: return "_";
  }
  return "?";
}

bool contains_kind(const Value& v, Value::Kind k) {
  if (v.kind == k) return true;
  return std::any_of(v.kids.begin(), v.kids.end(), [k](const Value& c) { return contains_kind(c, k); });
}

bool contains_loan(const Value& v) {
  if (v.is_loan()) return true;
  return std::any_of(v.kids.begin(), v.kids.end(), contains_loan);
}

bool contains_borrow_or_loan(const Value& v) {
  if (v.is_loan() || v.is_borrow()) return true;
  return std::any_of(v.kids.begin(), v.kids.end(), contains_borrow_or_loan);
}

bool contains_symbolic(const Value& v) {
  if (v.kind == Value::Kind::Symbolic) return true;
  return std::any_of(v.kids.begin(), v.kids.end(), contains_symbolic);
}

bool has_no_outer_loans(const Value& v) {
  if (v.is_loan()) return false;
  if (v.is_borrow()) return true;
  return std::all_of(v.kids.begin(), v.kids.end(), has_no_outer_loans);
}

const Value* first_outer_loan(const Value& v) {
  std::vector<const Value*> level{&v};
  while (!level.empty()) {
    for (const Value* x : level)
      if (x->kind == Value::Kind::SharedLoan) return x;
    for (const Value* x : level)
      if (x->kind == Value::Kind::MutLoan) return x;
    std::vector<const Value*> next;
    for (const Value* x : level) {
      if (x->is_borrow()) continue;
      for (const auto& k : x->kids) next.push_back(&k);
    }
    level = std::move(next);
  }
  return nullptr;
}

// Env

std::optional<size_t> Env::find_var(const std::string& var) const {
  for (size_t i = entries.size(); i-- > 0;) {
    if (const auto* b = std::get_if<Binding>(&entries[i]))
      if (!b->ghost && b->frame == frame && b->var == var) return i;
  }
  return std::nullopt;
}

Value& Env::root(size_t entry, size_t slot) {
  Entry& e = entries.at(entry);
  if (auto* b = std::get_if<Binding>(&e)) return b->value;
  return std::get<Abstraction>(e).values.at(slot);
}

const Value& Env::root(size_t entry, size_t slot) const {
  const Entry& e = entries.at(entry);
  if (const auto* b = std::get_if<Binding>(&e)) return b->value;
  return std::get<Abstraction>(e).values.at(slot);
}

Value& Env::at(const Loc& l) {
  Value* v = &root(l.entry, l.slot);
  for (size_t i : l.path) v = &v->kids.at(i);
  return *v;
}

const Value& Env::at(const Loc& l) const {
  const Value* v = &root(l.entry, l.slot);
  for (size_t i : l.path) v = &v->kids.at(i);
  return *v;
}

namespace {

void visit_value(const Value& v, Loc& loc, const std::function<void(const Loc&, const Value&)>& f) {
  f(loc, v);
  for (size_t i = 0; i < v.kids.size(); ++i) {
    loc.path.push_back(i);
    visit_value(v.kids[i], loc, f);
    loc.path.pop_back();
  }
}

} // namespace

void Env::visit(const std::function<void(const Loc&, const Value&)>& f) const {
  for (size_t e = 0; e < entries.size(); ++e) {
    if (const auto* b = std::get_if<Binding>(&entries[e])) {
      Loc l{e, 0, {}};
      visit_value(b->value, l, f);
    } else {
      const auto& a = std::get<Abstraction>(entries[e]);
      for (size_t s = 0; s < a.values.size(); ++s) {
        Loc l{e, s, {}};
        visit_value(a.values[s], l, f);
      }
    }
  }
}

std::optional<Loc> Env::find_loan(LoanId l) const {
  std::optional<Loc> out;
  visit([&](const Loc& loc, const Value& v) {
    if (out) return;
    if ((v.kind == Value::Kind::MutLoan && v.id == l) ||
        (v.kind == Value::Kind::SharedLoan && std::find(v.ids.begin(), v.ids.end(), l) != v.ids.end()))
      out = loc;
  });
  return out;
}

std::optional<Loc> Env::find_borrow(LoanId l) const {
  std::optional<Loc> out;
  visit([&](const Loc& loc, const Value& v) {
    if (!out && v.is_borrow() && v.id == l) out = loc;
  });
  return out;
}

std::optional<Loc> Env::find_symbolic(SymId s) const {
  std::optional<Loc> out;
  visit([&](const Loc& loc, const Value& v) {
    if (!out && v.kind == Value::Kind::Symbolic && v.id == s) out = loc;
  });
  return out;
}

void Env::push_binding(std::string var, Value v, Ty ty, bool ghost) {
  entries.emplace_back(Binding{std::move(var), std::move(v), std::move(ty), ghost, frame});
}

void Env::push_ghost(std::string var, Value v, Ty ty) {
  if (!contains_borrow_or_loan(v)) return;
  push_binding(std::move(var), std::move(v), std::move(ty), true);
}

void Env::gc() {
  entries.erase(std::remove_if(entries.begin(), entries.end(),
                               [](const Entry& e) {
                                 const auto* b = std::get_if<Binding>(&e);
                                 return b && b->ghost && !contains_borrow_or_loan(b->value);
                               }),
                entries.end());
}

std::string Env::dump() const {
  std::string s;
  for (const auto& e : entries) {
    if (!s.empty()) s += ", ";
    if (const auto* b = std::get_if<Binding>(&e)) {
      s += b->var + (b->ghost ? "~" : "") + " -> " + value_str(b->value);
    } else {
      const auto& a = std::get<Abstraction>(e);
      s += "A" + std::to_string(a.id) + "['" + a.region + "]{";
      for (size_t i = 0; i < a.values.size(); ++i) s += (i ? ", " : " ") + value_str(a.values[i]);
      s += a.values.empty() ? "}" : " }";
    }
  }
  return s;
}

// Place resolution

namespace {

Resolved blocked(Blocker::Kind k, LoanId l = 0) {
  Resolved r;
  r.block.kind = k;
  r.block.loan = l;
  return r;
}

Resolved failed(const std::string& code, const std::string& msg) {
  Resolved r;
  r.block.kind = Blocker::Kind::Error;
  r.block.code = code;
  r.block.message = msg;
  return r;
}

} // namespace

Resolved resolve_place(const Env& env, const Place& p, Access mode) {
  auto idx = env.find_var(p.base);
  if (!idx) return failed("UNKNOWN_VAR", "variable " + p.base + " is not bound");
  Loc loc{*idx, 0, {}};
  bool shared_ok = mode == Access::Read || mode == Access::Ghost;
  for (size_t i = 0; i < p.path.size(); ++i) {
    const Proj& pr = p.path[i];
    const Value* v = &env.at(loc);
    // Step through shared loans (R-Shared-Loan) or get blocked by them.
    while (v->kind == Value::Kind::SharedLoan) {
      if (!shared_ok) return blocked(Blocker::Kind::Loan, v->ids.front());
      loc.path.push_back(0);
      v = &env.at(loc);
    }
    if (v->kind == Value::Kind::MutLoan) return blocked(Blocker::Kind::Loan, v->id);
    if (v->kind == Value::Kind::Bottom)
      return failed("PATH_MISMATCH", "place " + p.str() + " goes through an unusable (moved or ended) value");
    if (pr.is_deref()) {
      switch (v->kind) {
      case Value::Kind::Box: loc.path.push_back(0); break;
      case Value::Kind::MutBorrow:
        if (mode == Access::Move) return failed("MOVE_THROUGH_DEREF", "cannot move out of " + p.str() + " through a borrow");
        loc.path.push_back(0);
        break;
      case Value::Kind::ReservedBorrow:
        if (mode == Access::Move) return failed("MOVE_THROUGH_DEREF", "cannot move out of " + p.str() + " through a borrow");
        return blocked(Blocker::Kind::Reserved, v->id);
      case Value::Kind::SharedBorrow: {
        if (mode == Access::Move) return failed("MOVE_THROUGH_DEREF", "cannot move out of " + p.str() + " through a borrow");
        if (mode == Access::Write) return failed("WRITE_THROUGH_SHARED", "cannot write " + p.str() + " through a shared borrow");
        if (mode == Access::GhostMut)
          return failed("BORROW_THROUGH_SHARED", "cannot mutably borrow " + p.str() + " through a shared borrow");
        auto l = env.find_loan(v->id);
        if (!l || env.at(*l).kind != Value::Kind::SharedLoan)
          return failed("DANGLING_BORROW", "shared borrow l" + std::to_string(v->id) + " has no loan");
        loc = *l;
        loc.path.push_back(0);
        break;
      }
      default: return failed("PATH_MISMATCH", "cannot dereference " + value_str(*v) + " in " + p.str());
      }
      continue;
    }
    if (v->kind == Value::Kind::Symbolic) {
      Resolved r = blocked(Blocker::Kind::Expand);
      r.block.loc = loc;
      return r;
    }
    if (pr.kind == Proj::Kind::TupleField) {
      if (v->kind != Value::Kind::Tuple || pr.index < 0 || static_cast<size_t>(pr.index) >= v->kids.size())
        return failed("PATH_MISMATCH", "no tuple field " + std::to_string(pr.index) + " in " + value_str(*v));
      loc.path.push_back(static_cast<size_t>(pr.index));
      continue;
    }
    // Field
    if (v->kind != Value::Kind::Ctor || v->name != pr.ctor)
      return failed("PATH_MISMATCH", "value " + value_str(*v) + " is not a " + pr.ctor);
    if (pr.index < 0 || static_cast<size_t>(pr.index) >= v->kids.size())
      return failed("PATH_MISMATCH", "unresolved field " + pr.field + " of " + pr.ctor);
    loc.path.push_back(static_cast<size_t>(pr.index));
  }
  return Resolved{loc, {}};
}

namespace {

[[noreturn]] void raise_blocker(const Blocker& b, const Place& p) {
  switch (b.kind) {
  case Blocker::Kind::Error: throw Error(b.code, b.message);
  case Blocker::Kind::Loan:
    throw Error("NEEDS_REORG", "place " + p.str() + " is behind loan l" + std::to_string(b.loan));
  case Blocker::Kind::Reserved:
    throw Error("NEEDS_REORG", "place " + p.str() + " is behind reserved borrow l" + std::to_string(b.loan));
  case Blocker::Kind::Expand: throw Error("NEEDS_EXPANSION", "place " + p.str() + " reaches a symbolic value");
  case Blocker::Kind::None: break;
  }
  throw Error("INTERNAL", "no blocker");
}

Loc must(const Env& env, const Place& p, Access m) {
  Resolved r = resolve_place(env, p, m);
  if (!r.ok()) raise_blocker(r.block, p);
  return r.loc;
}

} // namespace

Value read_place(const Env& env, const Place& p) { return env.at(must(env, p, Access::Read)); }

Value read_place_for_match(const Env& env, const Place& p) {
  Value v = read_place(env, p);
  if (v.kind == Value::Kind::SharedLoan) return v.kids[0];
  return v;
}

void write_place(Env& env, const Place& p, Value v) { env.at(must(env, p, Access::Write)) = std::move(v); }

void ghost_write(Env& env, const Place& p, Value v) { env.at(must(env, p, Access::Ghost)) = std::move(v); }

Value copy_value(Env& env, const Value& v) {
  switch (v.kind) {
  case Value::Kind::Bool:
  case Value::Kind::Int:
  case Value::Kind::Symbolic: return v;
  case Value::Kind::SharedBorrow: {
    auto l = env.find_loan(v.id);
    if (!l || env.at(*l).kind != Value::Kind::SharedLoan)
      throw Error("DANGLING_BORROW", "shared borrow l" + std::to_string(v.id) + " has no loan");
    LoanId fresh = env.fresh_loan();
    auto& ids = env.at(*l).ids;
    ids.insert(std::upper_bound(ids.begin(), ids.end(), fresh), fresh);
    return Value::shared_borrow(fresh);
  }
  case Value::Kind::SharedLoan: return copy_value(env, v.kids[0]);
  case Value::Kind::Ctor:
  case Value::Kind::Tuple:
  case Value::Kind::Box: {
    Value out = v;
    for (size_t i = 0; i < v.kids.size(); ++i) out.kids[i] = copy_value(env, v.kids[i]);
    return out;
  }
  case Value::Kind::Bottom: throw Error("USE_OF_BOTTOM", "cannot copy an unusable value");
  default: throw Error("COPY_NONCOPYABLE", "cannot copy " + value_str(v));
  }
}

// Invariants

bool value_has_type(const Value& v, const Ty& t, const Program* prog, const Env& env, std::string& why) {
  auto no = [&](const std::string& w) {
    why = value_str(v) + " is not a " + t.str() + (w.empty() ? "" : " (" + w + ")");
    return false;
  };
  // Values flowing through a type parameter are checked at the instantiation site.
  if (t.kind == Ty::Kind::Var) return true;
  switch (v.kind) {
  case Value::Kind::Bottom:
  case Value::Kind::MutLoan:
  case Value::Kind::Ignored: return true;
  case Value::Kind::SharedLoan:
    // Inside abstractions a loan stands at the position of the reference it backs.
    if (t.is_ref() && !value_has_type(v.kids[0], t, prog, env, why)) return value_has_type(v.kids[0], t.inner(), prog, env, why);
    return value_has_type(v.kids[0], t, prog, env, why);
  case Value::Kind::Symbolic:
  case Value::Kind::ProjLoans:
  case Value::Kind::ProjOut: return same_shape(v.ty, t) ? true : no("symbolic value of type " + v.ty.str());
  case Value::Kind::ProjIn: return value_has_type(v.kids[0], t, prog, env, why);
  case Value::Kind::Bool: return t.kind == Ty::Kind::Bool ? true : no("");
  case Value::Kind::Int: {
    if (t.kind != v.int_ty) return no("");
    bool in = t.kind == Ty::Kind::I32 ? (v.n >= INT32_MIN && v.n <= INT32_MAX) : (v.n >= 0 && v.n <= UINT32_MAX);
    return in ? true : no("out of range");
  }
  case Value::Kind::MutBorrow:
    if (t.kind != Ty::Kind::MutRef) return no("");
    return value_has_type(v.kids[0], t.inner(), prog, env, why);
  case Value::Kind::ReservedBorrow: return t.kind == Ty::Kind::MutRef ? true : no("");
  case Value::Kind::SharedBorrow: {
    if (t.kind != Ty::Kind::SharedRef) return no("");
    return true;
  }
  case Value::Kind::Box:
    if (t.kind != Ty::Kind::Box) return no("");
    return value_has_type(v.kids[0], t.inner(), prog, env, why);
  case Value::Kind::Tuple:
    if (t.kind != Ty::Kind::Tuple || t.args.size() != v.kids.size()) return no("");
    for (size_t i = 0; i < v.kids.size(); ++i)
      if (!value_has_type(v.kids[i], t.args[i], prog, env, why)) return false;
    return true;
  case Value::Kind::Ctor: {
    if (t.kind != Ty::Kind::Adt) return no("");
    if (!prog) return true;
    const TypeDecl* td = prog->find_type(t.name);
    if (!td) return no("unknown type");
    int ci = td->ctor_index(v.name);
    if (ci < 0) return no("unknown constructor");
    const CtorDecl& cd = td->ctors[static_cast<size_t>(ci)];
    if (cd.fields.size() != v.kids.size()) return no("arity");
    auto fts = ctor_field_types(*td, cd, t.args);
    for (size_t i = 0; i < v.kids.size(); ++i)
      if (!value_has_type(v.kids[i], fts[i], prog, env, why)) return false;
    return true;
  }
  }
  return no("");
}

namespace {

struct LoanSite {
  Loc loc;
  bool mut;
};

void scan_mut_loans_in_shared(const Value& v, bool under_shared, const Loc& where, std::vector<Diagnostic>& out,
                              const std::string& owner) {
  if (v.kind == Value::Kind::MutLoan && under_shared) {
    out.push_back({"MUT_LOAN_IN_SHARED",
                   "mutable loan l" + std::to_string(v.id) + " inside a shared loan in " + owner, {}, ""});
  }
  bool us = under_shared || v.kind == Value::Kind::SharedLoan;
  for (const auto& k : v.kids) scan_mut_loans_in_shared(k, us, where, out, owner);
}

std::string entry_name(const Env& env, size_t e) {
  if (const auto* b = std::get_if<Binding>(&env.entries[e])) return b->var + (b->ghost ? "~" : "");
  return "A" + std::to_string(std::get<Abstraction>(env.entries[e]).id);
}

} // namespace

std::vector<Diagnostic> check_invariants(const Env& env, const Program* prog, bool concrete) {
  std::vector<Diagnostic> out;
  auto diag = [&](const std::string& code, const std::string& msg) { out.push_back({code, msg, {}, ""}); };
  std::map<LoanId, LoanSite> loans;
  std::map<LoanId, std::vector<std::pair<Loc, Value::Kind>>> borrows;
  std::map<SymId, Ty> syms;

  env.visit([&](const Loc& loc, const Value& v) {
    bool in_abs = std::holds_alternative<Abstraction>(env.entries[loc.entry]);
    std::string owner = entry_name(env, loc.entry);
    switch (v.kind) {
    case Value::Kind::MutLoan:
      if (!loans.emplace(v.id, LoanSite{loc, true}).second)
        diag("DUPLICATE_LOAN", "loan l" + std::to_string(v.id) + " appears twice");
      break;
    case Value::Kind::SharedLoan:
      if (v.ids.empty()) diag("EMPTY_LOAN_SET", "shared loan with empty loan-set in " + owner);
      for (LoanId l : v.ids)
        if (!loans.emplace(l, LoanSite{loc, false}).second)
          diag("DUPLICATE_LOAN", "loan l" + std::to_string(l) + " appears twice");
      break;
    case Value::Kind::MutBorrow:
    case Value::Kind::SharedBorrow:
    case Value::Kind::ReservedBorrow: borrows[v.id].push_back({loc, v.kind}); break;
    case Value::Kind::Symbolic:
    case Value::Kind::ProjLoans:
    case Value::Kind::ProjOut: {
      if (concrete) diag("SYMBOLIC_IN_CONCRETE", "symbolic value " + value_str(v) + " in " + owner);
      auto [it, fresh] = syms.emplace(v.id, v.ty);
      if (!fresh && !same_shape(it->second, v.ty))
        diag("SYM_TYPE_CONFLICT", "s" + std::to_string(v.id) + " has types " + it->second.str() + " and " + v.ty.str());
      if (v.kind == Value::Kind::ProjLoans && !in_abs)
        diag("PROJECTOR_OUTSIDE_ABS", "loan projector outside an abstraction in " + owner);
      if (v.kind == Value::Kind::ProjOut && in_abs)
        diag("PROJECTOR_OUTSIDE_ABS", "output projector inside abstraction " + owner);
      break;
    }
    case Value::Kind::ProjIn:
      if (concrete) diag("SYMBOLIC_IN_CONCRETE", "projector in " + owner);
      if (!in_abs) diag("PROJECTOR_OUTSIDE_ABS", "input projector outside an abstraction in " + owner);
      break;
    case Value::Kind::Ignored:
      if (!in_abs) diag("IGNORED_OUTSIDE_ABS", "ignored value outside an abstraction in " + owner);
      break;
    default: break;
    }
  });

  for (const auto& [id, bs] : borrows) {
    if (bs.size() > 1) diag("MULTIPLE_BORROWS", "loan l" + std::to_string(id) + " has several borrows");
    auto it = loans.find(id);
    if (it == loans.end()) {
      diag("DANGLING_BORROW", "borrow l" + std::to_string(id) + " in " + entry_name(env, bs[0].first.entry) +
                                  " has no matching loan");
      continue;
    }
    bool want_mut = bs[0].second == Value::Kind::MutBorrow;
    if (want_mut != it->second.mut)
      diag("BORROW_KIND_MISMATCH", "borrow l" + std::to_string(id) + " does not match the kind of its loan");
  }

  for (size_t e = 0; e < env.entries.size(); ++e) {
    std::string owner = entry_name(env, e);
    if (const auto* b = std::get_if<Binding>(&env.entries[e])) {
      scan_mut_loans_in_shared(b->value, false, Loc{e, 0, {}}, out, owner);
      std::string why;
      if (!value_has_type(b->value, b->ty, prog, env, why)) diag("ILL_TYPED", owner + ": " + why);
    } else {
      const auto& a = std::get<Abstraction>(env.entries[e]);
      if (concrete) diag("SYMBOLIC_IN_CONCRETE", "region abstraction " + owner + " in a concrete run");
      for (size_t s = 0; s < a.values.size(); ++s) {
        scan_mut_loans_in_shared(a.values[s], false, Loc{e, s, {}}, out, owner);
        std::string why;
        if (s < a.tys.size() && !value_has_type(a.values[s], a.tys[s], prog, env, why))
          diag("ILL_TYPED", owner + ": " + why);
      }
    }
  }
  return out;
}

} // namespace llbc
