// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Static checks: well-formed types, signature restrictions, place typing,
// literal widths, complete matches.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "llbc/syntax.hpp"

namespace llbc {

bool type_of_place(const Program& prog, const FnDecl& f, Place& place, Ty& out, std::string& err) {
  const Ty* base = f.var_type(place.base);
  if (!base) {
    err = "unknown variable '" + place.base + "'";
    return false;
  }
  Ty cur = *base;
  for (auto& pr : place.path) {
    switch (pr.kind) {
    case Proj::Kind::Deref:
    case Proj::Kind::DerefMut:
    case Proj::Kind::DerefShared:
    case Proj::Kind::DerefBox:
      if (cur.kind == Ty::Kind::MutRef) {
        pr.kind = Proj::Kind::DerefMut;
      } else if (cur.kind == Ty::Kind::SharedRef) {
        pr.kind = Proj::Kind::DerefShared;
      } else if (cur.kind == Ty::Kind::Box) {
        pr.kind = Proj::Kind::DerefBox;
      } else {
        err = "cannot dereference a value of type " + cur.str();
        return false;
      }
      cur = Ty(cur.inner());
      break;
    case Proj::Kind::TupleField:
      if (cur.kind != Ty::Kind::Tuple || pr.index < 0 || static_cast<size_t>(pr.index) >= cur.args.size()) {
        err = "no tuple field " + std::to_string(pr.index) + " in type " + cur.str();
        return false;
      }
      cur = Ty(cur.args[static_cast<size_t>(pr.index)]);
      break;
    case Proj::Kind::Field: {
      if (cur.kind != Ty::Kind::Adt) {
        err = "field access on non-data type " + cur.str();
        return false;
      }
      const TypeDecl* td = prog.find_type(cur.name);
      if (!td) {
        err = "unknown type " + cur.name;
        return false;
      }
      int ci = td->ctor_index(pr.ctor);
      if (ci < 0) {
        err = "type " + cur.name + " has no constructor " + pr.ctor;
        return false;
      }
      const CtorDecl& cd = td->ctors[static_cast<size_t>(ci)];
      auto it = std::find(cd.field_names.begin(), cd.field_names.end(), pr.field);
      if (it == cd.field_names.end()) {
        err = "constructor " + pr.ctor + " has no field " + pr.field;
        return false;
      }
      pr.index = static_cast<int>(it - cd.field_names.begin());
      cur = ctor_field_types(*td, cd, cur.args)[static_cast<size_t>(pr.index)];
      break;
    }
    }
  }
  out = cur;
  return true;
}

namespace {

bool fits(int64_t n, Ty::Kind k) {
  if (k == Ty::Kind::I32) return n >= INT32_MIN && n <= INT32_MAX;
  if (k == Ty::Kind::U32) return n >= 0 && n <= static_cast<int64_t>(UINT32_MAX);
  return false;
}

class Validator {
public:
  explicit Validator(Program& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    decl_names();
    for (const auto& t : p_.types) type_decl(t);
    unguarded_recursion();
    for (auto& f : p_.fns) fn_decl(f);
    compute_groups(p_);
    return std::move(diags_);
  }

private:
  void diag(std::string code, std::string msg, SrcLoc loc, std::string where = "") {
    diags_.push_back(Diagnostic{std::move(code), std::move(msg), loc, std::move(where)});
  }

  void decl_names() {
    std::set<std::string> types, ctors, fns;
    for (const auto& t : p_.types) {
      if (!types.insert(t.name).second) diag("DUPLICATE_DECL", "type " + t.name + " declared twice", t.loc);
      if (t.ctors.empty() && !t.is_struct) diag("EMPTY_TYPE", "type " + t.name + " has no constructors", t.loc);
      for (const auto& c : t.ctors) {
        if (!ctors.insert(c.name).second && !t.is_struct)
          diag("DUPLICATE_CTOR", "constructor " + c.name + " declared twice", t.loc);
        std::set<std::string> fields;
        for (const auto& fn : c.field_names)
          if (!fields.insert(fn).second) diag("DUPLICATE_FIELD", "field " + fn + " declared twice in " + c.name, t.loc);
      }
    }
    for (const auto& f : p_.fns)
      if (!fns.insert(f.name).second) diag("DUPLICATE_DECL", "function " + f.name + " declared twice", f.loc);
  }

  // Well-formedness of a type. regions: allowed region names (nullptr: any).
  void wf(const Ty& t, const std::vector<std::string>& tyvars, const std::vector<std::string>* regions, bool sig,
          SrcLoc loc, const std::string& where) {
    switch (t.kind) {
    case Ty::Kind::Var:
      if (std::find(tyvars.begin(), tyvars.end(), t.name) == tyvars.end())
        diag("UNKNOWN_TYPE", "unknown type variable " + t.name, loc, where);
      return;
    case Ty::Kind::Adt: {
      const TypeDecl* td = p_.find_type(t.name);
      if (!td) {
        diag("UNKNOWN_TYPE", "unknown type " + t.name, loc, where);
      } else if (td->ty_params.size() != t.args.size()) {
        diag("TY_ARG_MISMATCH", "type " + t.name + " expects " + std::to_string(td->ty_params.size()) + " arguments",
             loc, where);
      }
      for (const auto& a : t.args)
        if (contains_borrow(a)) diag("BORROW_IN_ADT_ARG", "data type argument contains a borrow: " + t.str(), loc, where);
      break;
    }
    case Ty::Kind::Tuple:
      if (t.args.size() == 1) diag("UNARY_TUPLE", "tuple types have zero or at least two elements", loc, where);
      break;
    case Ty::Kind::MutRef:
    case Ty::Kind::SharedRef:
      if (sig && t.name.empty()) {
        diag("MISSING_REGION", "borrow type in a signature needs a region: " + t.str(), loc, where);
      } else if (regions && !t.name.empty() &&
                 std::find(regions->begin(), regions->end(), t.name) == regions->end()) {
        diag("UNKNOWN_REGION", "undeclared region '" + t.name, loc, where);
      }
      if (sig && contains_borrow(t.inner()))
        diag("NESTED_BORROW_SIG", "nested borrow in function signature: " + t.str(), loc, where);
      break;
    default: break;
    }
    for (const auto& a : t.args) wf(a, tyvars, regions, sig, loc, where);
  }

  void type_decl(const TypeDecl& t) {
    for (const auto& c : t.ctors) {
      for (const auto& f : c.fields) {
        wf(f, t.ty_params, nullptr, false, t.loc, t.name);
        if (contains_borrow(f)) diag("BORROW_IN_TYPE_DECL", "field of " + c.name + " contains a borrow", t.loc, t.name);
      }
    }
  }

  static void unguarded_refs(const Ty& t, std::set<std::string>& out) {
    if (t.kind == Ty::Kind::Box || t.is_ref()) return;
    if (t.kind == Ty::Kind::Adt) out.insert(t.name);
    for (const auto& a : t.args) unguarded_refs(a, out);
  }

  void unguarded_recursion() {
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& t : p_.types)
      for (const auto& c : t.ctors)
        for (const auto& f : c.fields) unguarded_refs(f, edges[t.name]);
    for (const auto& t : p_.types) {
      std::set<std::string> seen;
      std::vector<std::string> work(edges[t.name].begin(), edges[t.name].end());
      bool cyclic = false;
      while (!work.empty()) {
        std::string n = work.back();
        work.pop_back();
        if (n == t.name) {
          cyclic = true;
          break;
        }
        if (!seen.insert(n).second) continue;
        for (const auto& m : edges[n]) work.push_back(m);
      }
      if (cyclic) diag("RECURSIVE_TYPE_UNGUARDED", "recursive occurrence of " + t.name + " not under Box", t.loc, t.name);
    }
  }

  void fn_decl(FnDecl& f) {
    fn_ = &f;
    std::set<std::string> names;
    auto declare = [&](const Var& v) {
      if (!names.insert(v.name).second) diag("DUPLICATE_VAR", "variable " + v.name + " declared twice", f.loc, f.name);
    };
    std::set<std::string> rs;
    for (const auto& r : f.region_params)
      if (!rs.insert(r).second) diag("DUPLICATE_REGION", "region '" + r + " declared twice", f.loc, f.name);
    for (const auto& a : f.args) {
      declare(a);
      wf(a.ty, f.ty_params, &f.region_params, true, f.loc, f.name);
    }
    declare(f.ret);
    wf(f.ret.ty, f.ty_params, &f.region_params, true, f.loc, f.name);
    for (const auto& l : f.locals) {
      declare(l);
      wf(l.ty, f.ty_params, &f.region_params, false, f.loc, f.name);
    }
    if (f.body) stmt(*f.body);
    fn_ = nullptr;
  }

  void err(const std::string& code, const std::string& msg, SrcLoc loc) { diag(code, msg, loc, fn_->name); }

  std::optional<Ty> place_ty(Place& p, SrcLoc loc) {
    Ty t;
    std::string e;
    if (!type_of_place(p_, *fn_, p, t, e)) {
      err(e.rfind("unknown variable", 0) == 0 ? "UNKNOWN_VAR" : "TYPE_ERROR", e, loc);
      return std::nullopt;
    }
    return t;
  }

  std::optional<Ty> synth(Operand& o, SrcLoc loc) {
    switch (o.kind) {
    case Operand::Kind::Move:
    case Operand::Kind::Copy: return place_ty(o.place, loc);
    case Operand::Kind::ConstBool: return Ty::boolean();
    case Operand::Kind::ConstInt:
      if (o.int_ty == Ty::Kind::I32 || o.int_ty == Ty::Kind::U32) return Ty{o.int_ty, {}, {}};
      return std::nullopt;
    case Operand::Kind::Tuple: {
      std::vector<Ty> ts;
      for (auto& e : o.elems) {
        auto t = synth(e, loc);
        if (!t) return std::nullopt;
        ts.push_back(*t);
      }
      return Ty::tuple(ts);
    }
    case Operand::Kind::BoxNew: {
      auto t = synth(o.elems.at(0), loc);
      if (!t) return std::nullopt;
      return Ty::box(*t);
    }
    case Operand::Kind::Ctor: {
      const TypeDecl* td = p_.ctor_owner(o.ctor);
      if (td && td->ty_params.empty()) return Ty::adt(td->name, {});
      return std::nullopt;
    }
    }
    return std::nullopt;
  }

  void check_operand(Operand& o, const Ty& expected, SrcLoc loc) {
    auto mismatch = [&](const std::string& what) {
      err("TYPE_ERROR", what + " where " + expected.str() + " was expected", loc);
    };
    switch (o.kind) {
    case Operand::Kind::Move:
    case Operand::Kind::Copy: {
      auto t = place_ty(o.place, loc);
      if (t && !same_shape(*t, expected)) mismatch(o.place.str() + " of type " + t->str());
      return;
    }
    case Operand::Kind::ConstBool:
      if (expected.kind != Ty::Kind::Bool) mismatch("boolean literal");
      return;
    case Operand::Kind::ConstInt:
      if (!expected.is_int()) {
        mismatch("integer literal");
        return;
      }
      if (o.int_ty != Ty::Kind::Tuple && o.int_ty != expected.kind) {
        mismatch("integer literal of type " + Ty{o.int_ty, {}, {}}.str());
        return;
      }
      o.int_ty = expected.kind;
      if (!fits(o.n, o.int_ty)) err("LITERAL_RANGE", "literal " + std::to_string(o.n) + " out of range", loc);
      return;
    case Operand::Kind::Tuple:
      if (expected.kind != Ty::Kind::Tuple || expected.args.size() != o.elems.size()) {
        mismatch("tuple of " + std::to_string(o.elems.size()) + " elements");
        return;
      }
      for (size_t i = 0; i < o.elems.size(); ++i) check_operand(o.elems[i], expected.args[i], loc);
      return;
    case Operand::Kind::BoxNew:
      if (expected.kind != Ty::Kind::Box) {
        mismatch("box");
        return;
      }
      check_operand(o.elems.at(0), expected.inner(), loc);
      return;
    case Operand::Kind::Ctor: {
      const TypeDecl* td = p_.ctor_owner(o.ctor);
      if (!td) {
        err("UNKNOWN_CTOR", "unknown constructor " + o.ctor, loc);
        return;
      }
      if (expected.kind != Ty::Kind::Adt || expected.name != td->name) {
        mismatch("constructor " + o.ctor);
        return;
      }
      const CtorDecl& cd = td->ctors[static_cast<size_t>(td->ctor_index(o.ctor))];
      if (cd.fields.size() != o.elems.size()) {
        err("ARITY_MISMATCH", "constructor " + o.ctor + " takes " + std::to_string(cd.fields.size()) + " fields", loc);
        return;
      }
      auto fts = ctor_field_types(*td, cd, expected.args);
      for (size_t i = 0; i < o.elems.size(); ++i) check_operand(o.elems[i], fts[i], loc);
      return;
    }
    }
  }

  void check_rvalue(Rvalue& rv, const Ty& expected, SrcLoc loc) {
    switch (rv.kind) {
    case Rvalue::Kind::Use: check_operand(rv.ops.at(0), expected, loc); return;
    case Rvalue::Kind::MutBorrow:
    case Rvalue::Kind::ReservedBorrow:
    case Rvalue::Kind::SharedBorrow: {
      auto t = place_ty(rv.place, loc);
      if (!t) return;
      Ty::Kind want = rv.kind == Rvalue::Kind::SharedBorrow ? Ty::Kind::SharedRef : Ty::Kind::MutRef;
      if (expected.kind != want || !same_shape(expected.inner(), *t))
        err("TYPE_ERROR", "borrow of " + t->str() + " where " + expected.str() + " was expected", loc);
      return;
    }
    case Rvalue::Kind::Unop:
      if (rv.unop == UnOp::Not) {
        if (expected.kind != Ty::Kind::Bool) err("TYPE_ERROR", "negation yields bool, " + expected.str() + " expected", loc);
        check_operand(rv.ops.at(0), Ty::boolean(), loc);
      } else {
        if (expected.kind != Ty::Kind::I32) err("TYPE_ERROR", "arithmetic negation is defined on i32 only", loc);
        check_operand(rv.ops.at(0), Ty::i32(), loc);
      }
      return;
    case Rvalue::Kind::Binop: {
      if (binop_is_cmp(rv.binop)) {
        if (expected.kind != Ty::Kind::Bool) err("TYPE_ERROR", "comparison yields bool, " + expected.str() + " expected", loc);
        auto t = synth(rv.ops[0], loc);
        if (!t) t = synth(rv.ops[1], loc);
        Ty ot = t ? *t : Ty::i32();
        bool eq = rv.binop == BinOp::Eq || rv.binop == BinOp::Ne;
        if (!ot.is_int() && !(eq && ot.kind == Ty::Kind::Bool)) {
          err("TYPE_ERROR", std::string("operator ") + binop_str(rv.binop) + " not defined on " + ot.str(), loc);
          return;
        }
        check_operand(rv.ops[0], ot, loc);
        check_operand(rv.ops[1], ot, loc);
      } else {
        if (!expected.is_int()) {
          err("TYPE_ERROR", std::string("operator ") + binop_str(rv.binop) + " yields an integer, " + expected.str() +
                                " expected", loc);
          return;
        }
        check_operand(rv.ops[0], expected, loc);
        check_operand(rv.ops[1], expected, loc);
      }
      return;
    }
    }
  }

  void stmt(Stmt& s) {
    switch (s.kind) {
    case Stmt::Kind::Nop:
    case Stmt::Kind::Return:
    case Stmt::Kind::Panic: return;
    case Stmt::Kind::Seq:
      for (auto& k : s.kids) stmt(k);
      return;
    case Stmt::Kind::Assign: {
      auto t = place_ty(s.place, s.loc);
      if (t) check_rvalue(s.rv, *t, s.loc);
      return;
    }
    case Stmt::Kind::Free: {
      auto t = place_ty(s.place, s.loc);
      if (t && t->kind != Ty::Kind::Box) err("TYPE_ERROR", "free expects a box, got " + t->str(), s.loc);
      return;
    }
    case Stmt::Kind::If:
      check_operand(s.cond, Ty::boolean(), s.loc);
      for (auto& k : s.kids) stmt(k);
      return;
    case Stmt::Kind::Match: {
      auto t = place_ty(s.place, s.loc);
      for (auto& k : s.kids) stmt(k);
      if (!t) return;
      if (t->kind != Ty::Kind::Adt) {
        err("TYPE_ERROR", "match on non-data type " + t->str(), s.loc);
        return;
      }
      const TypeDecl* td = p_.find_type(t->name);
      if (!td) return;
      std::set<std::string> seen;
      for (size_t i = 0; i < s.arm_ctors.size(); ++i) {
        const std::string& c = s.arm_ctors[i];
        int ci = td->ctor_index(c);
        if (ci < 0) {
          err("UNKNOWN_CTOR", "type " + td->name + " has no constructor " + c, s.loc);
          continue;
        }
        if (!seen.insert(c).second) err("DUPLICATE_ARM", "constructor " + c + " matched twice", s.loc);
        if (i < s.arm_hints.size() && s.arm_hints[i].size() > td->ctors[static_cast<size_t>(ci)].fields.size())
          err("ARITY_MISMATCH", "too many binder names for " + c, s.loc);
      }
      for (const auto& c : td->ctors)
        if (!seen.count(c.name)) err("INCOMPLETE_MATCH", "missing arm for constructor " + c.name, s.loc);
      return;
    }
    case Stmt::Kind::Call: {
      const FnDecl* callee = p_.find_fn(s.fn);
      if (!callee) {
        err("UNKNOWN_FN", "unknown function " + s.fn, s.loc);
        return;
      }
      if (callee->args.size() != s.args.size()) {
        err("ARITY_MISMATCH", s.fn + " takes " + std::to_string(callee->args.size()) + " arguments", s.loc);
        return;
      }
      if (callee->ty_params.size() != s.ty_args.size()) {
        err("TY_ARG_MISMATCH", s.fn + " takes " + std::to_string(callee->ty_params.size()) + " type arguments", s.loc);
        return;
      }
      if (!s.region_args.empty() && s.region_args.size() != callee->region_params.size())
        err("ARITY_MISMATCH", s.fn + " takes " + std::to_string(callee->region_params.size()) + " region arguments",
            s.loc);
      std::map<std::string, Ty> sub;
      for (size_t i = 0; i < s.ty_args.size(); ++i) {
        wf(s.ty_args[i], fn_->ty_params, nullptr, false, s.loc, fn_->name);
        if (contains_borrow(s.ty_args[i]))
          err("BORROW_TY_ARG", "type argument " + s.ty_args[i].str() + " contains a borrow", s.loc);
        sub[callee->ty_params[i]] = s.ty_args[i];
      }
      for (size_t i = 0; i < s.args.size(); ++i) check_operand(s.args[i], subst_ty(callee->args[i].ty, sub), s.loc);
      auto t = place_ty(s.place, s.loc);
      Ty rt = subst_ty(callee->ret.ty, sub);
      if (t && !same_shape(*t, rt))
        err("TYPE_ERROR", "call result of type " + rt.str() + " assigned to " + t->str(), s.loc);
      return;
    }
    }
  }

  Program& p_;
  FnDecl* fn_ = nullptr;
  std::vector<Diagnostic> diags_;
};

} // namespace

std::vector<Diagnostic> validate(Program& p) { return Validator(p).run(); }

} // namespace llbc
