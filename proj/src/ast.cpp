// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "llbc/ast.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "llbc/error.hpp"

namespace llbc {

std::string SrcLoc::str() const { return std::to_string(line) + ":" + std::to_string(col); }

std::string Diagnostic::str() const {
  std::string s = code;
  if (!where.empty()) s += " in " + where;
  if (loc.line > 0) s += " at " + loc.str();
  if (!message.empty()) s += ": " + message;
  return s;
}

std::string Ty::str() const {
  switch (kind) {
  case Kind::Bool: return "bool";
  case Kind::I32: return "i32";
  case Kind::U32: return "u32";
  case Kind::MutRef: return "&" + (name.empty() ? "" : "'" + name + " ") + "mut " + inner().str();
  case Kind::SharedRef: return "&" + (name.empty() ? "" : "'" + name + " ") + inner().str();
  case Kind::Box: return "Box<" + inner().str() + ">";
  case Kind::Var: return name;
  case Kind::Adt: {
    std::string s = name;
    if (!args.empty()) {
      s += "<";
      for (size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
      s += ">";
    }
    return s;
  }
  case Kind::Tuple: {
    std::string s = "(";
    for (size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
    return s + ")";
  }
  }
  return "?";
}

bool same_shape(const Ty& a, const Ty& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if ((a.kind == Ty::Kind::Adt || a.kind == Ty::Kind::Var) && a.name != b.name) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!same_shape(a.args[i], b.args[i])) return false;
  return true;
}

bool contains_borrow(const Ty& t) {
  if (t.is_ref()) return true;
  return std::any_of(t.args.begin(), t.args.end(), contains_borrow);
}

bool contains_mut_borrow(const Ty& t) {
  if (t.kind == Ty::Kind::MutRef) return true;
  return std::any_of(t.args.begin(), t.args.end(), contains_mut_borrow);
}

bool mentions_region(const Ty& t, const std::string& region) {
  if (t.is_ref() && t.name == region) return true;
  return std::any_of(t.args.begin(), t.args.end(), [&](const Ty& a) { return mentions_region(a, region); });
}

Ty subst_ty(const Ty& t, const std::map<std::string, Ty>& tyvars) {
  if (t.kind == Ty::Kind::Var) {
    auto it = tyvars.find(t.name);
    return it == tyvars.end() ? t : it->second;
  }
  Ty r = t;
  for (auto& a : r.args) a = subst_ty(a, tyvars);
  return r;
}

Ty erase_regions(const Ty& t) {
  Ty r = t;
  if (r.is_ref()) r.name.clear();
  for (auto& a : r.args) a = erase_regions(a);
  return r;
}

bool Proj::operator==(const Proj& o) const {
  if (is_deref() && o.is_deref()) return true;
  if (kind != o.kind) return false;
  if (kind == Kind::TupleField) return index == o.index;
  return ctor == o.ctor && field == o.field;
}

std::string Place::str() const {
  std::string s = base;
  for (const auto& p : path) {
    switch (p.kind) {
    case Proj::Kind::Deref:
    case Proj::Kind::DerefMut:
    case Proj::Kind::DerefShared:
    case Proj::Kind::DerefBox:
      s = "(*" + s + ")";
      break;
    case Proj::Kind::Field: s += "." + p.ctor + "." + p.field; break;
    case Proj::Kind::TupleField: s += "." + std::to_string(p.index); break;
    }
  }
  // The outermost parentheses are redundant.
  if (s.size() > 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool wraps = true;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0 && i + 1 < s.size()) {
        wraps = false;
        break;
      }
    }
    if (wraps) s = s.substr(1, s.size() - 2);
  }
  return s;
}

static std::string int_lit(int64_t n, Ty::Kind k) {
  std::string s = std::to_string(n);
  if (k == Ty::Kind::I32) s += "i32";
  if (k == Ty::Kind::U32) s += "u32";
  return s;
}

std::string Operand::str() const {
  switch (kind) {
  case Kind::Move: return "move " + place.str();
  case Kind::Copy: return "copy " + place.str();
  case Kind::ConstBool: return b ? "true" : "false";
  case Kind::ConstInt: return int_lit(n, int_ty);
  case Kind::BoxNew: return "Box::new(" + elems.at(0).str() + ")";
  case Kind::Ctor: {
    if (elems.empty()) return ctor;
    std::string s = ctor + "(";
    for (size_t i = 0; i < elems.size(); ++i) s += (i ? ", " : "") + elems[i].str();
    return s + ")";
  }
  case Kind::Tuple: {
    std::string s = "(";
    for (size_t i = 0; i < elems.size(); ++i) s += (i ? ", " : "") + elems[i].str();
    return s + ")";
  }
  }
  return "?";
}

const char* binop_str(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Div: return "/";
  case BinOp::Rem: return "%";
  case BinOp::Eq: return "==";
  case BinOp::Ne: return "!=";
  case BinOp::Lt: return "<";
  case BinOp::Le: return "<=";
  case BinOp::Gt: return ">";
  case BinOp::Ge: return ">=";
  }
  return "?";
}

bool binop_is_cmp(BinOp op) { return op >= BinOp::Eq; }

std::string Rvalue::str() const {
  switch (kind) {
  case Kind::Use: return ops.at(0).str();
  case Kind::MutBorrow: return "&mut " + place.str();
  case Kind::SharedBorrow: return "&" + place.str();
  case Kind::ReservedBorrow: return "&reserved " + place.str();
  case Kind::Unop: return std::string(unop == UnOp::Not ? "!" : "-") + ops.at(0).str();
  case Kind::Binop: return ops.at(0).str() + " " + binop_str(binop) + " " + ops.at(1).str();
  }
  return "?";
}

Stmt Stmt::seq(Stmt a, Stmt b) {
  Stmt s;
  s.kind = Kind::Seq;
  s.kids = {std::move(a), std::move(b)};
  return s;
}

Stmt Stmt::assign(Place p, Rvalue rv) {
  Stmt s;
  s.kind = Kind::Assign;
  s.place = std::move(p);
  s.rv = std::move(rv);
  return s;
}

Stmt Stmt::if_(Operand c, Stmt t, Stmt e) {
  Stmt s;
  s.kind = Kind::If;
  s.cond = std::move(c);
  s.kids = {std::move(t), std::move(e)};
  return s;
}

bool Stmt::operator==(const Stmt& o) const {
  return kind == o.kind && place == o.place && rv == o.rv && fn == o.fn && region_args == o.region_args &&
         ty_args == o.ty_args && args == o.args && cond == o.cond && kids == o.kids && arm_ctors == o.arm_ctors &&
         arm_hints == o.arm_hints;
}

static void flatten_into(const Stmt& s, std::vector<Stmt>& out) {
  if (s.kind == Stmt::Kind::Seq) {
    for (const auto& k : s.kids) flatten_into(k, out);
  } else if (s.kind != Stmt::Kind::Nop) {
    out.push_back(s);
  }
}

std::vector<Stmt> flatten(const Stmt& s) {
  std::vector<Stmt> out;
  flatten_into(s, out);
  return out;
}

Stmt from_list(std::vector<Stmt> stmts) {
  if (stmts.empty()) return Stmt::nop();
  Stmt acc = std::move(stmts.back());
  for (size_t i = stmts.size() - 1; i-- > 0;) acc = Stmt::seq(std::move(stmts[i]), std::move(acc));
  return acc;
}

bool FnDecl::operator==(const FnDecl& o) const {
  return name == o.name && region_params == o.region_params && ty_params == o.ty_params && args == o.args &&
         locals == o.locals && ret == o.ret && body == o.body;
}

const Ty* FnDecl::var_type(const std::string& n) const {
  for (const auto& a : args)
    if (a.name == n) return &a.ty;
  for (const auto& l : locals)
    if (l.name == n) return &l.ty;
  if (ret.name == n) return &ret.ty;
  return nullptr;
}

bool TypeDecl::operator==(const TypeDecl& o) const {
  return name == o.name && ty_params == o.ty_params && ctors == o.ctors && is_struct == o.is_struct;
}

int TypeDecl::ctor_index(const std::string& c) const {
  for (size_t i = 0; i < ctors.size(); ++i)
    if (ctors[i].name == c) return static_cast<int>(i);
  return -1;
}

const TypeDecl* Program::find_type(const std::string& n) const {
  for (const auto& t : types)
    if (t.name == n) return &t;
  return nullptr;
}

const FnDecl* Program::find_fn(const std::string& n) const {
  for (const auto& f : fns)
    if (f.name == n) return &f;
  return nullptr;
}

const TypeDecl* Program::ctor_owner(const std::string& c) const {
  for (const auto& t : types)
    if (t.ctor_index(c) >= 0) return &t;
  return nullptr;
}

static void collect_callees(const Stmt& s, std::vector<std::string>& out) {
  if (s.kind == Stmt::Kind::Call) out.push_back(s.fn);
  for (const auto& k : s.kids) collect_callees(k, out);
}

void compute_groups(Program& p) {
  const size_t n = p.fns.size();
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < n; ++i) idx[p.fns[i].name] = i;
  std::vector<std::vector<size_t>> succ(n);
  for (size_t i = 0; i < n; ++i) {
    if (!p.fns[i].body) continue;
    std::vector<std::string> callees;
    collect_callees(*p.fns[i].body, callees);
    for (const auto& c : callees) {
      auto it = idx.find(c);
      if (it != idx.end() && std::find(succ[i].begin(), succ[i].end(), it->second) == succ[i].end())
        succ[i].push_back(it->second);
    }
  }
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on(n, false);
  std::vector<size_t> stack;
  int counter = 0;
  p.fn_groups.clear();
  std::function<void(size_t)> strong = [&](size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (size_t w : succ[v]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<size_t> comp;
      size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      std::vector<std::string> names;
      for (size_t c : comp) names.push_back(p.fns[c].name);
      p.fn_groups.push_back(std::move(names));
    }
  };
  for (size_t i = 0; i < n; ++i)
    if (index[i] < 0) strong(i);
}

std::vector<Ty> ctor_field_types(const TypeDecl& td, const CtorDecl& cd, const std::vector<Ty>& args) {
  std::map<std::string, Ty> m;
  for (size_t i = 0; i < td.ty_params.size() && i < args.size(); ++i) m[td.ty_params[i]] = args[i];
  std::vector<Ty> out;
  for (const auto& f : cd.fields) out.push_back(subst_ty(f, m));
  return out;
}

} // namespace llbc
