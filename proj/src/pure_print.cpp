// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Printers for pure programs: an F*-like style following the usual Aeneas
// conventions and a neutral ML style that read_neutral parses back.

#include <sstream>

#include "llbc/pure.hpp"

namespace llbc::pure {

namespace {

constexpr size_t kLine = 80;

std::string pad(int n) { return std::string(static_cast<size_t>(n), ' '); }

bool multiline(const std::string& s) { return s.find('\n') != std::string::npos; }

const char* infix(const std::string& op) {
  if (op == "eq") return "=";
  if (op == "ne") return "<>";
  if (op == "lt") return "<";
  if (op == "le") return "<=";
  if (op == "gt") return ">";
  if (op == "ge") return ">=";
  return nullptr;
}

std::string const_str(const Expr& e, Style s) {
  if (e.cty == Ty::Kind::Bool) return e.b ? "true" : "false";
  std::string n = std::to_string(e.n);
  if (s == Style::Neutral) return n + (e.cty == Ty::Kind::U32 ? "u32" : "i32");
  return e.n < 0 ? "(" + n + ")" : n;
}

std::string pat_const_str(const Pattern& p, Style s) {
  Expr e = p.cty == Ty::Kind::Bool ? Expr::boolean(p.b) : Expr::integer(p.n, p.cty);
  return const_str(e, s);
}

// ---- types ----

std::string ty_str(const PTy& t, Style s, bool atom);

std::string ty_list(const std::vector<PTy>& ts, Style s, const char* sep) {
  std::string out;
  for (size_t i = 0; i < ts.size(); ++i) out += (i ? sep : "") + ty_str(ts[i], s, false);
  return out;
}

std::string ty_str(const PTy& t, Style s, bool atom) {
  switch (t.kind) {
  case Ty::Kind::Bool: return "bool";
  case Ty::Kind::I32: return "i32";
  case Ty::Kind::U32: return "u32";
  case Ty::Kind::Var: return t.name;
  case Ty::Kind::Tuple:
    if (t.args.empty()) return "unit";
    return "(" + ty_list(t.args, s, s == Style::FStar ? " & " : " * ") + ")";
  case Ty::Kind::Adt: {
    if (t.args.empty()) return t.name;
    if (s == Style::Neutral) return t.name + "<" + ty_list(t.args, s, ", ") + ">";
    std::string r = t.name;
    for (const auto& a : t.args) r += " " + ty_str(a, s, true);
    return atom ? "(" + r + ")" : r;
  }
  default: return "<" + t.str() + ">";
  }
}

// ---- patterns ----

std::string pat_str(const Pattern& p, Style s, bool atom) {
  switch (p.kind) {
  case Pattern::Kind::Wild: return "_";
  case Pattern::Kind::Var: return p.name;
  case Pattern::Kind::Const: return pat_const_str(p, s);
  case Pattern::Kind::Tuple: {
    std::string r = "(";
    for (size_t i = 0; i < p.kids.size(); ++i) r += (i ? ", " : "") + pat_str(p.kids[i], s, false);
    return r + ")";
  }
  case Pattern::Kind::Ctor: {
    if (p.kids.empty()) return p.name;
    if (s == Style::Neutral) {
      std::string r = p.name + "(";
      for (size_t i = 0; i < p.kids.size(); ++i) r += (i ? ", " : "") + pat_str(p.kids[i], s, false);
      return r + ")";
    }
    std::string r = p.name;
    for (const auto& k : p.kids) r += " " + pat_str(k, s, true);
    return atom ? "(" + r + ")" : r;
  }
  }
  return "_";
}

// ---- expressions ----

class Printer {
public:
  explicit Printer(Style s) : s_(s) {}

  // The first line is not indented; following lines are indented relative to ind.
  std::string expr(const Expr& e, int ind) { return s_ == Style::FStar ? fs(e, ind) : nt(e, ind); }

private:
  bool fs_atomic(const Expr& e) const {
    switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Const:
    case Expr::Kind::Tuple:
    case Expr::Kind::Fail: return true;
    case Expr::Kind::Ctor: return e.kids.empty();
    case Expr::Kind::Prim: return infix(e.name) != nullptr;
    default: return false;
    }
  }

  std::string fs_atom(const Expr& e, int ind) {
    std::string r = fs(e, ind);
    return fs_atomic(e) ? r : "(" + r + ")";
  }

  std::string fs_app(const std::string& head, const std::vector<std::string>& args) {
    std::string r = head;
    for (const auto& a : args) r += " " + a;
    return r;
  }

  std::string fs(const Expr& e, int ind) {
    switch (e.kind) {
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Const: return const_str(e, s_);
    case Expr::Kind::Tuple: {
      std::string r = "(";
      for (size_t i = 0; i < e.kids.size(); ++i) r += (i ? ", " : "") + fs(e.kids[i], ind);
      return r + ")";
    }
    case Expr::Kind::Ctor: {
      std::vector<std::string> as;
      for (const auto& k : e.kids) as.push_back(fs_atom(k, ind));
      return fs_app(e.name, as);
    }
    case Expr::Kind::Prim: {
      if (const char* op = infix(e.name)) return "(" + fs_atom(e.kids[0], ind) + " " + op + " " + fs_atom(e.kids[1], ind) + ")";
      std::vector<std::string> as;
      for (const auto& k : e.kids) as.push_back(fs_atom(k, ind));
      return fs_app(e.name, as);
    }
    case Expr::Kind::Call: {
      std::vector<std::string> as;
      for (const auto& t : e.ty_args) as.push_back(ty_str(t, s_, true));
      for (const auto& k : e.kids) as.push_back(fs_atom(k, ind));
      return fs_app(e.name, as);
    }
    case Expr::Kind::Ret: return "Return " + fs_atom(e.kids[0], ind);
    case Expr::Kind::Fail: return "Fail";
    case Expr::Kind::Let:
      return "let " + pat_str(e.pats[0], s_, false) + " = " + fs(e.kids[0], ind + 2) + " in\n" + pad(ind) +
             fs(e.kids[1], ind);
    case Expr::Kind::Bind: {
      std::string rhs = fs(e.kids[0], ind + 2);
      if (multiline(rhs)) rhs = "begin\n" + pad(ind + 2) + fs(e.kids[0], ind + 2) + "\n" + pad(ind) + "end";
      std::string head = e.pats[0].kind == Pattern::Kind::Wild ? rhs : pat_str(e.pats[0], s_, false) + " <-- " + rhs;
      return head + ";\n" + pad(ind) + fs(e.kids[1], ind);
    }
    case Expr::Kind::If: {
      std::string c = fs(e.kids[0], ind + 3);
      std::string a = fs(e.kids[1], ind + 2), b = fs(e.kids[2], ind + 2);
      std::string flat = "if " + c + " then " + a + " else " + b;
      if (!multiline(flat) && flat.size() + static_cast<size_t>(ind) <= kLine) return flat;
      return "if " + c + "\n" + pad(ind) + "then begin\n" + pad(ind + 2) + a + "\n" + pad(ind) + "end\n" + pad(ind) +
             "else begin\n" + pad(ind + 2) + b + "\n" + pad(ind) + "end";
    }
    case Expr::Kind::Match: {
      std::string r = "begin match " + fs(e.kids[0], ind + 12) + " with";
      for (size_t i = 0; i < e.pats.size(); ++i) {
        std::string body = fs(e.kids[i + 1], ind + 2);
        r += "\n" + pad(ind) + "| " + pat_str(e.pats[i], s_, false) + " ->";
        r += multiline(body) ? "\n" + pad(ind + 2) + body : " " + body;
      }
      return r + "\n" + pad(ind) + "end";
    }
    }
    return "?";
  }

  std::string nt_list(const std::vector<Expr>& es, int ind) {
    std::string r;
    for (size_t i = 0; i < es.size(); ++i) r += (i ? ", " : "") + nt(es[i], ind);
    return r;
  }

  // Operand of return: anything binding-like gets parentheses.
  std::string nt_operand(const Expr& e, int ind) {
    bool open = e.kind == Expr::Kind::Let || e.kind == Expr::Kind::Bind || e.kind == Expr::Kind::If ||
                e.kind == Expr::Kind::Match || e.kind == Expr::Kind::Ret;
    std::string r = nt(e, ind);
    return open ? "(" + r + ")" : r;
  }

  std::string nt(const Expr& e, int ind) {
    switch (e.kind) {
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Const: return const_str(e, s_);
    case Expr::Kind::Tuple: return "(" + nt_list(e.kids, ind) + ")";
    case Expr::Kind::Ctor: return e.kids.empty() ? e.name : e.name + "(" + nt_list(e.kids, ind) + ")";
    case Expr::Kind::Prim: return e.name + "(" + nt_list(e.kids, ind) + ")";
    case Expr::Kind::Call: {
      std::string r = e.name;
      if (!e.ty_args.empty()) r += "[" + ty_list(e.ty_args, s_, ", ") + "]";
      return r + "(" + nt_list(e.kids, ind) + ")";
    }
    case Expr::Kind::Ret: return "return " + nt_operand(e.kids[0], ind);
    case Expr::Kind::Fail: return "fail";
    case Expr::Kind::Let:
    case Expr::Kind::Bind:
      return std::string(e.kind == Expr::Kind::Let ? "let " : "let* ") + pat_str(e.pats[0], s_, false) + " = " +
             nt(e.kids[0], ind + 2) + " in\n" + pad(ind) + nt(e.kids[1], ind);
    case Expr::Kind::If: {
      std::string c = nt(e.kids[0], ind + 3);
      std::string a = nt(e.kids[1], ind + 2), b = nt(e.kids[2], ind + 2);
      std::string flat = "if " + c + " then " + a + " else " + b;
      if (!multiline(flat) && flat.size() + static_cast<size_t>(ind) <= kLine) return flat;
      return "if " + c + " then\n" + pad(ind + 2) + a + "\n" + pad(ind) + "else\n" + pad(ind + 2) + b;
    }
    case Expr::Kind::Match: {
      std::string r = "match " + nt(e.kids[0], ind + 6) + " with";
      for (size_t i = 0; i < e.pats.size(); ++i) {
        std::string body = nt(e.kids[i + 1], ind + 2);
        r += "\n" + pad(ind) + "| " + pat_str(e.pats[i], s_, false) + " ->";
        r += multiline(body) ? "\n" + pad(ind + 2) + body : " " + body;
      }
      return r + "\n" + pad(ind) + "end";
    }
    }
    return "?";
  }

  Style s_;
};

std::string type_decl(const TypeDef& t, Style s) {
  std::string r = "type " + t.name;
  if (s == Style::FStar) {
    for (const auto& p : t.ty_params) r += " (" + p + " : Type)";
    r += " =";
    PTy self = Ty::adt(t.name, {});
    for (const auto& p : t.ty_params) self.args.push_back(Ty::var(p));
    for (const auto& c : t.ctors) {
      r += "\n| " + c.name + " :";
      for (const auto& f : c.fields) r += " " + ty_str(f, s, f.kind == Ty::Kind::Tuple ? false : true) + " ->";
      r += " " + ty_str(self, s, false);
    }
    return r + "\n";
  }
  if (!t.ty_params.empty()) {
    r += "<";
    for (size_t i = 0; i < t.ty_params.size(); ++i) r += (i ? ", " : "") + t.ty_params[i];
    r += ">";
  }
  r += " =";
  for (const auto& c : t.ctors) {
    r += "\n  | " + c.name;
    if (!c.fields.empty()) r += "(" + ty_list(c.fields, s, ", ") + ")";
  }
  return r + "\n";
}

std::string fun_header(const FunDef& f, Style s, const std::string& kw) {
  std::string r = kw + " " + f.name;
  if (s == Style::FStar) {
    for (const auto& p : f.ty_params) r += " (" + p + " : Type)";
    for (const auto& p : f.params) r += " (" + p.name + " : " + ty_str(p.ty, s, false) + ")";
    return r + " : result " + ty_str(f.ret, s, true);
  }
  if (!f.ty_params.empty()) {
    r += "<";
    for (size_t i = 0; i < f.ty_params.size(); ++i) r += (i ? ", " : "") + f.ty_params[i];
    r += ">";
  }
  r += "(";
  for (size_t i = 0; i < f.params.size(); ++i) r += (i ? ", " : "") + f.params[i].name + " : " + ty_str(f.params[i].ty, s, false);
  return r + ") : " + ty_str(f.ret, s, false);
}

std::string fun_decl(const FunDef& f, Style s, const std::string& kw) {
  if (!f.body) return fun_header(f, s, "val") + "\n";
  Printer pr(s);
  return fun_header(f, s, kw) + " =\n  " + pr.expr(*f.body, 2) + "\n";
}

} // namespace

std::string print_ty(const PTy& t, Style s) { return ty_str(t, s, false); }

std::string print_expr(const Expr& e, Style s) {
  Printer pr(s);
  return pr.expr(e, 0);
}

std::string print_program(const Program& p, Style s) {
  std::ostringstream os;
  os << "module Translated\n";
  for (const auto& t : p.types) os << "\n" << type_decl(t, s);
  std::vector<bool> done(p.funs.size(), false);
  auto index = [&](const std::string& n) -> int {
    for (size_t i = 0; i < p.funs.size(); ++i)
      if (p.funs[i].name == n) return static_cast<int>(i);
    return -1;
  };
  auto emit_group = [&](const std::vector<int>& idx, bool rec) {
    bool first = true;
    for (int i : idx) {
      const FunDef& f = p.funs[static_cast<size_t>(i)];
      done[static_cast<size_t>(i)] = true;
      if (!f.body) {
        os << "\n" << fun_decl(f, s, "val");
        continue;
      }
      std::string kw = first ? (rec ? "let rec" : "let") : "and";
      if (rec && s == Style::FStar) os << "\n(* decreases: measure not emitted, evaluation is fuel-bounded *)";
      os << "\n" << fun_decl(f, s, kw);
      first = false;
    }
  };
  for (size_t g = 0; g < p.groups.size(); ++g) {
    std::vector<int> idx;
    for (const auto& n : p.groups[g]) {
      int i = index(n);
      if (i >= 0 && !done[static_cast<size_t>(i)]) idx.push_back(i);
    }
    // Non-recursive groups print as independent declarations.
    bool rec = g < p.group_rec.size() && p.group_rec[g];
    if (rec) {
      emit_group(idx, true);
    } else {
      for (int i : idx) emit_group({i}, false);
    }
  }
  for (size_t i = 0; i < p.funs.size(); ++i)
    if (!done[i]) emit_group({static_cast<int>(i)}, false);
  return os.str();
}

} // namespace llbc::pure
