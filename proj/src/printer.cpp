// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "llbc/syntax.hpp"

namespace llbc {
namespace {

std::string pad(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

bool positional(const CtorDecl& c) {
  for (size_t i = 0; i < c.field_names.size(); ++i)
    if (c.field_names[i] != std::to_string(i)) return false;
  return true;
}

std::string generics(const std::vector<std::string>& regions, const std::vector<std::string>& tys) {
  if (regions.empty() && tys.empty()) return "";
  std::string s = "<";
  bool first = true;
  for (const auto& r : regions) {
    s += (first ? "'" : ", '") + r;
    first = false;
  }
  for (const auto& t : tys) {
    s += (first ? "" : ", ") + t;
    first = false;
  }
  return s + ">";
}

void print_stmt(std::ostringstream& os, const Stmt& s, int ind);

void print_block(std::ostringstream& os, const Stmt& s, int ind) {
  if (s.kind == Stmt::Kind::Nop) {
    os << "{}";
    return;
  }
  os << "{\n";
  print_stmt(os, s, ind + 1);
  os << pad(ind) << "}";
}

void print_seq(std::ostringstream& os, const Stmt& s, int ind) {
  const Stmt& a = s.kids[0];
  if (a.kind == Stmt::Kind::Seq) {
    os << pad(ind);
    print_block(os, a, ind);
    os << "\n";
  } else {
    print_stmt(os, a, ind);
  }
  const Stmt& b = s.kids[1];
  if (b.kind == Stmt::Kind::Seq) {
    print_seq(os, b, ind);
  } else {
    print_stmt(os, b, ind);
  }
}

void print_stmt(std::ostringstream& os, const Stmt& s, int ind) {
  switch (s.kind) {
  case Stmt::Kind::Nop: os << pad(ind) << "nop;\n"; return;
  case Stmt::Kind::Seq: print_seq(os, s, ind); return;
  case Stmt::Kind::Assign: os << pad(ind) << s.place.str() << " = " << s.rv.str() << ";\n"; return;
  case Stmt::Kind::Call: {
    os << pad(ind) << s.place.str() << " = " << s.fn;
    if (!s.region_args.empty() || !s.ty_args.empty()) {
      os << "::<";
      bool first = true;
      for (const auto& r : s.region_args) {
        os << (first ? "'" : ", '") << r;
        first = false;
      }
      for (const auto& t : s.ty_args) {
        os << (first ? "" : ", ") << t.str();
        first = false;
      }
      os << ">";
    }
    os << "(";
    for (size_t i = 0; i < s.args.size(); ++i) os << (i ? ", " : "") << s.args[i].str();
    os << ");\n";
    return;
  }
  case Stmt::Kind::If:
    os << pad(ind) << "if " << s.cond.str() << " ";
    print_block(os, s.kids[0], ind);
    if (s.kids[1].kind != Stmt::Kind::Nop) {
      os << " else ";
      print_block(os, s.kids[1], ind);
    }
    os << "\n";
    return;
  case Stmt::Kind::Match:
    os << pad(ind) << "match " << s.place.str() << " {\n";
    for (size_t i = 0; i < s.kids.size(); ++i) {
      os << pad(ind + 1) << s.arm_ctors[i];
      if (i < s.arm_hints.size() && !s.arm_hints[i].empty()) {
        os << "(";
        for (size_t j = 0; j < s.arm_hints[i].size(); ++j) os << (j ? ", " : "") << s.arm_hints[i][j];
        os << ")";
      }
      os << " => ";
      print_block(os, s.kids[i], ind + 1);
      os << "\n";
    }
    os << pad(ind) << "}\n";
    return;
  case Stmt::Kind::Return: os << pad(ind) << "return;\n"; return;
  case Stmt::Kind::Panic: os << pad(ind) << "panic;\n"; return;
  case Stmt::Kind::Free: os << pad(ind) << "free(" << s.place.str() << ");\n"; return;
  }
}

std::string vars(const std::vector<Var>& vs) {
  std::string s;
  for (size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + vs[i].name + ": " + vs[i].ty.str();
  return s;
}

} // namespace

std::string pretty_stmt(const Stmt& s, int indent) {
  std::ostringstream os;
  print_stmt(os, s, indent);
  return os.str();
}

std::string pretty_fn(const FnDecl& f) {
  std::ostringstream os;
  os << "fn " << f.name << generics(f.region_params, f.ty_params) << "(" << vars(f.args) << ") -> (" << f.ret.name
     << ": " << f.ret.ty.str() << ")";
  if (!f.body) {
    os << ";\n";
    return os.str();
  }
  os << " {\n";
  if (!f.locals.empty()) os << pad(1) << "locals { " << vars(f.locals) << " }\n";
  if (f.body->kind != Stmt::Kind::Nop) print_stmt(os, *f.body, 1);
  os << "}\n";
  return os.str();
}

std::string pretty_llbc(const Program& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : p.types) {
    if (!first) os << "\n";
    first = false;
    if (t.is_struct) {
      const CtorDecl& c = t.ctors.at(0);
      os << "struct " << t.name << generics({}, t.ty_params);
      if (positional(c)) {
        os << "(";
        for (size_t i = 0; i < c.fields.size(); ++i) os << (i ? ", " : "") << c.fields[i].str();
        os << ");\n";
      } else {
        os << " {\n";
        for (size_t i = 0; i < c.fields.size(); ++i) os << pad(1) << c.field_names[i] << ": " << c.fields[i].str() << ",\n";
        os << "}\n";
      }
      continue;
    }
    os << "enum " << t.name << generics({}, t.ty_params) << " {\n";
    for (const auto& c : t.ctors) {
      os << pad(1) << c.name;
      if (!c.fields.empty()) {
        if (positional(c)) {
          os << "(";
          for (size_t i = 0; i < c.fields.size(); ++i) os << (i ? ", " : "") << c.fields[i].str();
          os << ")";
        } else {
          os << " { ";
          for (size_t i = 0; i < c.fields.size(); ++i)
            os << (i ? ", " : "") << c.field_names[i] << ": " << c.fields[i].str();
          os << " }";
        }
      }
      os << ",\n";
    }
    os << "}\n";
  }
  for (const auto& f : p.fns) {
    if (!first) os << "\n";
    first = false;
    os << pretty_fn(f);
  }
  return os.str();
}

} // namespace llbc
