// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Target pure language: lambda terms in the result monad, an evaluator with
// fuel, printers, a reader for the neutral style, and structural comparison.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llbc/ast.hpp"

namespace llbc::pure {

// Pure types reuse Ty without references or boxes.
using PTy = Ty;

struct Pattern {
  enum class Kind : uint8_t { Var, Wild, Tuple, Ctor, Const };
  Kind kind = Kind::Wild;
  std::string name; // Var name, Ctor name
  std::vector<Pattern> kids;
  // Const
  Ty::Kind cty = Ty::Kind::I32;
  int64_t n = 0;
  bool b = false;

  static Pattern var(std::string n) { Pattern p; p.kind = Kind::Var; p.name = std::move(n); return p; }
  static Pattern wild() { return Pattern{}; }
  static Pattern tuple(std::vector<Pattern> ps) {
    if (ps.size() == 1) return std::move(ps[0]);
    Pattern p; p.kind = Kind::Tuple; p.kids = std::move(ps); return p;
  }
  static Pattern ctor(std::string c, std::vector<Pattern> ps) {
    Pattern p; p.kind = Kind::Ctor; p.name = std::move(c); p.kids = std::move(ps); return p;
  }
  bool operator==(const Pattern&) const = default;
};

struct Expr {
  enum class Kind : uint8_t { Var, Const, Tuple, Ctor, If, Match, Let, Bind, Ret, Fail, Call, Prim };
  Kind kind = Kind::Tuple;
  std::string name;            // Var, Ctor, Call fn, Prim op
  Ty::Kind cty = Ty::Kind::I32; // Const: Bool, I32 or U32
  int64_t n = 0;
  bool b = false;
  std::vector<Expr> kids;
  std::vector<Pattern> pats; // Let/Bind: one; Match: one per arm
  std::vector<PTy> ty_args;  // Call

  static Expr var(std::string n) { Expr e; e.kind = Kind::Var; e.name = std::move(n); return e; }
  static Expr boolean(bool v) { Expr e; e.kind = Kind::Const; e.cty = Ty::Kind::Bool; e.b = v; return e; }
  static Expr integer(int64_t v, Ty::Kind k) { Expr e; e.kind = Kind::Const; e.cty = k; e.n = v; return e; }
  static Expr unit() { return Expr{}; }
  static Expr tuple(std::vector<Expr> es) {
    if (es.size() == 1) return std::move(es[0]);
    Expr e; e.kind = Kind::Tuple; e.kids = std::move(es); return e;
  }
  static Expr ctor(std::string c, std::vector<Expr> es) {
    Expr e; e.kind = Kind::Ctor; e.name = std::move(c); e.kids = std::move(es); return e;
  }
  static Expr ret(Expr v) { Expr e; e.kind = Kind::Ret; e.kids = {std::move(v)}; return e; }
  static Expr fail() { Expr e; e.kind = Kind::Fail; return e; }
  static Expr if_(Expr c, Expr t, Expr f) {
    Expr e; e.kind = Kind::If; e.kids = {std::move(c), std::move(t), std::move(f)}; return e;
  }
  static Expr let(Pattern p, Expr rhs, Expr body) {
    Expr e; e.kind = Kind::Let; e.pats = {std::move(p)}; e.kids = {std::move(rhs), std::move(body)}; return e;
  }
  static Expr bind(Pattern p, Expr rhs, Expr body) {
    Expr e; e.kind = Kind::Bind; e.pats = {std::move(p)}; e.kids = {std::move(rhs), std::move(body)}; return e;
  }
  static Expr call(std::string f, std::vector<PTy> tys, std::vector<Expr> args) {
    Expr e; e.kind = Kind::Call; e.name = std::move(f); e.ty_args = std::move(tys); e.kids = std::move(args); return e;
  }
  static Expr prim(std::string op, std::vector<Expr> args) {
    Expr e; e.kind = Kind::Prim; e.name = std::move(op); e.kids = std::move(args); return e;
  }
  bool operator==(const Expr&) const = default;
};

// Monadic primitives: <width>_{add,sub,mul,div,rem,neg} and massert.
// Pure primitives: eq, ne, lt, le, gt, ge, not.
bool prim_is_monadic(const std::string& op);
bool prim_known(const std::string& op);

struct CtorSig {
  std::string name;
  std::vector<PTy> fields;
  bool operator==(const CtorSig&) const = default;
};

struct TypeDef {
  std::string name;
  std::vector<std::string> ty_params;
  std::vector<CtorSig> ctors;
  bool operator==(const TypeDef&) const = default;
};

struct Param {
  std::string name;
  PTy ty;
  bool operator==(const Param&) const = default;
};

struct FunDef {
  std::string name;
  std::vector<std::string> ty_params;
  std::vector<Param> params;
  PTy ret; // type inside the result monad
  std::optional<Expr> body; // nullopt: interface only
  bool operator==(const FunDef&) const = default;
};

struct Program {
  std::vector<TypeDef> types;
  std::vector<FunDef> funs;
  // Groups of function names emitted together; recursive groups are marked.
  std::vector<std::vector<std::string>> groups;
  std::vector<bool> group_rec;

  const FunDef* find(const std::string& name) const;
  const TypeDef* ctor_owner(const std::string& ctor) const;
  bool operator==(const Program& o) const { return types == o.types && funs == o.funs; }
};

// Runtime values.
struct Val {
  enum class Kind : uint8_t { Bool, Int, Tuple, Ctor };
  Kind kind = Kind::Tuple;
  bool b = false;
  int64_t n = 0;
  Ty::Kind ity = Ty::Kind::I32;
  std::string name;
  std::vector<Val> kids;

  static Val boolean(bool v) { Val x; x.kind = Kind::Bool; x.b = v; return x; }
  static Val integer(int64_t v, Ty::Kind k) { Val x; x.kind = Kind::Int; x.n = v; x.ity = k; return x; }
  static Val unit() { return Val{}; }
  static Val tuple(std::vector<Val> vs) { Val x; x.kind = Kind::Tuple; x.kids = std::move(vs); return x; }
  static Val ctor(std::string c, std::vector<Val> vs) {
    Val x; x.kind = Kind::Ctor; x.name = std::move(c); x.kids = std::move(vs); return x;
  }
  bool operator==(const Val&) const = default;
};
std::string val_str(const Val& v);

struct Outcome {
  enum class Kind : uint8_t { Return, Fail, OutOfFuel };
  Kind kind = Kind::Fail;
  Val value;
  bool operator==(const Outcome&) const = default;
};
std::string outcome_str(const Outcome& o);

// Throws llbc::Error("ILL_SCOPED", ...) on malformed programs.
Outcome eval_fun(const Program& p, const std::string& fn, const std::vector<Val>& args, uint64_t fuel);
inline Outcome eval_pure(const Program& p, const std::string& entry, uint64_t fuel) { return eval_fun(p, entry, {}, fuel); }

enum class Style : uint8_t { FStar, Neutral };
std::string print_program(const Program& p, Style s);
std::string print_expr(const Expr& e, Style s);
std::string print_ty(const PTy& t, Style s);

// Reader for the neutral style (used by tests and golden fixtures).
// Throws llbc::ParseError.
Program read_neutral(std::string_view text);

// Cleanups applied before structural comparison: inlining of trivial lets,
// monadic identities, massert sugar, literal matches as conditionals.
Expr normalize(const Expr& e);
// Trivial-let inlining: single-use pure lets and lets binding values are
// substituted into their body; unused pure lets are dropped.
Expr inline_lets(const Expr& e);
Program normalize(const Program& p);
// Removes monadic binds of calls to functions whose name ends with suffix
// when none of the bound variables is used.
Expr drop_dead_calls(const Expr& e, const std::string& suffix);

// Alpha-equivalence of bodies and signatures, up to consistent renaming of
// bound variables and of function names.
bool alpha_equal(const Expr& a, const Expr& b);
// Compares declarations pairwise by position within each program; names of
// functions are matched through a bijection. On failure, why explains.
bool alpha_equal(const Program& a, const Program& b, std::string* why = nullptr);

// Checks that each variable is bound exactly once along its path and every
// use is in scope. Returns the first offending name, if any.
std::optional<std::string> scope_error(const Program& p);

} // namespace llbc::pure
