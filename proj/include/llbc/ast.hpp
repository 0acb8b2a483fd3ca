// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Abstract syntax of the low-level borrow calculus.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace llbc {

struct SrcLoc {
  int line = 0;
  int col = 0;
  std::string str() const;
  bool operator==(const SrcLoc&) const = default;
};

struct Ty {
  enum class Kind : uint8_t { Bool, I32, U32, MutRef, SharedRef, Box, Adt, Tuple, Var };
  Kind kind = Kind::Tuple;
  std::string name;    // Adt/Var name, region for references ("" when erased)
  std::vector<Ty> args; // referent, box inner, adt args, tuple elems

  static Ty boolean() { return Ty{Kind::Bool, {}, {}}; }
  static Ty i32() { return Ty{Kind::I32, {}, {}}; }
  static Ty u32() { return Ty{Kind::U32, {}, {}}; }
  static Ty unit() { return Ty{Kind::Tuple, {}, {}}; }
  static Ty tuple(std::vector<Ty> elems) { return Ty{Kind::Tuple, {}, std::move(elems)}; }
  static Ty mut_ref(std::string region, Ty inner) { return Ty{Kind::MutRef, std::move(region), {std::move(inner)}}; }
  static Ty shared_ref(std::string region, Ty inner) { return Ty{Kind::SharedRef, std::move(region), {std::move(inner)}}; }
  static Ty box(Ty inner) { return Ty{Kind::Box, {}, {std::move(inner)}}; }
  static Ty adt(std::string name, std::vector<Ty> args) { return Ty{Kind::Adt, std::move(name), std::move(args)}; }
  static Ty var(std::string name) { return Ty{Kind::Var, std::move(name), {}}; }

  bool is_ref() const { return kind == Kind::MutRef || kind == Kind::SharedRef; }
  bool is_int() const { return kind == Kind::I32 || kind == Kind::U32; }
  bool is_unit() const { return kind == Kind::Tuple && args.empty(); }
  const Ty& inner() const { return args.at(0); }

  bool operator==(const Ty&) const = default;
  std::string str() const;
};

// Equality that ignores region annotations.
bool same_shape(const Ty& a, const Ty& b);
bool contains_borrow(const Ty& t);
bool contains_mut_borrow(const Ty& t);
bool mentions_region(const Ty& t, const std::string& region);
Ty subst_ty(const Ty& t, const std::map<std::string, Ty>& tyvars);
Ty erase_regions(const Ty& t);

struct Proj {
  enum class Kind : uint8_t { Deref, DerefMut, DerefShared, DerefBox, Field, TupleField };
  Kind kind = Kind::Deref;
  std::string ctor;  // Field: constructor name
  std::string field; // Field: field name as written
  int index = 0;     // TupleField index; Field index once resolved (-1 before)

  bool is_deref() const {
    return kind == Kind::Deref || kind == Kind::DerefMut || kind == Kind::DerefShared || kind == Kind::DerefBox;
  }
  bool operator==(const Proj& o) const;
};

struct Place {
  std::string base;
  std::vector<Proj> path;
  bool operator==(const Place&) const = default;
  std::string str() const;
};

struct Operand {
  enum class Kind : uint8_t { Move, Copy, ConstBool, ConstInt, Ctor, Tuple, BoxNew };
  Kind kind = Kind::Tuple;
  Place place;
  bool b = false;
  int64_t n = 0;
  Ty::Kind int_ty = Ty::Kind::Tuple; // I32/U32 for ConstInt, Tuple when not yet inferred
  std::string ctor;
  std::vector<Operand> elems;

  static Operand move(Place p) { Operand o; o.kind = Kind::Move; o.place = std::move(p); return o; }
  static Operand copy(Place p) { Operand o; o.kind = Kind::Copy; o.place = std::move(p); return o; }
  static Operand boolean(bool v) { Operand o; o.kind = Kind::ConstBool; o.b = v; return o; }
  static Operand integer(int64_t v, Ty::Kind k) { Operand o; o.kind = Kind::ConstInt; o.n = v; o.int_ty = k; return o; }
  static Operand unit() { return Operand{}; }
  bool operator==(const Operand&) const = default;
  std::string str() const;
};

enum class BinOp : uint8_t { Add, Sub, Mul, Div, Rem, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnOp : uint8_t { Not, Neg };
const char* binop_str(BinOp op);
bool binop_is_cmp(BinOp op);

struct Rvalue {
  enum class Kind : uint8_t { Use, MutBorrow, SharedBorrow, ReservedBorrow, Unop, Binop };
  Kind kind = Kind::Use;
  std::vector<Operand> ops;
  Place place;
  UnOp unop = UnOp::Not;
  BinOp binop = BinOp::Add;
  bool operator==(const Rvalue&) const = default;
  std::string str() const;
};

struct Stmt {
  enum class Kind : uint8_t { Nop, Seq, Assign, Call, If, Match, Return, Panic, Free };
  Kind kind = Kind::Nop;
  Place place; // Assign/Call destination, Match scrutinee, Free target
  Rvalue rv;
  std::string fn;
  std::vector<std::string> region_args;
  std::vector<Ty> ty_args;
  std::vector<Operand> args;
  Operand cond;
  std::vector<Stmt> kids; // Seq: 2, If: then/else, Match: one per arm
  std::vector<std::string> arm_ctors;
  std::vector<std::vector<std::string>> arm_hints; // optional binder names used for naming only
  SrcLoc loc;

  static Stmt nop() { return Stmt{}; }
  static Stmt seq(Stmt a, Stmt b);
  static Stmt assign(Place p, Rvalue rv);
  static Stmt if_(Operand c, Stmt t, Stmt e);
  static Stmt ret() { Stmt s; s.kind = Kind::Return; return s; }
  static Stmt panic() { Stmt s; s.kind = Kind::Panic; return s; }

  // Structural equality; source locations are ignored.
  bool operator==(const Stmt& o) const;
};

// Flattens nested Seq nodes into a statement list (Nop dropped).
std::vector<Stmt> flatten(const Stmt& s);
Stmt from_list(std::vector<Stmt> stmts);

struct Var {
  std::string name;
  Ty ty;
  bool operator==(const Var&) const = default;
};

struct FnDecl {
  std::string name;
  std::vector<std::string> region_params;
  std::vector<std::string> ty_params;
  std::vector<Var> args;
  std::vector<Var> locals;
  Var ret;
  std::optional<Stmt> body; // nullopt means opaque
  SrcLoc loc;
  bool operator==(const FnDecl& o) const;
  const Ty* var_type(const std::string& name) const;
};

struct CtorDecl {
  std::string name;
  std::vector<std::string> field_names; // "0", "1", ... for positional fields
  std::vector<Ty> fields;
  bool operator==(const CtorDecl&) const = default;
};

struct TypeDecl {
  std::string name;
  std::vector<std::string> ty_params;
  std::vector<CtorDecl> ctors;
  bool is_struct = false;
  SrcLoc loc;
  bool operator==(const TypeDecl& o) const;
  int ctor_index(const std::string& c) const;
};

struct Program {
  std::vector<TypeDecl> types;
  std::vector<FnDecl> fns;
  // Strongly connected components of the call graph, callees first.
  std::vector<std::vector<std::string>> fn_groups;

  const TypeDecl* find_type(const std::string& name) const;
  const FnDecl* find_fn(const std::string& name) const;
  // Type declaration owning a constructor name.
  const TypeDecl* ctor_owner(const std::string& ctor) const;
  bool operator==(const Program& o) const { return types == o.types && fns == o.fns; }
};

// Computes fn_groups (Tarjan over the call graph, declaration order tie-break).
void compute_groups(Program& p);
// Field types of a constructor instantiated at concrete type arguments.
std::vector<Ty> ctor_field_types(const TypeDecl& td, const CtorDecl& cd, const std::vector<Ty>& args);

} // namespace llbc
