// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Runtime values, ordered environments with region abstractions, and the
// place-level read/write primitives shared by both interpreters.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "llbc/ast.hpp"
#include "llbc/error.hpp"

namespace llbc {

using LoanId = uint32_t;
using SymId = uint32_t;

struct Value {
  enum class Kind : uint8_t {
    Bool,
    Int,
    MutBorrow,      // id, kids[0]
    SharedBorrow,   // id
    ReservedBorrow, // id
    MutLoan,        // id
    SharedLoan,     // ids, kids[0]
    Bottom,
    Ctor,      // name, kids
    Tuple,     // kids
    Box,       // kids[0]
    Symbolic,  // id, ty
    ProjIn,    // kids[0], name = region
    ProjLoans, // id (σ), ty, name = region
    ProjOut,   // id (σ), ty
    Ignored,
  };
  Kind kind = Kind::Bottom;
  bool b = false;
  int64_t n = 0;
  Ty::Kind int_ty = Ty::Kind::I32;
  uint32_t id = 0;
  std::vector<LoanId> ids; // sorted
  std::string name;
  Ty ty;
  std::vector<Value> kids;

  static Value bottom() { return Value{}; }
  static Value ignored() { Value v; v.kind = Kind::Ignored; return v; }
  static Value boolean(bool x) { Value v; v.kind = Kind::Bool; v.b = x; return v; }
  static Value integer(int64_t x, Ty::Kind k) { Value v; v.kind = Kind::Int; v.n = x; v.int_ty = k; return v; }
  static Value unit() { Value v; v.kind = Kind::Tuple; return v; }
  static Value tuple(std::vector<Value> elems) { Value v; v.kind = Kind::Tuple; v.kids = std::move(elems); return v; }
  static Value ctor(std::string c, std::vector<Value> fields) {
    Value v; v.kind = Kind::Ctor; v.name = std::move(c); v.kids = std::move(fields); return v;
  }
  static Value box(Value inner) { Value v; v.kind = Kind::Box; v.kids = {std::move(inner)}; return v; }
  static Value mut_borrow(LoanId l, Value inner) {
    Value v; v.kind = Kind::MutBorrow; v.id = l; v.kids = {std::move(inner)}; return v;
  }
  static Value shared_borrow(LoanId l) { Value v; v.kind = Kind::SharedBorrow; v.id = l; return v; }
  static Value reserved_borrow(LoanId l) { Value v; v.kind = Kind::ReservedBorrow; v.id = l; return v; }
  static Value mut_loan(LoanId l) { Value v; v.kind = Kind::MutLoan; v.id = l; return v; }
  static Value shared_loan(std::vector<LoanId> ls, Value inner) {
    Value v; v.kind = Kind::SharedLoan; v.ids = std::move(ls); v.kids = {std::move(inner)}; return v;
  }
  static Value symbolic(SymId s, Ty t) { Value v; v.kind = Kind::Symbolic; v.id = s; v.ty = std::move(t); return v; }

  bool is_borrow() const {
    return kind == Kind::MutBorrow || kind == Kind::SharedBorrow || kind == Kind::ReservedBorrow;
  }
  bool is_loan() const { return kind == Kind::MutLoan || kind == Kind::SharedLoan; }
  bool operator==(const Value&) const = default;
};

std::string value_str(const Value& v);

// Predicates over a value tree. "outer" means not below any borrow.
bool contains_kind(const Value& v, Value::Kind k);
bool contains_loan(const Value& v);
bool contains_borrow_or_loan(const Value& v);
bool contains_symbolic(const Value& v);
bool has_no_outer_loans(const Value& v);
// First outer loan in left-to-right order (prefers shared loans at the same depth).
const Value* first_outer_loan(const Value& v);

struct Binding {
  std::string var;
  Value value;
  Ty ty;
  bool ghost = false;
  int frame = 0;
};

struct CallMeta;

struct Abstraction {
  uint32_t id = 0;
  std::string region;
  std::string fn;
  int call = -1; // index of the originating call record, -1 for the input abstraction
  bool input = false;
  std::vector<Value> values;
  std::vector<Ty> tys;
};

using Entry = std::variant<Binding, Abstraction>;

// A position inside the environment: entry, slot (abstraction value index, 0
// for bindings) and a path of child indices.
struct Loc {
  size_t entry = 0;
  size_t slot = 0;
  std::vector<size_t> path;
  bool operator==(const Loc&) const = default;
};

struct Env {
  std::vector<Entry> entries;
  LoanId next_loan = 0;
  SymId next_sym = 0;
  uint32_t next_abs = 0;
  int frame = 0;

  LoanId fresh_loan() { return next_loan++; }
  SymId fresh_sym() { return next_sym++; }

  // Index of the visible binding for var in the current frame.
  std::optional<size_t> find_var(const std::string& var) const;
  Value& at(const Loc& l);
  const Value& at(const Loc& l) const;
  Value& root(size_t entry, size_t slot);
  const Value& root(size_t entry, size_t slot) const;

  std::optional<Loc> find_loan(LoanId l) const;
  std::optional<Loc> find_borrow(LoanId l) const;
  std::optional<Loc> find_symbolic(SymId s) const;

  // Calls f on every value position (pre-order).
  void visit(const std::function<void(const Loc&, const Value&)>& f) const;

  void push_binding(std::string var, Value v, Ty ty, bool ghost);
  // Appends a ghost binding if the value carries borrows or loans.
  void push_ghost(std::string var, Value v, Ty ty);
  // Drops ghosts that no longer hold borrows or loans.
  void gc();

  std::string dump() const;
};

// Result of resolving a place: either a location or the reason resolution
// could not proceed yet.
struct Blocker {
  enum class Kind : uint8_t { None, Loan, Reserved, Expand, Error };
  Kind kind = Kind::None;
  LoanId loan = 0;
  Loc loc;           // for Expand: the symbolic value to refine
  std::string code;  // for Error
  std::string message;
};

enum class Access : uint8_t {
  Read,     // may follow shared borrows, may step into shared loans
  Write,    // no shared derefs, loans block
  Ghost,    // book-keeping: may traverse shared borrows and loans
  GhostMut, // mutable borrow creation: no shared derefs, loans block
  Move,     // no dereference of borrows
};

struct Resolved {
  Loc loc;
  Blocker block;
  bool ok() const { return block.kind == Blocker::Kind::None; }
};

Resolved resolve_place(const Env& env, const Place& p, Access mode);

// Plain primitives: they fail (throwing Error) where the interpreters would
// reorganize; used directly by tests and by the interpreters after reorganizing.
Value read_place(const Env& env, const Place& p);
Value read_place_for_match(const Env& env, const Place& p);
void write_place(Env& env, const Place& p, Value v);
void ghost_write(Env& env, const Place& p, Value v);
Value copy_value(Env& env, const Value& v);

// Invariant checker. concrete: symbolic values are forbidden.
std::vector<Diagnostic> check_invariants(const Env& env, const Program* prog, bool concrete);

// Type-directed well-formedness of a value (used by the invariant checker).
bool value_has_type(const Value& v, const Ty& t, const Program* prog, const Env& env, std::string& why);

} // namespace llbc
