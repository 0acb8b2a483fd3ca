// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Shared execution engine for concrete runs and symbolic execution.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "llbc/interp.hpp"
#include "llbc/pure.hpp"
#include "llbc/syntax.hpp"

namespace llbc::engine {

struct CallMeta {
  std::string fn;
  std::vector<Ty> ty_args;
  std::map<std::string, Ty> subst;
  std::vector<pure::Expr> args;
};

struct Event {
  bool monadic = false;
  pure::Pattern pat;
  pure::Expr rhs;
};

struct FrameInfo {
  const FnDecl* fn = nullptr;
  std::map<std::string, Ty> subst;
};

struct State {
  Env env;
  std::map<SymId, std::string> names;
  std::set<std::string> used;
  std::vector<CallMeta> calls;
  std::vector<Event> events;
  std::set<LoanId> protected_loans;
  std::map<int, FrameInfo> frames;
  std::vector<std::string> trace;
  uint64_t steps = 0;
  int frame_counter = 0;
};

struct Tree {
  enum class Kind : uint8_t { Let, Bind, If, Match, Leaf };
  Kind kind = Kind::Leaf;
  pure::Pattern pat; // Let/Bind
  pure::Expr rhs;    // Let/Bind
  pure::Expr scrut;  // If/Match
  std::vector<pure::Pattern> arms;
  std::vector<Tree> kids;
  bool panic = false;
  std::shared_ptr<State> leaf;
};

struct Item {
  const Stmt* s = nullptr;
  bool pop_frame = false;
  Place dest;
  int caller_frame = 0;
};
using Cont = std::vector<Item>;

// Naming helpers for the pure side.
std::string pure_type_name(const std::string& llbc_name);
std::string pure_ctor_name(const Program& p, const std::string& ctor);
std::string fwd_name(const std::string& fn);
std::string back_name(const FnDecl& f, const std::string& region);
// References and boxes erased, data type names in pure spelling.
Ty erase_ty(const Ty& t);
std::string pure_ty_var(const std::string& n);

// Leaves of &'r mut references in a type, in left-to-right order.
void mut_leaves(const Ty& t, const std::string& region, std::vector<Ty>& out);
bool has_back(const FnDecl& f, const std::string& region);

// Leaves of a value that sit at references of the given region.
struct RegionLeaf {
  Value v;
  Ty ty;
};
void region_leaves(const Value& v, const Ty& t, const std::string& region, std::vector<RegionLeaf>& out);
// Regions ended at call time: the ones absent from the return type.
bool is_merged(const FnDecl& f, const std::string& region);

class Machine {
public:
  Machine(const Program& p, RunOptions o, bool symbolic) : prog_(p), opts_(o), symbolic_(symbolic) {}

  const Program& prog() const { return prog_; }
  const RunOptions& options() const { return opts_; }
  // Environment dump at the first failure seen by exec.
  std::string fail_dump;
  bool symbolic() const { return symbolic_; }

  Tree exec(State st, Cont k);

  // Primitives.
  Loc resolve(State& st, const Place& p, Access mode);
  Value eval_operand(State& st, const Operand& op);
  std::optional<Value> eval_rvalue(State& st, const Rvalue& rv, const Place& dest);
  void assign(State& st, const Place& p, Value v);
  void end_loan(State& st, LoanId l);
  void end_loan_rules(State& st, LoanId l);
  void activate(State& st, LoanId l);
  void expand_deterministic(State& st, const Loc& at);
  void substitute(State& st, SymId s, const Value& v);
  Ty place_ty(const State& st, const Place& p) const;
  void clear_frame(State& st, int frame, const FnDecl& f);
  void after_stmt(State& st, const Stmt* s);

  // Naming and translation.
  std::string fresh(State& st, const std::string& hint);
  // Fresh value of a borrow-free type; boxes are expanded eagerly.
  Value fresh_value(State& st, const Ty& t, const std::string& hint);
  pure::Pattern pattern_of(const State& st, const Value& v) const;
  pure::Expr to_expr(const State& st, const Value& v) const;

  // Symbolic machinery (symbolic.cpp).
  struct Decomp {
    Value caller;
    std::map<std::string, Value> views; // per region, Ignored when absent
    pure::Pattern pat;
  };
  Decomp decompose(State& st, const Ty& t, const std::string& hint);
  State init_callee(const FnDecl& f, std::vector<pure::Param>& params);
  // Returns the patterns bound by each output projector that got unfolded.
  std::map<SymId, pure::Pattern> reduce_projectors(State& st);
  void abstract_call(State& st, const Stmt& call);
  void end_abstraction(State& st, uint32_t abs_id);
  // Removes an abstraction after draining it; returns the patterns of the
  // values given back through its mutable borrows, in input order.
  std::vector<pure::Pattern> release_abstraction(State& st, uint32_t abs_id);
  // Ends every loan held by an abstraction.
  void drain_abstraction(State& st, uint32_t abs_id);
  std::optional<size_t> find_abs(const State& st, uint32_t abs_id) const;

private:
  Tree build(State& st, Tree node);
  Tree leaf(State& st, bool panic);
  Tree branch_bool(State& st, const Cont& k, const Value& c, const Stmt& s);
  Tree branch_match(State& st, const Cont& k, const Loc& at, const Stmt& s);
  void concrete_call(State& st, const Stmt& s, Cont& k);
  void return_frame(State& st, const Item& it);
  LoanId deepest_loan(const Value& v) const;
  // Ends the borrows that prevent the borrow at loc from being ended (Not-Borrowed).
  bool free_ancestors(State& st, const Loc& loc);

  const Program& prog_;
  RunOptions opts_;
  bool symbolic_;
};

} // namespace llbc::engine
