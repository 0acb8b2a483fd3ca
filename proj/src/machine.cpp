// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <climits>
#include <functional>

#include "engine.hpp"

namespace llbc::engine {

// Names

std::string pure_type_name(const std::string& n) {
  std::string s;
  for (size_t i = 0; i < n.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(n[i]);
    if (std::isupper(c)) {
      if (i > 0 && n[i - 1] != '_') s += '_';
      s += static_cast<char>(std::tolower(c));
    } else {
      s += n[i];
    }
  }
  return s + "_t";
}

std::string pure_ctor_name(const Program& p, const std::string& ctor) {
  const TypeDecl* td = p.ctor_owner(ctor);
  if (!td) return ctor;
  if (td->is_struct) return "Mk" + td->name;
  return td->name + ctor;
}

std::string fwd_name(const std::string& fn) { return fn + "_fwd"; }

std::string back_name(const FnDecl& f, const std::string& region) {
  size_t n = 0;
  for (const auto& r : f.region_params)
    if (has_back(f, r)) ++n;
  return n == 1 ? f.name + "_back" : f.name + "_back_" + region;
}

Ty erase_ty(const Ty& t) {
  if (t.kind == Ty::Kind::MutRef || t.kind == Ty::Kind::SharedRef || t.kind == Ty::Kind::Box) return erase_ty(t.inner());
  Ty out = t;
  if (out.kind == Ty::Kind::Adt) out.name = pure_type_name(out.name);
  if (out.kind == Ty::Kind::Var) out.name = pure_ty_var(out.name);
  for (auto& a : out.args) a = erase_ty(a);
  return out;
}

std::string pure_ty_var(const std::string& n) {
  std::string s;
  for (char c : n) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void mut_leaves(const Ty& t, const std::string& region, std::vector<Ty>& out) {
  switch (t.kind) {
  case Ty::Kind::MutRef:
    if (t.name == region) out.push_back(t.inner());
    return;
  case Ty::Kind::SharedRef: return;
  case Ty::Kind::Box:
  case Ty::Kind::Tuple:
    for (const auto& a : t.args) mut_leaves(a, region, out);
    return;
  default: return;
  }
}

bool has_back(const FnDecl& f, const std::string& region) {
  if (is_merged(f, region)) return false;
  std::vector<Ty> leaves;
  mut_leaves(f.ret.ty, region, leaves);
  for (const auto& a : f.args) mut_leaves(a.ty, region, leaves);
  return !leaves.empty();
}

bool is_merged(const FnDecl& f, const std::string& region) { return !mentions_region(f.ret.ty, region); }

namespace {

const char* kReserved[] = {"let", "rec",  "in",   "match", "with", "if",     "then",  "else", "begin",
                           "end", "fun",  "type", "val",   "and",  "of",     "not",   "true", "false",
                           "ret", "Fail", "Return", "massert", "result", "unit", "bool", "i32", "u32",
                           "return", "fail", "module", "open", "assert", "decreases", "Type"};

void collect_borrows(const Value& v, std::set<LoanId>& out) {
  if (v.is_borrow()) out.insert(v.id);
  for (const auto& k : v.kids) collect_borrows(k, out);
}

std::string one_line(const Stmt& s) {
  switch (s.kind) {
  case Stmt::Kind::If: return "if " + s.cond.str();
  case Stmt::Kind::Match: return "match " + s.place.str();
  default: break;
  }
  std::string text = pretty_stmt(s, 0);
  auto nl = text.find('\n');
  if (nl != std::string::npos) text = text.substr(0, nl);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  return text;
}

std::optional<int64_t> checked(BinOp op, int64_t a, int64_t b, Ty::Kind k) {
  int64_t r = 0;
  switch (op) {
  case BinOp::Add: r = a + b; break;
  case BinOp::Sub: r = a - b; break;
  case BinOp::Mul: r = a * b; break;
  case BinOp::Div:
    if (b == 0) return std::nullopt;
    r = a / b;
    break;
  case BinOp::Rem:
    if (b == 0) return std::nullopt;
    r = a % b;
    break;
  default: return std::nullopt;
  }
  if (k == Ty::Kind::U32 ? (r < 0 || r > static_cast<int64_t>(UINT32_MAX)) : (r < INT32_MIN || r > INT32_MAX))
    return std::nullopt;
  return r;
}

bool compare(BinOp op, const Value& a, const Value& b) {
  int64_t x = a.kind == Value::Kind::Bool ? a.b : a.n;
  int64_t y = b.kind == Value::Kind::Bool ? b.b : b.n;
  switch (op) {
  case BinOp::Eq: return x == y;
  case BinOp::Ne: return x != y;
  case BinOp::Lt: return x < y;
  case BinOp::Le: return x <= y;
  case BinOp::Gt: return x > y;
  case BinOp::Ge: return x >= y;
  default: return false;
  }
}

const char* width(Ty::Kind k) { return k == Ty::Kind::U32 ? "u32" : "i32"; }

std::string prim_name(BinOp op, Ty::Kind k) {
  switch (op) {
  case BinOp::Add: return std::string(width(k)) + "_add";
  case BinOp::Sub: return std::string(width(k)) + "_sub";
  case BinOp::Mul: return std::string(width(k)) + "_mul";
  case BinOp::Div: return std::string(width(k)) + "_div";
  case BinOp::Rem: return std::string(width(k)) + "_rem";
  case BinOp::Eq: return "eq";
  case BinOp::Ne: return "ne";
  case BinOp::Lt: return "lt";
  case BinOp::Le: return "le";
  case BinOp::Gt: return "gt";
  case BinOp::Ge: return "ge";
  }
  return "?";
}

void replace_sym(Value& v, SymId s, const Value& by) {
  if (v.kind == Value::Kind::Symbolic && v.id == s) {
    v = by;
    return;
  }
  for (auto& k : v.kids) replace_sym(k, s, by);
}

constexpr int kGuard = 100000;

} // namespace

// Naming and translation

std::string Machine::fresh(State& st, const std::string& hint0) {
  if (st.used.empty())
    for (const char* r : kReserved) st.used.insert(r);
  std::string hint = hint0.empty() ? "s" : hint0;
  if (st.used.insert(hint).second) return hint;
  for (int i = 0;; ++i) {
    std::string c = hint + std::to_string(i);
    if (st.used.insert(c).second) return c;
  }
}

Value Machine::fresh_value(State& st, const Ty& t, const std::string& hint) {
  if (t.kind == Ty::Kind::Box) return Value::box(fresh_value(st, t.inner(), hint));
  SymId id = st.env.fresh_sym();
  st.names[id] = fresh(st, hint);
  return Value::symbolic(id, t);
}

pure::Pattern Machine::pattern_of(const State& st, const Value& v) const {
  switch (v.kind) {
  case Value::Kind::Symbolic: return pure::Pattern::var(st.names.at(v.id));
  case Value::Kind::Box:
  case Value::Kind::MutBorrow:
  case Value::Kind::SharedLoan: return pattern_of(st, v.kids[0]);
  case Value::Kind::Tuple: {
    std::vector<pure::Pattern> ps;
    for (const auto& k : v.kids) ps.push_back(pattern_of(st, k));
    if (ps.empty()) return pure::Pattern::wild();
    return pure::Pattern::tuple(std::move(ps));
  }
  case Value::Kind::Ctor: {
    std::vector<pure::Pattern> ps;
    for (const auto& k : v.kids) ps.push_back(pattern_of(st, k));
    return pure::Pattern::ctor(pure_ctor_name(prog_, v.name), std::move(ps));
  }
  default: return pure::Pattern::wild();
  }
}

pure::Expr Machine::to_expr(const State& st, const Value& v) const {
  switch (v.kind) {
  case Value::Kind::Bool: return pure::Expr::boolean(v.b);
  case Value::Kind::Int: return pure::Expr::integer(v.n, v.int_ty);
  case Value::Kind::Symbolic: {
    auto it = st.names.find(v.id);
    if (it == st.names.end()) throw Error("UNTRANSLATABLE_VALUE", "symbolic value s" + std::to_string(v.id) + " has no name");
    return pure::Expr::var(it->second);
  }
  case Value::Kind::Tuple: {
    std::vector<pure::Expr> es;
    for (const auto& k : v.kids) es.push_back(to_expr(st, k));
    if (es.empty()) return pure::Expr::unit();
    return pure::Expr::tuple(std::move(es));
  }
  case Value::Kind::Ctor: {
    std::vector<pure::Expr> es;
    for (const auto& k : v.kids) es.push_back(to_expr(st, k));
    return pure::Expr::ctor(pure_ctor_name(prog_, v.name), std::move(es));
  }
  case Value::Kind::Box:
  case Value::Kind::MutBorrow:
  case Value::Kind::SharedLoan: return to_expr(st, v.kids[0]);
  case Value::Kind::SharedBorrow: {
    auto l = st.env.find_loan(v.id);
    if (!l || st.env.at(*l).kind != Value::Kind::SharedLoan)
      throw Error("UNTRANSLATABLE_VALUE", "shared borrow l" + std::to_string(v.id) + " has no loan");
    return to_expr(st, st.env.at(*l).kids[0]);
  }
  default: throw Error("UNTRANSLATABLE_VALUE", "cannot translate " + value_str(v));
  }
}

// Types of places

Ty Machine::place_ty(const State& st, const Place& p) const {
  auto idx = st.env.find_var(p.base);
  if (!idx) throw Error("UNKNOWN_VAR", "variable " + p.base + " is not bound");
  Ty t = std::get<Binding>(st.env.entries[*idx]).ty;
  for (const auto& pr : p.path) {
    if (pr.is_deref()) {
      if (t.args.empty()) throw Error("PATH_MISMATCH", "cannot dereference type " + t.str());
      t = t.inner();
    } else if (pr.kind == Proj::Kind::TupleField) {
      if (t.kind != Ty::Kind::Tuple || pr.index < 0 || static_cast<size_t>(pr.index) >= t.args.size())
        throw Error("PATH_MISMATCH", "no field " + std::to_string(pr.index) + " in " + t.str());
      t = t.args[static_cast<size_t>(pr.index)];
    } else {
      const TypeDecl* td = t.kind == Ty::Kind::Adt ? prog_.find_type(t.name) : nullptr;
      int ci = td ? td->ctor_index(pr.ctor) : -1;
      if (ci < 0) throw Error("PATH_MISMATCH", "no constructor " + pr.ctor + " in " + t.str());
      auto fts = ctor_field_types(*td, td->ctors[static_cast<size_t>(ci)], t.args);
      if (pr.index < 0 || static_cast<size_t>(pr.index) >= fts.size())
        throw Error("PATH_MISMATCH", "unresolved field " + pr.field);
      t = fts[static_cast<size_t>(pr.index)];
    }
  }
  return t;
}

// Reorganization

LoanId Machine::deepest_loan(const Value& v) const {
  int best_depth = -1;
  bool best_shared = false;
  LoanId best = 0;
  std::function<void(const Value&, int)> go = [&](const Value& x, int d) {
    if (x.is_loan()) {
      bool shared = x.kind == Value::Kind::SharedLoan;
      if (d > best_depth || (d == best_depth && shared && !best_shared)) {
        best_depth = d;
        best_shared = shared;
        best = shared ? x.ids.front() : x.id;
      }
    }
    for (const auto& k : x.kids) go(k, d + 1);
  };
  go(v, 0);
  return best;
}

bool Machine::free_ancestors(State& st, const Loc& loc) {
  for (size_t d = loc.path.size(); d-- > 0;) {
    Loc anc{loc.entry, loc.slot, std::vector<size_t>(loc.path.begin(), loc.path.begin() + static_cast<long>(d))};
    const Value& a = st.env.at(anc);
    if (a.kind == Value::Kind::MutBorrow) {
      end_loan(st, a.id);
      return true;
    }
    if (a.kind == Value::Kind::SharedLoan) {
      end_loan(st, a.ids.front());
      return true;
    }
  }
  return false;
}

void Machine::end_loan(State& st, LoanId l) {
  if (!opts_.on_reorg) return end_loan_rules(st, l);
  Env before = st.env;
  end_loan_rules(st, l);
  opts_.on_reorg(before, st.env);
}

void Machine::end_loan_rules(State& st, LoanId l) {
  for (int guard = 0;; ++guard) {
    if (guard > kGuard) throw Error("STUCK_REORG", "cannot end loan l" + std::to_string(l));
    auto lloc = st.env.find_loan(l);
    if (!lloc) return;
    auto bloc = st.env.find_borrow(l);
    if (!bloc) {
      Value& loan = st.env.at(*lloc);
      if (loan.kind == Value::Kind::SharedLoan) {
        loan.ids.erase(std::find(loan.ids.begin(), loan.ids.end(), l));
        if (loan.ids.empty()) {
          Value inner = loan.kids[0];
          loan = std::move(inner);
        }
        return;
      }
      throw Error("STUCK_REORG", "mutable loan l" + std::to_string(l) + " has no borrow to end");
    }
    if (st.protected_loans.count(l))
      throw Error("ASSIGN_OVER_LOAN", "borrow l" + std::to_string(l) + " belongs to the returned value but its lender is going out of scope");
    if (const auto* a = std::get_if<Abstraction>(&st.env.entries[bloc->entry])) {
      if (!symbolic_) throw Error("STUCK_REORG", "region abstraction in a concrete run");
      if (a->input)
        throw Error("STUCK_REORG", "borrow l" + std::to_string(l) + " is held by the caller's region abstraction");
      end_abstraction(st, a->id);
      continue;
    }
    if (free_ancestors(st, *bloc)) continue;
    Value& b = st.env.at(*bloc);
    if (b.kind == Value::Kind::MutBorrow) {
      if (contains_loan(b.kids[0])) {
        end_loan(st, deepest_loan(b.kids[0]));
        continue;
      }
      Value inner = std::move(b.kids[0]);
      st.env.at(*bloc) = Value::bottom();
      st.env.at(*lloc) = std::move(inner);
      return;
    }
    st.env.at(*bloc) = Value::bottom();
    Value& loan = st.env.at(*lloc);
    loan.ids.erase(std::remove(loan.ids.begin(), loan.ids.end(), l), loan.ids.end());
    if (loan.ids.empty()) {
      Value inner = loan.kids[0];
      loan = std::move(inner);
    }
    return;
  }
}

void Machine::activate(State& st, LoanId l) {
  for (int guard = 0;; ++guard) {
    if (guard > kGuard) throw Error("STUCK_REORG", "cannot activate reserved borrow l" + std::to_string(l));
    auto bloc = st.env.find_borrow(l);
    auto lloc = st.env.find_loan(l);
    if (!bloc || !lloc || st.env.at(*bloc).kind != Value::Kind::ReservedBorrow)
      throw Error("STUCK_REORG", "reserved borrow l" + std::to_string(l) + " is inconsistent");
    if (std::holds_alternative<Abstraction>(st.env.entries[bloc->entry]))
      throw Error("STUCK_REORG", "reserved borrow l" + std::to_string(l) + " is held by a region abstraction");
    if (free_ancestors(st, *bloc)) continue;
    const Value& loan = st.env.at(*lloc);
    if (loan.ids.size() > 1) {
      LoanId other = loan.ids.front() == l ? loan.ids[1] : loan.ids.front();
      end_loan(st, other);
      continue;
    }
    if (contains_loan(loan.kids[0])) {
      end_loan(st, deepest_loan(loan.kids[0]));
      continue;
    }
    Value inner = loan.kids[0];
    st.env.at(*lloc) = Value::mut_loan(l);
    st.env.at(*bloc) = Value::mut_borrow(l, std::move(inner));
    return;
  }
}

Loc Machine::resolve(State& st, const Place& p, Access mode) {
  for (int guard = 0;; ++guard) {
    if (guard > kGuard) throw Error("STUCK_REORG", "cannot make place " + p.str() + " accessible");
    Resolved r = resolve_place(st.env, p, mode);
    switch (r.block.kind) {
    case Blocker::Kind::None: return r.loc;
    case Blocker::Kind::Loan: end_loan(st, r.block.loan); break;
    case Blocker::Kind::Reserved: activate(st, r.block.loan); break;
    case Blocker::Kind::Expand:
      if (!symbolic_) throw Error("SYMBOLIC_IN_CONCRETE", "symbolic value reached in a concrete run");
      expand_deterministic(st, r.block.loc);
      break;
    case Blocker::Kind::Error: throw Error(r.block.code, r.block.message);
    }
  }
}

void Machine::substitute(State& st, SymId s, const Value& v) {
  for (auto& e : st.env.entries) {
    if (auto* b = std::get_if<Binding>(&e)) {
      replace_sym(b->value, s, v);
    } else {
      for (auto& x : std::get<Abstraction>(e).values) replace_sym(x, s, v);
    }
  }
}

void Machine::expand_deterministic(State& st, const Loc& at) {
  Value sv = st.env.at(at);
  if (sv.kind != Value::Kind::Symbolic) throw Error("INTERNAL", "expansion of a non-symbolic value");
  std::string base = st.names.count(sv.id) ? st.names.at(sv.id) : "s";
  Value nv;
  const Ty& t = sv.ty;
  if (t.kind == Ty::Kind::Tuple) {
    std::vector<Value> ks;
    for (const auto& a : t.args) ks.push_back(fresh_value(st, a, base));
    nv = Value::tuple(std::move(ks));
  } else if (t.kind == Ty::Kind::Adt) {
    const TypeDecl* td = prog_.find_type(t.name);
    if (!td || td->ctors.size() != 1)
      throw Error("EXPAND_UNSUPPORTED", "cannot project a field out of s" + std::to_string(sv.id) + " : " + t.str() +
                                            " without matching on it");
    auto fts = ctor_field_types(*td, td->ctors[0], t.args);
    std::vector<Value> ks;
    for (size_t i = 0; i < fts.size(); ++i) {
      const std::string& fname = td->ctors[0].field_names[i];
      bool numeric = !fname.empty() && std::isdigit(static_cast<unsigned char>(fname[0]));
      ks.push_back(fresh_value(st, fts[i], numeric ? base : fname));
    }
    nv = Value::ctor(td->ctors[0].name, std::move(ks));
  } else if (t.kind == Ty::Kind::Box) {
    nv = Value::box(fresh_value(st, t.inner(), base));
  } else {
    throw Error("EXPAND_UNSUPPORTED", "cannot expand s" + std::to_string(sv.id) + " : " + t.str());
  }
  st.events.push_back(Event{false, pattern_of(st, nv), pure::Expr::var(base)});
  substitute(st, sv.id, nv);
}

// Operands and rvalues

Value Machine::eval_operand(State& st, const Operand& op) {
  switch (op.kind) {
  case Operand::Kind::ConstBool: return Value::boolean(op.b);
  case Operand::Kind::ConstInt: return Value::integer(op.n, op.int_ty == Ty::Kind::U32 ? Ty::Kind::U32 : Ty::Kind::I32);
  case Operand::Kind::Tuple:
  case Operand::Kind::Ctor: {
    std::vector<Value> ks;
    for (const auto& e : op.elems) ks.push_back(eval_operand(st, e));
    if (op.kind == Operand::Kind::Tuple) return Value::tuple(std::move(ks));
    return Value::ctor(op.ctor, std::move(ks));
  }
  case Operand::Kind::BoxNew: return Value::box(eval_operand(st, op.elems.at(0)));
  case Operand::Kind::Move:
    for (int guard = 0;; ++guard) {
      if (guard > kGuard) throw Error("MOVE_LOANED", "cannot move " + op.place.str() + ": its loans cannot be ended");
      Loc loc = resolve(st, op.place, Access::Move);
      const Value& v = st.env.at(loc);
      if (contains_kind(v, Value::Kind::Bottom))
        throw Error("USE_OF_BOTTOM", "cannot move " + op.place.str() + ": the value is unusable (moved or ended)");
      if (contains_loan(v)) {
        end_loan(st, deepest_loan(v));
        continue;
      }
      bool reserved = false;
      std::function<void(const Value&)> find_res = [&](const Value& x) {
        if (reserved) return;
        if (x.kind == Value::Kind::ReservedBorrow) {
          reserved = true;
          activate(st, x.id);
          return;
        }
        for (const auto& k : x.kids) find_res(k);
      };
      Value snapshot = v;
      find_res(snapshot);
      if (reserved) continue;
      Value out = st.env.at(loc);
      st.env.at(loc) = Value::bottom();
      return out;
    }
  case Operand::Kind::Copy:
    for (int guard = 0;; ++guard) {
      if (guard > kGuard) throw Error("STUCK_REORG", "cannot copy " + op.place.str());
      Loc loc = resolve(st, op.place, Access::Read);
      const Value& v = st.env.at(loc);
      if (contains_kind(v, Value::Kind::Bottom))
        throw Error("USE_OF_BOTTOM", "cannot copy " + op.place.str() + ": the value is unusable (moved or ended)");
      if (v.kind == Value::Kind::MutLoan || contains_kind(v, Value::Kind::MutLoan)) {
        std::function<const Value*(const Value&)> find = [&](const Value& x) -> const Value* {
          if (x.kind == Value::Kind::MutLoan) return &x;
          for (const auto& k : x.kids)
            if (const Value* r = find(k)) return r;
          return nullptr;
        };
        end_loan(st, find(v)->id);
        continue;
      }
      Value snapshot = v;
      try {
        return copy_value(st.env, snapshot);
      } catch (Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (place " + op.place.str() + ")");
      }
    }
  }
  throw Error("INTERNAL", "bad operand");
}

std::optional<Value> Machine::eval_rvalue(State& st, const Rvalue& rv, const Place& dest) {
  switch (rv.kind) {
  case Rvalue::Kind::Use: return eval_operand(st, rv.ops.at(0));
  case Rvalue::Kind::MutBorrow:
    for (int guard = 0;; ++guard) {
      if (guard > kGuard) throw Error("STUCK_REORG", "cannot borrow " + rv.place.str());
      Loc loc = resolve(st, rv.place, Access::GhostMut);
      const Value& v = st.env.at(loc);
      if (contains_kind(v, Value::Kind::Bottom))
        throw Error("USE_OF_BOTTOM", "cannot borrow " + rv.place.str() + ": the value is unusable (moved or ended)");
      if (contains_loan(v)) {
        end_loan(st, deepest_loan(v));
        continue;
      }
      if (contains_kind(v, Value::Kind::ReservedBorrow)) {
        std::function<LoanId(const Value&)> find = [&](const Value& x) -> LoanId {
          if (x.kind == Value::Kind::ReservedBorrow) return x.id;
          for (const auto& k : x.kids)
            if (contains_kind(k, Value::Kind::ReservedBorrow)) return find(k);
          return 0;
        };
        activate(st, find(v));
        continue;
      }
      LoanId l = st.env.fresh_loan();
      Value out = Value::mut_borrow(l, v);
      st.env.at(loc) = Value::mut_loan(l);
      return out;
    }
  case Rvalue::Kind::SharedBorrow:
  case Rvalue::Kind::ReservedBorrow:
    for (int guard = 0;; ++guard) {
      if (guard > kGuard) throw Error("STUCK_REORG", "cannot borrow " + rv.place.str());
      Loc loc = resolve(st, rv.place, Access::Ghost);
      Value& v = st.env.at(loc);
      if (contains_kind(v, Value::Kind::Bottom))
        throw Error("USE_OF_BOTTOM", "cannot borrow " + rv.place.str() + ": the value is unusable (moved or ended)");
      if (contains_kind(v, Value::Kind::MutLoan)) {
        std::function<LoanId(const Value&)> find = [&](const Value& x) -> LoanId {
          if (x.kind == Value::Kind::MutLoan) return x.id;
          for (const auto& k : x.kids)
            if (contains_kind(k, Value::Kind::MutLoan)) return find(k);
          return 0;
        };
        end_loan(st, find(v));
        continue;
      }
      if (contains_kind(v, Value::Kind::ReservedBorrow)) {
        std::function<LoanId(const Value&)> find = [&](const Value& x) -> LoanId {
          if (x.kind == Value::Kind::ReservedBorrow) return x.id;
          for (const auto& k : x.kids)
            if (contains_kind(k, Value::Kind::ReservedBorrow)) return find(k);
          return 0;
        };
        activate(st, find(v));
        continue;
      }
      LoanId l = st.env.fresh_loan();
      if (v.kind == Value::Kind::SharedLoan) {
        v.ids.insert(std::upper_bound(v.ids.begin(), v.ids.end(), l), l);
      } else {
        Value inner = std::move(v);
        v = Value::shared_loan({l}, std::move(inner));
      }
      return rv.kind == Rvalue::Kind::SharedBorrow ? Value::shared_borrow(l) : Value::reserved_borrow(l);
    }
  case Rvalue::Kind::Unop: {
    Value a = eval_operand(st, rv.ops.at(0));
    if (a.kind == Value::Kind::Bool) return Value::boolean(!a.b);
    if (a.kind == Value::Kind::Int) {
      if (a.int_ty == Ty::Kind::U32) return a.n == 0 ? std::optional<Value>(a) : std::nullopt;
      if (-a.n < INT32_MIN || -a.n > INT32_MAX) return std::nullopt;
      return Value::integer(-a.n, a.int_ty);
    }
    if (a.kind != Value::Kind::Symbolic) throw Error("TYPE_ERROR", "bad operand " + value_str(a) + " for " + rv.str());
    bool is_not = rv.unop == UnOp::Not;
    Ty rt = is_not ? Ty::boolean() : a.ty;
    Value r = fresh_value(st, rt, dest.base);
    pure::Expr e = pure::Expr::prim(is_not ? "not" : std::string(width(a.ty.kind)) + "_neg", {to_expr(st, a)});
    st.events.push_back(Event{!is_not, pattern_of(st, r), std::move(e)});
    return r;
  }
  case Rvalue::Kind::Binop: {
    Value a = eval_operand(st, rv.ops.at(0));
    Value b = eval_operand(st, rv.ops.at(1));
    bool cmp = binop_is_cmp(rv.binop);
    bool concrete = a.kind != Value::Kind::Symbolic && b.kind != Value::Kind::Symbolic;
    if (concrete) {
      if (cmp) return Value::boolean(compare(rv.binop, a, b));
      if (a.kind != Value::Kind::Int || b.kind != Value::Kind::Int)
        throw Error("TYPE_ERROR", "arithmetic on non-integers in " + rv.str());
      auto r = checked(rv.binop, a.n, b.n, a.int_ty);
      if (!r) return std::nullopt;
      return Value::integer(*r, a.int_ty);
    }
    Ty::Kind k = a.kind == Value::Kind::Symbolic ? a.ty.kind : a.kind == Value::Kind::Int ? a.int_ty : Ty::Kind::Bool;
    if (k == Ty::Kind::Bool && b.kind == Value::Kind::Symbolic) k = b.ty.kind;
    if (k == Ty::Kind::Bool && b.kind == Value::Kind::Int) k = b.int_ty;
    Ty rt = cmp ? Ty::boolean() : Ty{k, {}, {}};
    pure::Expr e = pure::Expr::prim(prim_name(rv.binop, k), {to_expr(st, a), to_expr(st, b)});
    Value r = fresh_value(st, rt, dest.base);
    st.events.push_back(Event{!cmp, pattern_of(st, r), std::move(e)});
    return r;
  }
  }
  throw Error("INTERNAL", "bad rvalue");
}

void Machine::assign(State& st, const Place& p, Value v) {
  for (int guard = 0;; ++guard) {
    if (guard > kGuard) throw Error("ASSIGN_OVER_LOAN", "cannot clear the loans of " + p.str());
    Loc loc = resolve(st, p, Access::Write);
    const Value& old = st.env.at(loc);
    if (!has_no_outer_loans(old)) {
      const Value* l = first_outer_loan(old);
      end_loan(st, l->kind == Value::Kind::MutLoan ? l->id : l->ids.front());
      continue;
    }
    Ty ty = place_ty(st, p);
    Value prev = std::move(st.env.at(loc));
    st.env.at(loc) = std::move(v);
    st.env.push_ghost(p.base, std::move(prev), std::move(ty));
    return;
  }
}

void Machine::clear_frame(State& st, int frame, const FnDecl& f) {
  (void)frame;
  st.protected_loans.clear();
  if (auto r = st.env.find_var(f.ret.name)) collect_borrows(std::get<Binding>(st.env.entries[*r]).value, st.protected_loans);
  auto clear = [&](const Var& var) {
    auto i = st.env.find_var(var.name);
    if (!i) return;
    if (std::get<Binding>(st.env.entries[*i]).value.kind == Value::Kind::Bottom) return;
    assign(st, Place{var.name, {}}, Value::bottom());
  };
  try {
    for (const auto& a : f.args) clear(a);
    for (const auto& l : f.locals) clear(l);
  } catch (...) {
    st.protected_loans.clear();
    throw;
  }
  st.protected_loans.clear();
  st.env.gc();
}

void Machine::after_stmt(State& st, const Stmt* s) {
  st.env.gc();
  if (opts_.check_invariants) {
    auto ds = check_invariants(st.env, &prog_, !symbolic_);
    if (!ds.empty()) throw Error("INVARIANT_VIOLATION", ds.front().code + ": " + ds.front().message);
  }
  if (opts_.on_step) opts_.on_step(st.env);
  if (opts_.trace) st.trace.push_back((s ? one_line(*s) : std::string("return")) + "  // " + st.env.dump());
}

// Calls in concrete mode

void Machine::concrete_call(State& st, const Stmt& s, Cont& k) {
  const FnDecl* callee = prog_.find_fn(s.fn);
  if (!callee) throw Error("UNKNOWN_FN", "unknown function " + s.fn);
  if (!callee->body) throw Error("OPAQUE_CALL_IN_CONCRETE_MODE", "function " + s.fn + " has no body");
  std::vector<Value> args;
  for (const auto& op : s.args) args.push_back(eval_operand(st, op));
  FrameInfo fi;
  fi.fn = callee;
  for (size_t i = 0; i < callee->ty_params.size() && i < s.ty_args.size(); ++i) fi.subst[callee->ty_params[i]] = s.ty_args[i];
  int caller = st.env.frame;
  int id = ++st.frame_counter;
  st.env.frame = id;
  Ty rt = subst_ty(callee->ret.ty, fi.subst);
  st.env.push_binding(callee->ret.name, rt.is_unit() ? Value::unit() : Value::bottom(), rt, false);
  for (size_t i = 0; i < callee->args.size(); ++i)
    st.env.push_binding(callee->args[i].name, std::move(args.at(i)), subst_ty(callee->args[i].ty, fi.subst), false);
  for (const auto& l : callee->locals) st.env.push_binding(l.name, Value::bottom(), subst_ty(l.ty, fi.subst), false);
  st.frames[id] = std::move(fi);
  Item pop;
  pop.pop_frame = true;
  pop.dest = s.place;
  pop.caller_frame = caller;
  k.push_back(std::move(pop));
  k.push_back(Item{&*callee->body, false, {}, 0});
}

void Machine::return_frame(State& st, const Item& it) {
  const FnDecl& f = *st.frames.at(st.env.frame).fn;
  clear_frame(st, st.env.frame, f);
  Value v = eval_operand(st, Operand::move(Place{f.ret.name, {}}));
  for (auto& e : st.env.entries)
    if (auto* b = std::get_if<Binding>(&e))
      if (b->frame == st.env.frame) b->ghost = true;
  st.frames.erase(st.env.frame);
  st.env.frame = it.caller_frame;
  assign(st, it.dest, std::move(v));
  st.env.gc();
}

// Execution

Tree Machine::build(State& st, Tree node) {
  auto evs = std::move(st.events);
  st.events.clear();
  for (auto it = evs.rbegin(); it != evs.rend(); ++it) {
    Tree t;
    t.kind = it->monadic ? Tree::Kind::Bind : Tree::Kind::Let;
    t.pat = std::move(it->pat);
    t.rhs = std::move(it->rhs);
    t.kids.push_back(std::move(node));
    node = std::move(t);
  }
  return node;
}

Tree Machine::leaf(State& st, bool panic) {
  if (!panic) {
    const FnDecl& f = *st.frames.at(st.env.frame).fn;
    clear_frame(st, st.env.frame, f);
    if (opts_.check_invariants) {
      auto ds = check_invariants(st.env, &prog_, !symbolic_);
      if (!ds.empty()) throw Error("INVARIANT_VIOLATION", ds.front().code + ": " + ds.front().message);
    }
  }
  auto evs = std::move(st.events);
  st.events.clear();
  Tree t;
  t.kind = Tree::Kind::Leaf;
  t.panic = panic;
  t.leaf = std::make_shared<State>(std::move(st));
  State holder;
  holder.events = std::move(evs);
  return build(holder, std::move(t));
}

Tree Machine::branch_bool(State& st, const Cont& k, const Value& c, const Stmt& s) {
  Tree node;
  node.kind = Tree::Kind::If;
  node.scrut = to_expr(st, c);
  auto evs = std::move(st.events);
  st.events.clear();
  for (int i = 0; i < 2; ++i) {
    State s2 = st;
    substitute(s2, c.id, Value::boolean(i == 0));
    Cont k2 = k;
    k2.push_back(Item{&s.kids.at(static_cast<size_t>(i)), false, {}, 0});
    node.kids.push_back(exec(std::move(s2), std::move(k2)));
  }
  st.events = std::move(evs);
  return build(st, std::move(node));
}

Tree Machine::branch_match(State& st, const Cont& k, const Loc& at, const Stmt& s) {
  Value sv = st.env.at(at);
  const TypeDecl* td = sv.ty.kind == Ty::Kind::Adt ? prog_.find_type(sv.ty.name) : nullptr;
  if (!td) throw Error("EXPAND_UNSUPPORTED", "cannot match on s" + std::to_string(sv.id) + " : " + sv.ty.str());
  Tree node;
  node.kind = Tree::Kind::Match;
  node.scrut = to_expr(st, sv);
  auto evs = std::move(st.events);
  st.events.clear();
  for (size_t i = 0; i < s.arm_ctors.size(); ++i) {
    int ci = td->ctor_index(s.arm_ctors[i]);
    if (ci < 0) throw Error("UNKNOWN_CTOR", "unknown constructor " + s.arm_ctors[i]);
    const CtorDecl& cd = td->ctors[static_cast<size_t>(ci)];
    auto fts = ctor_field_types(*td, cd, sv.ty.args);
    State s2 = st;
    std::vector<Value> fields;
    for (size_t j = 0; j < fts.size(); ++j) {
      std::string hint;
      if (i < s.arm_hints.size() && j < s.arm_hints[i].size()) hint = s.arm_hints[i][j];
      if (hint.empty() || hint == "_") {
        const std::string& fname = cd.field_names[j];
        hint = (!fname.empty() && !std::isdigit(static_cast<unsigned char>(fname[0]))) ? fname : "s";
      }
      fields.push_back(fresh_value(s2, fts[j], hint));
    }
    Value cv = Value::ctor(cd.name, std::move(fields));
    node.arms.push_back(pattern_of(s2, cv));
    substitute(s2, sv.id, cv);
    Cont k2 = k;
    k2.push_back(Item{&s.kids.at(i), false, {}, 0});
    node.kids.push_back(exec(std::move(s2), std::move(k2)));
  }
  st.events = std::move(evs);
  return build(st, std::move(node));
}

Tree Machine::exec(State st, Cont k) {
  for (;;) {
    if (++st.steps > opts_.max_steps) throw Error("STEP_LIMIT", "step limit of " + std::to_string(opts_.max_steps) + " exceeded");
    if (k.empty()) return leaf(st, false);
    Item it = std::move(k.back());
    k.pop_back();
    if (it.pop_frame) {
      return_frame(st, it);
      after_stmt(st, nullptr);
      continue;
    }
    const Stmt& s = *it.s;
    try {
      switch (s.kind) {
      case Stmt::Kind::Nop: continue;
      case Stmt::Kind::Seq:
        k.push_back(Item{&s.kids.at(1), false, {}, 0});
        k.push_back(Item{&s.kids.at(0), false, {}, 0});
        continue;
      case Stmt::Kind::Assign: {
        auto v = eval_rvalue(st, s.rv, s.place);
        if (!v) return leaf(st, true);
        assign(st, s.place, std::move(*v));
        break;
      }
      case Stmt::Kind::Free: {
        Loc loc = resolve(st, s.place, Access::Write);
        if (st.env.at(loc).kind != Value::Kind::Box)
          throw Error("FREE_NOT_BOX", "free of " + s.place.str() + " which does not hold a box");
        assign(st, s.place, Value::bottom());
        break;
      }
      case Stmt::Kind::Call:
        if (symbolic_) {
          abstract_call(st, s);
        } else {
          concrete_call(st, s, k);
        }
        break;
      case Stmt::Kind::If: {
        Value c = eval_operand(st, s.cond);
        if (c.kind == Value::Kind::Symbolic) {
          after_stmt(st, &s);
          return branch_bool(st, k, c, s);
        }
        if (c.kind != Value::Kind::Bool) throw Error("TYPE_ERROR", "condition is not a boolean: " + value_str(c));
        after_stmt(st, &s);
        k.push_back(Item{&s.kids.at(c.b ? 0 : 1), false, {}, 0});
        continue;
      }
      case Stmt::Kind::Match: {
        for (int guard = 0;; ++guard) {
          if (guard > kGuard) throw Error("STUCK_REORG", "cannot read " + s.place.str());
          Loc loc = resolve(st, s.place, Access::Read);
          while (st.env.at(loc).kind == Value::Kind::SharedLoan) loc.path.push_back(0);
          const Value& v = st.env.at(loc);
          if (v.kind == Value::Kind::MutLoan) {
            end_loan(st, v.id);
            continue;
          }
          if (v.kind == Value::Kind::Bottom)
            throw Error("USE_OF_BOTTOM", "cannot match on " + s.place.str() + ": the value is unusable (moved or ended)");
          if (v.kind == Value::Kind::Symbolic) {
            after_stmt(st, &s);
            return branch_match(st, k, loc, s);
          }
          if (v.kind != Value::Kind::Ctor) throw Error("PATH_MISMATCH", "cannot match on " + value_str(v));
          auto arm = std::find(s.arm_ctors.begin(), s.arm_ctors.end(), v.name);
          if (arm == s.arm_ctors.end()) throw Error("INCOMPLETE_MATCH", "no arm for " + v.name);
          after_stmt(st, &s);
          k.push_back(Item{&s.kids.at(static_cast<size_t>(arm - s.arm_ctors.begin())), false, {}, 0});
          break;
        }
        continue;
      }
      case Stmt::Kind::Return:
        while (!k.empty() && !k.back().pop_frame) k.pop_back();
        if (k.empty()) {
          if (opts_.trace) st.trace.push_back("return  // " + st.env.dump());
          return leaf(st, false);
        }
        it = std::move(k.back());
        k.pop_back();
        return_frame(st, it);
        break;
      case Stmt::Kind::Panic:
        if (opts_.trace) st.trace.push_back("panic!()  // " + st.env.dump());
        return leaf(st, true);
      }
      after_stmt(st, &s);
    } catch (Error& e) {
      e.set_loc(s.loc);
      if (fail_dump.empty()) fail_dump = st.env.dump();
      throw;
    }
  }
}

} // namespace llbc::engine

// Concrete entry point

namespace llbc {

ExecResult run_program(const Program& p, const std::string& entry, const RunOptions& opts) {
  using namespace engine;
  const FnDecl* f = p.find_fn(entry);
  if (!f) throw Error("UNKNOWN_FN", "no entry function " + entry);
  if (!f->args.empty()) throw Error("BAD_ENTRY", "entry function " + entry + " takes arguments");
  if (!f->ty_params.empty() || !f->region_params.empty()) throw Error("BAD_ENTRY", "entry function " + entry + " is generic");
  if (!f->body) throw Error("OPAQUE_CALL_IN_CONCRETE_MODE", "entry function " + entry + " has no body");
  Machine m(p, opts, false);
  State st;
  st.frames[0] = FrameInfo{f, {}};
  st.env.push_binding(f->ret.name, f->ret.ty.is_unit() ? Value::unit() : Value::bottom(), f->ret.ty, false);
  for (const auto& l : f->locals) st.env.push_binding(l.name, Value::bottom(), l.ty, false);
  Cont k{Item{&*f->body, false, {}, 0}};
  Tree t = m.exec(std::move(st), std::move(k));
  ExecResult r;
  r.kind = t.panic ? ExecResult::Kind::Panicked : ExecResult::Kind::Returned;
  State& fin = *t.leaf;
  if (!t.panic) {
    auto i = fin.env.find_var(f->ret.name);
    if (i) r.value = std::get<Binding>(fin.env.entries[*i]).value;
    if (contains_kind(r.value, Value::Kind::Bottom)) throw Error("USE_OF_BOTTOM", "return value of " + entry + " is unusable");
  }
  for (auto& e : fin.env.entries)
    if (auto* b = std::get_if<Binding>(&e)) b->ghost = true;
  fin.env.gc();
  r.env = std::move(fin.env);
  r.trace = std::move(fin.trace);
  return r;
}

} // namespace llbc
