// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Call-by-value evaluator for pure programs, bounded by call fuel.

#include <pthread.h>

#include <climits>
#include <exception>

#include "llbc/error.hpp"
#include "llbc/pure.hpp"

namespace llbc::pure {

namespace {

const char* const kMonadic[] = {"add", "sub", "mul", "div", "rem", "neg"};
const char* const kPure[] = {"eq", "ne", "lt", "le", "gt", "ge", "not"};

bool width_prefixed(const std::string& op, std::string* base, Ty::Kind* w) {
  for (const char* p : {"i32_", "u32_"}) {
    if (op.rfind(p, 0) != 0) continue;
    if (base) *base = op.substr(4);
    if (w) *w = p[0] == 'i' ? Ty::Kind::I32 : Ty::Kind::U32;
    return true;
  }
  return false;
}

// Nesting bound on calls; deeper evaluations are reported as out of fuel.
constexpr uint64_t kMaxDepth = 200000;

struct Out {
  enum class Kind : uint8_t { Value, Fail, OutOfFuel };
  Kind kind = Kind::Value;
  Val v;
};

class Evaluator {
public:
  Evaluator(const Program& p, uint64_t fuel) : p_(p), fuel_(fuel) {}

  Out call(const std::string& fn, std::vector<Val> args) {
    const FunDef* f = p_.find(fn);
    if (!f) throw Error("ILL_SCOPED", "unknown function " + fn);
    if (!f->body) throw Error("OPAQUE", "function " + fn + " has no body");
    if (args.size() != f->params.size())
      throw Error("ILL_SCOPED", fn + " expects " + std::to_string(f->params.size()) + " arguments");
    if (fuel_ == 0 || depth_ >= kMaxDepth) return Out{Out::Kind::OutOfFuel, {}};
    --fuel_;
    ++depth_;
    std::vector<std::pair<std::string, Val>> saved;
    saved.swap(env_);
    for (size_t i = 0; i < args.size(); ++i) env_.emplace_back(f->params[i].name, std::move(args[i]));
    Out r = monadic(*f->body);
    env_.swap(saved);
    --depth_;
    return r;
  }

private:
  const Val& lookup(const std::string& x) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == x) return it->second;
    throw Error("ILL_SCOPED", "unbound variable " + x);
  }

  bool match(const Pattern& p, const Val& v, size_t& pushed) {
    switch (p.kind) {
    case Pattern::Kind::Wild: return true;
    case Pattern::Kind::Var:
      env_.emplace_back(p.name, v);
      ++pushed;
      return true;
    case Pattern::Kind::Const:
      if (p.cty == Ty::Kind::Bool) return v.kind == Val::Kind::Bool && v.b == p.b;
      return v.kind == Val::Kind::Int && v.n == p.n;
    case Pattern::Kind::Tuple:
      if (v.kind != Val::Kind::Tuple || v.kids.size() != p.kids.size()) {
        if (p.kids.empty()) return false;
        throw Error("ILL_SCOPED", "tuple pattern against " + val_str(v));
      }
      for (size_t i = 0; i < p.kids.size(); ++i)
        if (!match(p.kids[i], v.kids[i], pushed)) return false;
      return true;
    case Pattern::Kind::Ctor:
      if (v.kind != Val::Kind::Ctor) throw Error("ILL_SCOPED", "constructor pattern against " + val_str(v));
      if (v.name != p.name) return false;
      if (v.kids.size() != p.kids.size()) throw Error("ILL_SCOPED", "arity mismatch on " + p.name);
      for (size_t i = 0; i < p.kids.size(); ++i)
        if (!match(p.kids[i], v.kids[i], pushed)) return false;
      return true;
    }
    return false;
  }

  void bind(const Pattern& p, const Val& v, size_t& pushed) {
    if (!match(p, v, pushed)) throw Error("ILL_SCOPED", "refutable pattern in binding does not match " + val_str(v));
  }

  void pop(size_t n) { env_.resize(env_.size() - n); }

  int64_t as_int(const Val& v, const std::string& op) const {
    if (v.kind != Val::Kind::Int) throw Error("ILL_SCOPED", op + " applied to " + val_str(v));
    return v.n;
  }

  bool as_bool(const Val& v, const std::string& what) const {
    if (v.kind != Val::Kind::Bool) throw Error("ILL_SCOPED", what + " on non-boolean " + val_str(v));
    return v.b;
  }

  static bool in_range(int64_t n, Ty::Kind w) {
    return w == Ty::Kind::U32 ? n >= 0 && n <= UINT32_MAX : n >= INT32_MIN && n <= INT32_MAX;
  }

  Out arith(const std::string& op, const std::vector<Val>& a) {
    std::string base;
    Ty::Kind w = Ty::Kind::I32;
    width_prefixed(op, &base, &w);
    auto fail = Out{Out::Kind::Fail, {}};
    if (base == "neg") {
      if (a.size() != 1) throw Error("ILL_SCOPED", op + " expects 1 argument");
      int64_t r = -as_int(a[0], op);
      return in_range(r, w) ? Out{Out::Kind::Value, Val::integer(r, w)} : fail;
    }
    if (a.size() != 2) throw Error("ILL_SCOPED", op + " expects 2 arguments");
    int64_t x = as_int(a[0], op), y = as_int(a[1], op), r = 0;
    if (base == "add") r = x + y;
    else if (base == "sub") r = x - y;
    else if (base == "mul") r = x * y;
    else if (base == "div" || base == "rem") {
      if (y == 0) return fail;
      r = base == "div" ? x / y : x % y;
    } else throw Error("ILL_SCOPED", "unknown primitive " + op);
    return in_range(r, w) ? Out{Out::Kind::Value, Val::integer(r, w)} : fail;
  }

  Val pure_prim(const std::string& op, const std::vector<Val>& a) {
    if (op == "not") {
      if (a.size() != 1) throw Error("ILL_SCOPED", "not expects 1 argument");
      return Val::boolean(!as_bool(a[0], "not"));
    }
    if (a.size() != 2) throw Error("ILL_SCOPED", op + " expects 2 arguments");
    if (op == "eq") return Val::boolean(a[0] == a[1]);
    if (op == "ne") return Val::boolean(!(a[0] == a[1]));
    int64_t x = as_int(a[0], op), y = as_int(a[1], op);
    if (op == "lt") return Val::boolean(x < y);
    if (op == "le") return Val::boolean(x <= y);
    if (op == "gt") return Val::boolean(x > y);
    if (op == "ge") return Val::boolean(x >= y);
    throw Error("ILL_SCOPED", "unknown primitive " + op);
  }

  std::vector<Val> values(const std::vector<Expr>& es, size_t from = 0) {
    std::vector<Val> out;
    for (size_t i = from; i < es.size(); ++i) out.push_back(value(es[i]));
    return out;
  }

  // Pure position.
  Val value(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Var: return lookup(e.name);
    case Expr::Kind::Const:
      return e.cty == Ty::Kind::Bool ? Val::boolean(e.b) : Val::integer(e.n, e.cty);
    case Expr::Kind::Tuple: return Val::tuple(values(e.kids));
    case Expr::Kind::Ctor: return Val::ctor(e.name, values(e.kids));
    case Expr::Kind::Prim:
      if (prim_is_monadic(e.name) || !prim_known(e.name))
        throw Error("ILL_SCOPED", "monadic primitive " + e.name + " in pure position");
      return pure_prim(e.name, values(e.kids));
    case Expr::Kind::If: return as_bool(value(e.kids[0]), "if") ? value(e.kids[1]) : value(e.kids[2]);
    case Expr::Kind::Let: {
      Val v = value(e.kids[0]);
      size_t n = 0;
      bind(e.pats[0], v, n);
      Val r = value(e.kids[1]);
      pop(n);
      return r;
    }
    case Expr::Kind::Match: {
      Val s = value(e.kids[0]);
      for (size_t i = 0; i < e.pats.size(); ++i) {
        size_t n = 0;
        if (match(e.pats[i], s, n)) {
          Val r = value(e.kids[i + 1]);
          pop(n);
          return r;
        }
        pop(n);
      }
      throw Error("ILL_SCOPED", "non-exhaustive match on " + val_str(s));
    }
    default: throw Error("ILL_SCOPED", "monadic expression in pure position");
    }
  }

  // Monadic position.
  Out monadic(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Ret: return Out{Out::Kind::Value, value(e.kids[0])};
    case Expr::Kind::Fail: return Out{Out::Kind::Fail, {}};
    case Expr::Kind::Call: return call(e.name, values(e.kids));
    case Expr::Kind::Prim: {
      if (!prim_known(e.name)) throw Error("ILL_SCOPED", "unknown primitive " + e.name);
      if (!prim_is_monadic(e.name)) throw Error("ILL_SCOPED", "pure primitive " + e.name + " in monadic position");
      auto a = values(e.kids);
      if (e.name == "massert") {
        if (a.size() != 1) throw Error("ILL_SCOPED", "massert expects 1 argument");
        return as_bool(a[0], "massert") ? Out{Out::Kind::Value, Val::unit()} : Out{Out::Kind::Fail, {}};
      }
      return arith(e.name, a);
    }
    case Expr::Kind::If: return as_bool(value(e.kids[0]), "if") ? monadic(e.kids[1]) : monadic(e.kids[2]);
    case Expr::Kind::Match: {
      Val s = value(e.kids[0]);
      for (size_t i = 0; i < e.pats.size(); ++i) {
        size_t n = 0;
        if (match(e.pats[i], s, n)) {
          Out r = monadic(e.kids[i + 1]);
          pop(n);
          return r;
        }
        pop(n);
      }
      throw Error("ILL_SCOPED", "non-exhaustive match on " + val_str(s));
    }
    case Expr::Kind::Let:
    case Expr::Kind::Bind: {
      Val v;
      if (e.kind == Expr::Kind::Let) {
        v = value(e.kids[0]);
      } else {
        Out r = monadic(e.kids[0]);
        if (r.kind != Out::Kind::Value) return r;
        v = std::move(r.v);
      }
      size_t n = 0;
      bind(e.pats[0], v, n);
      Out r = monadic(e.kids[1]);
      pop(n);
      return r;
    }
    default: throw Error("ILL_SCOPED", "pure expression in monadic position");
    }
  }

  const Program& p_;
  uint64_t fuel_;
  uint64_t depth_ = 0;
  std::vector<std::pair<std::string, Val>> env_;
};

struct Job {
  const Program* p;
  const std::string* fn;
  const std::vector<Val>* args;
  uint64_t fuel;
  Outcome out;
  std::exception_ptr err;
};

void* run_job(void* raw) {
  auto* j = static_cast<Job*>(raw);
  try {
    Evaluator ev(*j->p, j->fuel);
    Out r = ev.call(*j->fn, *j->args);
    j->out.kind = r.kind == Out::Kind::Value ? Outcome::Kind::Return
                  : r.kind == Out::Kind::Fail ? Outcome::Kind::Fail
                                              : Outcome::Kind::OutOfFuel;
    j->out.value = std::move(r.v);
  } catch (...) {
    j->err = std::current_exception();
  }
  return nullptr;
}

} // namespace

bool prim_is_monadic(const std::string& op) {
  if (op == "massert") return true;
  std::string base;
  if (!width_prefixed(op, &base, nullptr)) return false;
  for (const char* m : kMonadic)
    if (base == m) return true;
  return false;
}

bool prim_known(const std::string& op) {
  if (prim_is_monadic(op)) return true;
  for (const char* m : kPure)
    if (op == m) return true;
  return false;
}

const FunDef* Program::find(const std::string& name) const {
  for (const auto& f : funs)
    if (f.name == name) return &f;
  return nullptr;
}

const TypeDef* Program::ctor_owner(const std::string& ctor) const {
  for (const auto& t : types)
    for (const auto& c : t.ctors)
      if (c.name == ctor) return &t;
  return nullptr;
}

std::string val_str(const Val& v) {
  switch (v.kind) {
  case Val::Kind::Bool: return v.b ? "true" : "false";
  case Val::Kind::Int: return std::to_string(v.n);
  case Val::Kind::Tuple:
  case Val::Kind::Ctor: {
    std::string s = v.kind == Val::Kind::Ctor ? v.name : "";
    if (v.kind == Val::Kind::Ctor && v.kids.empty()) return s;
    s += "(";
    for (size_t i = 0; i < v.kids.size(); ++i) s += (i ? ", " : "") + val_str(v.kids[i]);
    return s + ")";
  }
  }
  return "?";
}

std::string outcome_str(const Outcome& o) {
  switch (o.kind) {
  case Outcome::Kind::Return: return "Return(" + val_str(o.value) + ")";
  case Outcome::Kind::Fail: return "Fail";
  case Outcome::Kind::OutOfFuel: return "OutOfFuel";
  }
  return "?";
}

Outcome eval_fun(const Program& p, const std::string& fn, const std::vector<Val>& args, uint64_t fuel) {
  // Deep recursion in the evaluated program maps onto the native stack, so
  // evaluation runs on a thread with a large one.
  Job j{&p, &fn, &args, fuel, {}, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, size_t(1) << 30);
  pthread_t th;
  if (pthread_create(&th, &attr, run_job, &j) != 0) {
    pthread_attr_destroy(&attr);
    run_job(&j);
  } else {
    pthread_attr_destroy(&attr);
    pthread_join(th, nullptr);
  }
  if (j.err) std::rethrow_exception(j.err);
  return j.out;
}

} // namespace llbc::pure
