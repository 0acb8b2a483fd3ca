// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Reader for the neutral printing style.

#include <cctype>
#include <set>

#include "llbc/error.hpp"
#include "llbc/pure.hpp"

namespace llbc::pure {

namespace {

struct Tok {
  enum class Kind : uint8_t { Ident, Int, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t n = 0;
  Ty::Kind ity = Ty::Kind::I32;
  SrcLoc loc;
};

class Lexer {
public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Tok> run() {
    std::vector<Tok> out;
    for (;;) {
      skip();
      Tok t;
      t.loc = {line_, col_};
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t b = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '\''))
          adv();
        t.kind = Tok::Kind::Ident;
        t.text = std::string(s_.substr(b, i_ - b));
        if (t.text == "let" && i_ < s_.size() && s_[i_] == '*') {
          adv();
          t.text = "let*";
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
        size_t b = i_;
        adv();
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) adv();
        t.kind = Tok::Kind::Int;
        t.text = std::string(s_.substr(b, i_ - b));
        t.n = std::stoll(t.text);
        if (s_.substr(i_, 3) == "i32" || s_.substr(i_, 3) == "u32") {
          t.ity = s_[i_] == 'u' ? Ty::Kind::U32 : Ty::Kind::I32;
          adv(), adv(), adv();
        }
      } else if (s_.substr(i_, 2) == "->") {
        t.kind = Tok::Kind::Sym;
        t.text = "->";
        adv(), adv();
      } else {
        t.kind = Tok::Kind::Sym;
        t.text = std::string(1, c);
        adv();
      }
      out.push_back(std::move(t));
    }
  }

private:
  void adv() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    for (;;) {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) adv();
      if (s_.substr(i_, 2) != "(*") return;
      int depth = 0;
      while (i_ < s_.size()) {
        if (s_.substr(i_, 2) == "(*") {
          ++depth;
          adv(), adv();
        } else if (s_.substr(i_, 2) == "*)") {
          adv(), adv();
          if (--depth == 0) break;
        } else {
          adv();
        }
      }
    }
  }

  std::string_view s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class Reader {
public:
  explicit Reader(std::vector<Tok> toks) : t_(std::move(toks)) {}

  Program program() {
    Program p;
    if (is("module")) {
      next();
      ident();
    }
    while (peek().kind != Tok::Kind::End) {
      if (is("type")) {
        p.types.push_back(type_def());
      } else if (is("val")) {
        next();
        p.funs.push_back(fun_def(false));
        p.groups.push_back({p.funs.back().name});
        p.group_rec.push_back(false);
      } else if (is("let")) {
        next();
        bool rec = false;
        if (is("rec")) {
          next();
          rec = true;
        }
        p.funs.push_back(fun_def(true));
        p.groups.push_back({p.funs.back().name});
        p.group_rec.push_back(rec);
      } else if (is("and")) {
        if (p.groups.empty()) fail("declaration", {"let"});
        next();
        p.funs.push_back(fun_def(true));
        p.groups.back().push_back(p.funs.back().name);
      } else {
        fail("declaration", {"type", "let", "val", "and"});
      }
    }
    return p;
  }

private:
  const Tok& peek(size_t k = 0) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
  Tok next() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
  bool is(const char* s, size_t k = 0) const {
    const Tok& t = peek(k);
    return t.kind != Tok::Kind::Int && t.kind != Tok::Kind::End && t.text == s;
  }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    const Tok& t = peek();
    std::string got = t.kind == Tok::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + what + ", found " + got, t.loc, std::move(expected));
  }

  void expect(const char* s) {
    if (!is(s)) fail(std::string("'") + s + "'", {s});
    next();
  }

  std::string ident() {
    if (peek().kind != Tok::Kind::Ident) fail("identifier", {"identifier"});
    return next().text;
  }

  std::vector<std::string> ty_params() {
    std::vector<std::string> out;
    if (!is("<")) return out;
    next();
    while (!is(">")) {
      out.push_back(ident());
      if (!is(">")) expect(",");
    }
    next();
    return out;
  }

  PTy ty() {
    if (is("(")) {
      next();
      if (is(")")) {
        next();
        return Ty::unit();
      }
      std::vector<PTy> ts{ty()};
      while (is("*")) {
        next();
        ts.push_back(ty());
      }
      expect(")");
      return ts.size() == 1 ? ts[0] : Ty::tuple(std::move(ts));
    }
    std::string n = ident();
    if (n == "bool") return Ty::boolean();
    if (n == "i32") return Ty::i32();
    if (n == "u32") return Ty::u32();
    if (n == "unit") return Ty::unit();
    if (tyvars_.count(n)) return Ty::var(n);
    PTy t = Ty::adt(n, {});
    if (is("<")) {
      next();
      while (!is(">")) {
        t.args.push_back(ty());
        if (!is(">")) expect(",");
      }
      next();
    }
    return t;
  }

  TypeDef type_def() {
    expect("type");
    TypeDef d;
    d.name = ident();
    d.ty_params = ty_params();
    tyvars_ = {d.ty_params.begin(), d.ty_params.end()};
    expect("=");
    while (is("|")) {
      next();
      CtorSig c;
      c.name = ident();
      ctors_.insert(c.name);
      if (is("(")) {
        next();
        while (!is(")")) {
          c.fields.push_back(ty());
          if (!is(")")) expect(",");
        }
        next();
      }
      d.ctors.push_back(std::move(c));
    }
    tyvars_.clear();
    return d;
  }

  FunDef fun_def(bool with_body) {
    FunDef f;
    f.name = ident();
    f.ty_params = ty_params();
    tyvars_ = {f.ty_params.begin(), f.ty_params.end()};
    expect("(");
    while (!is(")")) {
      Param p;
      p.name = ident();
      expect(":");
      p.ty = ty();
      f.params.push_back(std::move(p));
      if (!is(")")) expect(",");
    }
    next();
    expect(":");
    f.ret = ty();
    if (with_body) {
      expect("=");
      f.body = expr();
    }
    tyvars_.clear();
    return f;
  }

  Pattern pattern() {
    const Tok& t = peek();
    if (t.kind == Tok::Kind::Int) {
      Pattern p;
      p.kind = Pattern::Kind::Const;
      p.cty = t.ity;
      p.n = t.n;
      next();
      return p;
    }
    if (is("(")) {
      next();
      std::vector<Pattern> ps;
      while (!is(")")) {
        ps.push_back(pattern());
        if (!is(")")) expect(",");
      }
      next();
      if (ps.empty()) {
        Pattern u;
        u.kind = Pattern::Kind::Tuple;
        return u;
      }
      return Pattern::tuple(std::move(ps));
    }
    std::string n = ident();
    if (n == "_") return Pattern::wild();
    if (n == "true" || n == "false") {
      Pattern p;
      p.kind = Pattern::Kind::Const;
      p.cty = Ty::Kind::Bool;
      p.b = n == "true";
      return p;
    }
    if (!ctors_.count(n)) return Pattern::var(n);
    std::vector<Pattern> ps;
    if (is("(")) {
      next();
      while (!is(")")) {
        ps.push_back(pattern());
        if (!is(")")) expect(",");
      }
      next();
    }
    return Pattern::ctor(n, std::move(ps));
  }

  std::vector<Expr> args() {
    expect("(");
    std::vector<Expr> out;
    while (!is(")")) {
      out.push_back(expr());
      if (!is(")")) expect(",");
    }
    next();
    return out;
  }

  Expr expr() {
    if (is("let") || is("let*")) {
      bool monadic = next().text == "let*";
      Pattern p = pattern();
      expect("=");
      Expr rhs = expr();
      expect("in");
      Expr body = expr();
      return monadic ? Expr::bind(std::move(p), std::move(rhs), std::move(body))
                     : Expr::let(std::move(p), std::move(rhs), std::move(body));
    }
    if (is("if")) {
      next();
      Expr c = expr();
      expect("then");
      Expr a = expr();
      expect("else");
      Expr b = expr();
      return Expr::if_(std::move(c), std::move(a), std::move(b));
    }
    if (is("match")) {
      next();
      Expr e;
      e.kind = Expr::Kind::Match;
      e.kids.push_back(expr());
      expect("with");
      while (is("|")) {
        next();
        e.pats.push_back(pattern());
        expect("->");
        e.kids.push_back(expr());
      }
      expect("end");
      return e;
    }
    if (is("return")) {
      next();
      return Expr::ret(primary());
    }
    if (is("fail")) {
      next();
      return Expr::fail();
    }
    return primary();
  }

  Expr primary() {
    const Tok& t = peek();
    if (t.kind == Tok::Kind::Int) {
      Expr e = Expr::integer(t.n, t.ity);
      next();
      return e;
    }
    if (is("(")) {
      next();
      std::vector<Expr> es;
      while (!is(")")) {
        es.push_back(expr());
        if (!is(")")) expect(",");
      }
      next();
      return es.empty() ? Expr::unit() : Expr::tuple(std::move(es));
    }
    if (t.kind != Tok::Kind::Ident) fail("expression", {"expression"});
    static const std::set<std::string> kw = {"let", "let*", "in", "if", "then", "else", "match", "with",
                                             "end", "return", "fail", "type", "val", "and", "rec"};
    if (kw.count(t.text)) fail("expression", {"expression"});
    std::string n = next().text;
    if (n == "true" || n == "false") return Expr::boolean(n == "true");
    if (is("[")) {
      next();
      std::vector<PTy> tys;
      while (!is("]")) {
        tys.push_back(ty());
        if (!is("]")) expect(",");
      }
      next();
      return Expr::call(n, std::move(tys), args());
    }
    if (ctors_.count(n)) return Expr::ctor(n, is("(") ? args() : std::vector<Expr>{});
    if (is("(")) {
      auto as = args();
      if (prim_known(n)) return Expr::prim(n, std::move(as));
      return Expr::call(n, {}, std::move(as));
    }
    return Expr::var(n);
  }

  std::vector<Tok> t_;
  size_t i_ = 0;
  std::set<std::string> tyvars_;
  std::set<std::string> ctors_;
};

} // namespace

Program read_neutral(std::string_view text) {
  Reader r(Lexer(text).run());
  return r.program();
}

} // namespace llbc::pure
