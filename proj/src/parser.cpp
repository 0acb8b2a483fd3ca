// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Recursive-descent parser for the textual LLBC syntax.

#include <cctype>
#include <set>

#include "llbc/syntax.hpp"

namespace llbc {
namespace {

enum class Tok { Ident, Int, Lifetime, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SrcLoc loc;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text += bump();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += bump();
        if (pos_ + 3 <= src_.size() && (src_[pos_] == 'i' || src_[pos_] == 'u') && src_.substr(pos_ + 1, 2) == "32") {
          t.text += bump();
          t.text += bump();
          t.text += bump();
        }
      } else if (c == '\'') {
        bump();
        t.kind = Tok::Lifetime;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text += bump();
        if (t.text.empty()) throw ParseError("empty lifetime name", t.loc, {"lifetime"});
      } else {
        t.kind = Tok::Punct;
        static const char* two[] = {"::", "->", "=>", "==", "!=", "<=", ">="};
        bool matched = false;
        for (const char* p : two) {
          if (src_.substr(pos_, 2) == p) {
            t.text += bump();
            t.text += bump();
            matched = true;
            break;
          }
        }
        if (!matched) {
          static const std::string single = "{}()<>,;:=+-*/%!&.";
          if (single.find(c) == std::string::npos)
            throw ParseError(std::string("unexpected character '") + c + "'", t.loc, {});
          t.text += bump();
        }
      }
      out.push_back(t);
    }
  }

private:
  char bump() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
      if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      if (src_.substr(pos_, 2) == "/*") {
        SrcLoc start{line_, col_};
        bump();
        bump();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") bump();
        if (pos_ >= src_.size()) throw ParseError("unterminated comment", start, {"*/"});
        bump();
        bump();
        continue;
      }
      return;
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (!at_end()) {
      if (is("enum")) {
        p.types.push_back(enum_decl());
      } else if (is("struct")) {
        p.types.push_back(struct_decl());
      } else if (is("fn")) {
        p.fns.push_back(fn_decl());
      } else {
        fail({"enum", "struct", "fn"});
      }
    }
    std::set<std::string> ctors;
    for (const auto& t : p.types)
      for (const auto& c : t.ctors) ctors.insert(c.name);
    for (auto& f : p.fns)
      if (f.body) fix_ctor_calls(*f.body, ctors);
    return p;
  }

private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is(const char* s, size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == s;
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& why = "") {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    std::string msg = why.empty() ? "unexpected " + found : why;
    if (why.empty() && !expected.empty()) {
      msg += ", expected ";
      for (size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    }
    throw ParseError(msg, t.loc, std::move(expected));
  }

  void expect(const char* s) {
    if (!is(s)) fail({std::string("'") + s + "'"});
    next();
  }

  bool accept(const char* s) {
    if (!is(s)) return false;
    next();
    return true;
  }

  std::string ident() {
    if (peek().kind != Tok::Ident) fail({"identifier"});
    return next().text;
  }

  // Generic parameter list: lifetimes and type variables.
  void generics(std::vector<std::string>& regions, std::vector<std::string>& tys) {
    if (!accept("<")) return;
    if (!is(">")) {
      do {
        if (peek().kind == Tok::Lifetime) {
          regions.push_back(next().text);
        } else {
          tys.push_back(ident());
        }
      } while (accept(","));
    }
    expect(">");
  }

  Ty ty() {
    const Token& t = peek();
    if (accept("&")) {
      std::string region;
      if (peek().kind == Tok::Lifetime) region = next().text;
      bool mut = accept("mut");
      Ty inner = ty();
      return mut ? Ty::mut_ref(region, inner) : Ty::shared_ref(region, inner);
    }
    if (accept("(")) {
      if (accept(")")) return Ty::unit();
      std::vector<Ty> elems{ty()};
      bool comma = false;
      while (accept(",")) {
        comma = true;
        if (is(")")) break;
        elems.push_back(ty());
      }
      expect(")");
      if (elems.size() == 1) {
        if (comma) throw ParseError("unary tuple types are not allowed", t.loc, {"type"});
        return elems[0];
      }
      return Ty::tuple(std::move(elems));
    }
    if (t.kind != Tok::Ident) fail({"type"});
    std::string name = next().text;
    if (name == "bool") return Ty::boolean();
    if (name == "i32") return Ty::i32();
    if (name == "u32") return Ty::u32();
    if (name == "Box") {
      expect("<");
      Ty inner = ty();
      expect(">");
      return Ty::box(inner);
    }
    for (const auto& v : ty_scope_)
      if (v == name) return Ty::var(name);
    std::vector<Ty> args;
    if (accept("<")) {
      if (!is(">")) {
        do args.push_back(ty());
        while (accept(","));
      }
      expect(">");
    }
    return Ty::adt(name, std::move(args));
  }

  TypeDecl enum_decl() {
    TypeDecl d;
    d.loc = peek().loc;
    expect("enum");
    d.name = ident();
    std::vector<std::string> regions;
    generics(regions, d.ty_params);
    if (!regions.empty()) throw ParseError("type declarations take no lifetime parameters", d.loc, {});
    ty_scope_ = d.ty_params;
    expect("{");
    while (!is("}")) {
      CtorDecl c;
      c.name = ident();
      if (accept("(")) {
        if (!is(")")) {
          do {
            c.field_names.push_back(std::to_string(c.fields.size()));
            c.fields.push_back(ty());
          } while (accept(","));
        }
        expect(")");
      } else if (accept("{")) {
        named_fields(c);
      }
      d.ctors.push_back(std::move(c));
      if (!accept(",")) break;
    }
    expect("}");
    ty_scope_.clear();
    return d;
  }

  void named_fields(CtorDecl& c) {
    if (!is("}")) {
      do {
        if (is("}")) break;
        c.field_names.push_back(ident());
        expect(":");
        c.fields.push_back(ty());
      } while (accept(","));
    }
    expect("}");
  }

  TypeDecl struct_decl() {
    TypeDecl d;
    d.loc = peek().loc;
    expect("struct");
    d.name = ident();
    d.is_struct = true;
    std::vector<std::string> regions;
    generics(regions, d.ty_params);
    if (!regions.empty()) throw ParseError("type declarations take no lifetime parameters", d.loc, {});
    ty_scope_ = d.ty_params;
    CtorDecl c;
    c.name = d.name;
    if (accept("(")) {
      if (!is(")")) {
        do {
          c.field_names.push_back(std::to_string(c.fields.size()));
          c.fields.push_back(ty());
        } while (accept(","));
      }
      expect(")");
      expect(";");
    } else {
      expect("{");
      named_fields(c);
    }
    d.ctors.push_back(std::move(c));
    ty_scope_.clear();
    return d;
  }

  std::vector<Var> var_list(const char* close) {
    std::vector<Var> vs;
    while (!is(close)) {
      Var v;
      v.name = ident();
      expect(":");
      v.ty = ty();
      vs.push_back(std::move(v));
      if (!accept(",")) break;
    }
    return vs;
  }

  FnDecl fn_decl() {
    FnDecl f;
    f.loc = peek().loc;
    expect("fn");
    f.name = ident();
    generics(f.region_params, f.ty_params);
    ty_scope_ = f.ty_params;
    expect("(");
    f.args = var_list(")");
    expect(")");
    if (accept("->")) {
      expect("(");
      f.ret.name = ident();
      expect(":");
      f.ret.ty = ty();
      expect(")");
    } else {
      f.ret = {"ret", Ty::unit()};
    }
    if (accept(";")) {
      ty_scope_.clear();
      return f;
    }
    expect("{");
    if (accept("locals")) {
      expect("{");
      f.locals = var_list("}");
      expect("}");
    }
    f.body = stmts_until_close();
    ty_scope_.clear();
    return f;
  }

  // Parses statements up to and including the closing brace.
  Stmt stmts_until_close() {
    std::vector<Stmt> ss;
    while (!accept("}")) {
      if (at_end()) fail({"'}'"});
      ss.push_back(stmt());
    }
    return from_list(std::move(ss));
  }

  Stmt block() {
    expect("{");
    return stmts_until_close();
  }

  Stmt stmt() {
    SrcLoc loc = peek().loc;
    Stmt s = stmt_inner();
    s.loc = loc;
    return s;
  }

  Stmt stmt_inner() {
    if (accept("return")) {
      expect(";");
      return Stmt::ret();
    }
    if (accept("panic")) {
      if (accept("!")) {
        expect("(");
        expect(")");
      }
      expect(";");
      return Stmt::panic();
    }
    if (accept("nop")) {
      expect(";");
      return Stmt::nop();
    }
    if (accept("free")) {
      Stmt s;
      s.kind = Stmt::Kind::Free;
      expect("(");
      s.place = place();
      expect(")");
      expect(";");
      return s;
    }
    if (is("assert") && is("!", 1)) {
      next();
      next();
      expect("(");
      Operand c = operand();
      expect(")");
      expect(";");
      return Stmt::if_(c, Stmt::nop(), Stmt::panic());
    }
    if (is("if")) return if_stmt();
    if (accept("match")) {
      Stmt s;
      s.kind = Stmt::Kind::Match;
      s.place = place();
      expect("{");
      while (!accept("}")) {
        s.arm_ctors.push_back(ident());
        std::vector<std::string> hints;
        if (accept("(")) {
          if (!is(")")) {
            do hints.push_back(ident());
            while (accept(","));
          }
          expect(")");
        }
        s.arm_hints.push_back(std::move(hints));
        expect("=>");
        s.kids.push_back(block());
        accept(",");
      }
      return s;
    }
    if (is("{")) return block();
    if (accept("let")) accept("mut");
    Place dest = place();
    expect("=");
    Stmt s = rhs(std::move(dest));
    expect(";");
    return s;
  }

  Stmt if_stmt() {
    expect("if");
    Operand c = operand();
    Stmt t = block();
    Stmt e = Stmt::nop();
    if (accept("else")) {
      if (is("if")) {
        SrcLoc l = peek().loc;
        e = if_stmt();
        e.loc = l;
      } else {
        e = block();
      }
    }
    return Stmt::if_(std::move(c), std::move(t), std::move(e));
  }

  bool starts_call() const {
    if (peek().kind != Tok::Ident) return false;
    static const std::set<std::string> kw = {"move", "copy", "true", "false", "Box"};
    if (kw.count(peek().text)) return false;
    return is("(", 1) || (is("::", 1) && is("<", 2));
  }

  Stmt rhs(Place dest) {
    if (starts_call()) {
      Stmt s;
      s.kind = Stmt::Kind::Call;
      s.place = std::move(dest);
      s.fn = next().text;
      if (accept("::")) {
        expect("<");
        if (!is(">")) {
          do {
            if (peek().kind == Tok::Lifetime) {
              s.region_args.push_back(next().text);
            } else {
              s.ty_args.push_back(ty());
            }
          } while (accept(","));
        }
        expect(">");
      }
      expect("(");
      if (!is(")")) {
        do s.args.push_back(operand());
        while (accept(","));
      }
      expect(")");
      return s;
    }
    return Stmt::assign(std::move(dest), rvalue());
  }

  Rvalue rvalue() {
    Rvalue rv;
    if (accept("&")) {
      if (accept("mut")) {
        rv.kind = Rvalue::Kind::MutBorrow;
      } else if (accept("reserved")) {
        rv.kind = Rvalue::Kind::ReservedBorrow;
      } else {
        rv.kind = Rvalue::Kind::SharedBorrow;
      }
      rv.place = place();
      return rv;
    }
    if (accept("!")) {
      rv.kind = Rvalue::Kind::Unop;
      rv.unop = UnOp::Not;
      rv.ops.push_back(operand());
      return rv;
    }
    if (is("-") && peek(1).kind != Tok::Int) {
      next();
      rv.kind = Rvalue::Kind::Unop;
      rv.unop = UnOp::Neg;
      rv.ops.push_back(operand());
      return rv;
    }
    Operand a = operand();
    static const std::pair<const char*, BinOp> ops[] = {
        {"+", BinOp::Add}, {"-", BinOp::Sub}, {"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Rem}, {"==", BinOp::Eq},
        {"!=", BinOp::Ne}, {"<", BinOp::Lt},  {"<=", BinOp::Le}, {">", BinOp::Gt},  {">=", BinOp::Ge}};
    for (const auto& [txt, op] : ops) {
      if (is(txt)) {
        next();
        rv.kind = Rvalue::Kind::Binop;
        rv.binop = op;
        rv.ops = {std::move(a), operand()};
        return rv;
      }
    }
    rv.kind = Rvalue::Kind::Use;
    rv.ops.push_back(std::move(a));
    return rv;
  }

  Operand int_literal(bool negative) {
    Token t = next();
    std::string digits = t.text;
    Ty::Kind k = Ty::Kind::Tuple;
    if (digits.size() > 3 && (digits.compare(digits.size() - 3, 3, "i32") == 0)) {
      k = Ty::Kind::I32;
      digits.resize(digits.size() - 3);
    } else if (digits.size() > 3 && (digits.compare(digits.size() - 3, 3, "u32") == 0)) {
      k = Ty::Kind::U32;
      digits.resize(digits.size() - 3);
    }
    if (digits.size() > 12) throw ParseError("integer literal too large", t.loc, {});
    int64_t v = std::stoll(digits);
    return Operand::integer(negative ? -v : v, k);
  }

  Operand operand() {
    const Token& t = peek();
    if (accept("move")) return Operand::move(place());
    if (accept("copy")) return Operand::copy(place());
    if (accept("true")) return Operand::boolean(true);
    if (accept("false")) return Operand::boolean(false);
    if (t.kind == Tok::Int) return int_literal(false);
    if (is("-") && peek(1).kind == Tok::Int) {
      next();
      return int_literal(true);
    }
    if (is("Box") && is("::", 1)) {
      next();
      next();
      if (!is("new")) fail({"'new'"});
      next();
      expect("(");
      Operand o;
      o.kind = Operand::Kind::BoxNew;
      o.elems.push_back(operand());
      expect(")");
      return o;
    }
    if (accept("(")) {
      SrcLoc l = t.loc;
      Operand o;
      o.kind = Operand::Kind::Tuple;
      if (accept(")")) return o;
      o.elems.push_back(operand());
      if (!accept(",")) fail({"','"}, "parenthesized operands must be tuples of at least two elements");
      if (is(")")) throw ParseError("unary tuple is not allowed", l, {"operand"});
      do {
        if (is(")")) break;
        o.elems.push_back(operand());
      } while (accept(","));
      expect(")");
      return o;
    }
    if (t.kind == Tok::Ident) {
      Operand o;
      o.kind = Operand::Kind::Ctor;
      o.ctor = next().text;
      if (accept("(")) {
        if (!is(")")) {
          do o.elems.push_back(operand());
          while (accept(","));
        }
        expect(")");
      }
      return o;
    }
    fail({"operand"});
  }

  Place place() {
    if (accept("*")) {
      Place p = place();
      p.path.push_back(Proj{Proj::Kind::Deref, {}, {}, -1});
      return p;
    }
    Place p;
    if (accept("(")) {
      p = place();
      expect(")");
    } else {
      p.base = ident();
    }
    while (accept(".")) {
      if (peek().kind == Tok::Int) {
        Token t = next();
        Proj pr;
        pr.kind = Proj::Kind::TupleField;
        pr.index = std::stoi(t.text);
        p.path.push_back(pr);
      } else {
        Proj pr;
        pr.kind = Proj::Kind::Field;
        pr.ctor = ident();
        expect(".");
        if (peek().kind == Tok::Int) {
          pr.field = next().text;
        } else {
          pr.field = ident();
        }
        pr.index = -1;
        p.path.push_back(pr);
      }
    }
    return p;
  }

  void fix_ctor_calls(Stmt& s, const std::set<std::string>& ctors) {
    if (s.kind == Stmt::Kind::Call && ctors.count(s.fn) && s.ty_args.empty() && s.region_args.empty()) {
      Operand o;
      o.kind = Operand::Kind::Ctor;
      o.ctor = s.fn;
      o.elems = std::move(s.args);
      Rvalue rv;
      rv.ops.push_back(std::move(o));
      SrcLoc loc = s.loc;
      s = Stmt::assign(std::move(s.place), std::move(rv));
      s.loc = loc;
    }
    for (auto& k : s.kids) fix_ctor_calls(k, ctors);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<std::string> ty_scope_;
};

} // namespace

Program parse_program(std::string_view text) {
  Lexer lx(text);
  Parser ps(lx.run());
  Program p = ps.program();
  compute_groups(p);
  return p;
}

} // namespace llbc
