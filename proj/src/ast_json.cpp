// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// JSON form of the AST: {"declarations": [ {"decl": "type", ...}, {"decl": "fn", ...} ]}.

#include <json.hpp>

#include "llbc/syntax.hpp"

namespace llbc {

using nlohmann::json;

namespace {

const char* ty_kind_name(Ty::Kind k) {
  switch (k) {
  case Ty::Kind::Bool: return "Bool";
  case Ty::Kind::I32: return "I32";
  case Ty::Kind::U32: return "U32";
  case Ty::Kind::MutRef: return "MutBorrow";
  case Ty::Kind::SharedRef: return "SharedBorrow";
  case Ty::Kind::Box: return "Box";
  case Ty::Kind::Adt: return "Adt";
  case Ty::Kind::Tuple: return "Tuple";
  case Ty::Kind::Var: return "TyVar";
  }
  return "?";
}

json ty_j(const Ty& t) {
  json j{{"kind", ty_kind_name(t.kind)}};
  switch (t.kind) {
  case Ty::Kind::MutRef:
  case Ty::Kind::SharedRef:
    j["region"] = t.name;
    j["inner"] = ty_j(t.inner());
    break;
  case Ty::Kind::Box: j["inner"] = ty_j(t.inner()); break;
  case Ty::Kind::Adt:
    j["name"] = t.name;
    j["args"] = json::array();
    for (const auto& a : t.args) j["args"].push_back(ty_j(a));
    break;
  case Ty::Kind::Tuple:
    j["elems"] = json::array();
    for (const auto& a : t.args) j["elems"].push_back(ty_j(a));
    break;
  case Ty::Kind::Var: j["name"] = t.name; break;
  default: break;
  }
  return j;
}

const char* proj_name(Proj::Kind k) {
  switch (k) {
  case Proj::Kind::Deref: return "Deref";
  case Proj::Kind::DerefMut: return "DerefMut";
  case Proj::Kind::DerefShared: return "DerefShared";
  case Proj::Kind::DerefBox: return "DerefBox";
  case Proj::Kind::Field: return "Field";
  case Proj::Kind::TupleField: return "TupleField";
  }
  return "?";
}

json place_j(const Place& p) {
  json path = json::array();
  for (const auto& pr : p.path) {
    json e{{"kind", proj_name(pr.kind)}};
    if (pr.kind == Proj::Kind::Field) {
      e["ctor"] = pr.ctor;
      e["field"] = pr.field;
    } else if (pr.kind == Proj::Kind::TupleField) {
      e["index"] = pr.index;
    }
    path.push_back(e);
  }
  return json{{"base", p.base}, {"path", path}};
}

json operand_j(const Operand& o) {
  switch (o.kind) {
  case Operand::Kind::Move: return json{{"kind", "Move"}, {"place", place_j(o.place)}};
  case Operand::Kind::Copy: return json{{"kind", "Copy"}, {"place", place_j(o.place)}};
  case Operand::Kind::ConstBool: return json{{"kind", "ConstBool"}, {"value", o.b}};
  case Operand::Kind::ConstInt: {
    json j{{"kind", "ConstInt"}, {"value", o.n}};
    if (o.int_ty == Ty::Kind::I32) j["ty"] = "i32";
    else if (o.int_ty == Ty::Kind::U32) j["ty"] = "u32";
    else j["ty"] = nullptr;
    return j;
  }
  case Operand::Kind::Ctor: {
    json j{{"kind", "Ctor"}, {"ctor", o.ctor}, {"fields", json::array()}};
    for (const auto& e : o.elems) j["fields"].push_back(operand_j(e));
    return j;
  }
  case Operand::Kind::Tuple: {
    json j{{"kind", "Tuple"}, {"elems", json::array()}};
    for (const auto& e : o.elems) j["elems"].push_back(operand_j(e));
    return j;
  }
  case Operand::Kind::BoxNew: return json{{"kind", "BoxNew"}, {"inner", operand_j(o.elems.at(0))}};
  }
  return {};
}

const char* binop_name(BinOp b) {
  static const char* names[] = {"Add", "Sub", "Mul", "Div", "Rem", "Eq", "Ne", "Lt", "Le", "Gt", "Ge"};
  return names[static_cast<int>(b)];
}

json rvalue_j(const Rvalue& r) {
  switch (r.kind) {
  case Rvalue::Kind::Use: return json{{"kind", "Use"}, {"op", operand_j(r.ops.at(0))}};
  case Rvalue::Kind::MutBorrow: return json{{"kind", "MutBorrowOf"}, {"place", place_j(r.place)}};
  case Rvalue::Kind::SharedBorrow: return json{{"kind", "SharedBorrowOf"}, {"place", place_j(r.place)}};
  case Rvalue::Kind::ReservedBorrow: return json{{"kind", "ReservedBorrowOf"}, {"place", place_j(r.place)}};
  case Rvalue::Kind::Unop:
    return json{{"kind", "Unop"}, {"op", r.unop == UnOp::Not ? "Not" : "Neg"}, {"arg", operand_j(r.ops.at(0))}};
  case Rvalue::Kind::Binop:
    return json{{"kind", "Binop"},
                {"op", binop_name(r.binop)},
                {"lhs", operand_j(r.ops.at(0))},
                {"rhs", operand_j(r.ops.at(1))}};
  }
  return {};
}

json stmt_j(const Stmt& s) {
  json j;
  switch (s.kind) {
  case Stmt::Kind::Nop: j = json{{"kind", "Nop"}}; break;
  case Stmt::Kind::Seq: j = json{{"kind", "Seq"}, {"first", stmt_j(s.kids[0])}, {"second", stmt_j(s.kids[1])}}; break;
  case Stmt::Kind::Assign: j = json{{"kind", "Assign"}, {"place", place_j(s.place)}, {"rvalue", rvalue_j(s.rv)}}; break;
  case Stmt::Kind::Call: {
    j = json{{"kind", "Call"}, {"dest", place_j(s.place)}, {"fn", s.fn}, {"region_args", s.region_args}};
    j["ty_args"] = json::array();
    for (const auto& t : s.ty_args) j["ty_args"].push_back(ty_j(t));
    j["args"] = json::array();
    for (const auto& a : s.args) j["args"].push_back(operand_j(a));
    break;
  }
  case Stmt::Kind::If:
    j = json{{"kind", "IfThenElse"}, {"cond", operand_j(s.cond)}, {"then", stmt_j(s.kids[0])}, {"else", stmt_j(s.kids[1])}};
    break;
  case Stmt::Kind::Match: {
    j = json{{"kind", "Match"}, {"place", place_j(s.place)}, {"arms", json::array()}};
    for (size_t i = 0; i < s.kids.size(); ++i) {
      json arm{{"ctor", s.arm_ctors[i]}, {"body", stmt_j(s.kids[i])}};
      arm["binders"] = i < s.arm_hints.size() ? json(s.arm_hints[i]) : json::array();
      j["arms"].push_back(arm);
    }
    break;
  }
  case Stmt::Kind::Return: j = json{{"kind", "Return"}}; break;
  case Stmt::Kind::Panic: j = json{{"kind", "Panic"}}; break;
  case Stmt::Kind::Free: j = json{{"kind", "Free"}, {"place", place_j(s.place)}}; break;
  }
  if (s.loc.line > 0) j["loc"] = json::array({s.loc.line, s.loc.col});
  return j;
}

json vars_j(const std::vector<Var>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(json{{"name", v.name}, {"ty", ty_j(v.ty)}});
  return a;
}

// Reading back.

[[noreturn]] void bad(const std::string& what) { throw ParseError("malformed JSON AST: " + what, {}, {}); }

const json& field(const json& j, const char* k) {
  if (!j.is_object() || !j.contains(k)) bad(std::string("missing field '") + k + "'");
  return j.at(k);
}

std::string str_field(const json& j, const char* k) {
  const json& v = field(j, k);
  if (!v.is_string()) bad(std::string("field '") + k + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strs(const json& j) {
  if (!j.is_array()) bad("expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) bad("expected a string");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Ty j_ty(const json& j) {
  std::string k = str_field(j, "kind");
  if (k == "Bool") return Ty::boolean();
  if (k == "I32") return Ty::i32();
  if (k == "U32") return Ty::u32();
  if (k == "MutBorrow") return Ty::mut_ref(str_field(j, "region"), j_ty(field(j, "inner")));
  if (k == "SharedBorrow") return Ty::shared_ref(str_field(j, "region"), j_ty(field(j, "inner")));
  if (k == "Box") return Ty::box(j_ty(field(j, "inner")));
  if (k == "TyVar") return Ty::var(str_field(j, "name"));
  if (k == "Adt" || k == "Tuple") {
    std::vector<Ty> args;
    for (const auto& a : field(j, k == "Adt" ? "args" : "elems")) args.push_back(j_ty(a));
    if (k == "Adt") return Ty::adt(str_field(j, "name"), std::move(args));
    return Ty::tuple(std::move(args));
  }
  bad("unknown type kind " + k);
}

Place j_place(const json& j) {
  Place p;
  p.base = str_field(j, "base");
  for (const auto& e : field(j, "path")) {
    std::string k = str_field(e, "kind");
    Proj pr;
    if (k == "Deref") pr.kind = Proj::Kind::Deref;
    else if (k == "DerefMut") pr.kind = Proj::Kind::DerefMut;
    else if (k == "DerefShared") pr.kind = Proj::Kind::DerefShared;
    else if (k == "DerefBox") pr.kind = Proj::Kind::DerefBox;
    else if (k == "Field") {
      pr.kind = Proj::Kind::Field;
      pr.ctor = str_field(e, "ctor");
      pr.field = str_field(e, "field");
      pr.index = -1;
    } else if (k == "TupleField") {
      pr.kind = Proj::Kind::TupleField;
      pr.index = field(e, "index").get<int>();
    } else {
      bad("unknown projection " + k);
    }
    if (pr.is_deref()) pr.index = -1;
    p.path.push_back(pr);
  }
  return p;
}

Operand j_operand(const json& j) {
  std::string k = str_field(j, "kind");
  Operand o;
  if (k == "Move") return Operand::move(j_place(field(j, "place")));
  if (k == "Copy") return Operand::copy(j_place(field(j, "place")));
  if (k == "ConstBool") return Operand::boolean(field(j, "value").get<bool>());
  if (k == "ConstInt") {
    Ty::Kind w = Ty::Kind::Tuple;
    if (j.contains("ty") && j["ty"].is_string()) {
      std::string t = j["ty"].get<std::string>();
      if (t == "i32") w = Ty::Kind::I32;
      else if (t == "u32") w = Ty::Kind::U32;
      else bad("unknown literal width " + t);
    }
    return Operand::integer(field(j, "value").get<int64_t>(), w);
  }
  if (k == "Ctor") {
    o.kind = Operand::Kind::Ctor;
    o.ctor = str_field(j, "ctor");
    for (const auto& e : field(j, "fields")) o.elems.push_back(j_operand(e));
    return o;
  }
  if (k == "Tuple") {
    o.kind = Operand::Kind::Tuple;
    for (const auto& e : field(j, "elems")) o.elems.push_back(j_operand(e));
    if (o.elems.size() == 1) bad("unary tuple");
    return o;
  }
  if (k == "BoxNew") {
    o.kind = Operand::Kind::BoxNew;
    o.elems.push_back(j_operand(field(j, "inner")));
    return o;
  }
  bad("unknown operand kind " + k);
}

BinOp j_binop(const std::string& s) {
  static const char* names[] = {"Add", "Sub", "Mul", "Div", "Rem", "Eq", "Ne", "Lt", "Le", "Gt", "Ge"};
  for (int i = 0; i < 11; ++i)
    if (s == names[i]) return static_cast<BinOp>(i);
  bad("unknown binary operator " + s);
}

Rvalue j_rvalue(const json& j) {
  std::string k = str_field(j, "kind");
  Rvalue r;
  if (k == "Use") {
    r.kind = Rvalue::Kind::Use;
    r.ops.push_back(j_operand(field(j, "op")));
  } else if (k == "MutBorrowOf" || k == "SharedBorrowOf" || k == "ReservedBorrowOf") {
    r.kind = k == "MutBorrowOf"      ? Rvalue::Kind::MutBorrow
             : k == "SharedBorrowOf" ? Rvalue::Kind::SharedBorrow
                                     : Rvalue::Kind::ReservedBorrow;
    r.place = j_place(field(j, "place"));
  } else if (k == "Unop") {
    r.kind = Rvalue::Kind::Unop;
    std::string op = str_field(j, "op");
    if (op != "Not" && op != "Neg") bad("unknown unary operator " + op);
    r.unop = op == "Not" ? UnOp::Not : UnOp::Neg;
    r.ops.push_back(j_operand(field(j, "arg")));
  } else if (k == "Binop") {
    r.kind = Rvalue::Kind::Binop;
    r.binop = j_binop(str_field(j, "op"));
    r.ops.push_back(j_operand(field(j, "lhs")));
    r.ops.push_back(j_operand(field(j, "rhs")));
  } else {
    bad("unknown rvalue kind " + k);
  }
  return r;
}

Stmt j_stmt(const json& j) {
  std::string k = str_field(j, "kind");
  Stmt s;
  if (k == "Nop") {
  } else if (k == "Seq") {
    s = Stmt::seq(j_stmt(field(j, "first")), j_stmt(field(j, "second")));
  } else if (k == "Assign") {
    s = Stmt::assign(j_place(field(j, "place")), j_rvalue(field(j, "rvalue")));
  } else if (k == "Call") {
    s.kind = Stmt::Kind::Call;
    s.place = j_place(field(j, "dest"));
    s.fn = str_field(j, "fn");
    if (j.contains("region_args")) s.region_args = strs(j["region_args"]);
    if (j.contains("ty_args"))
      for (const auto& t : j["ty_args"]) s.ty_args.push_back(j_ty(t));
    for (const auto& a : field(j, "args")) s.args.push_back(j_operand(a));
  } else if (k == "IfThenElse") {
    s = Stmt::if_(j_operand(field(j, "cond")), j_stmt(field(j, "then")), j_stmt(field(j, "else")));
  } else if (k == "Match") {
    s.kind = Stmt::Kind::Match;
    s.place = j_place(field(j, "place"));
    for (const auto& a : field(j, "arms")) {
      s.arm_ctors.push_back(str_field(a, "ctor"));
      s.arm_hints.push_back(a.contains("binders") ? strs(a["binders"]) : std::vector<std::string>{});
      s.kids.push_back(j_stmt(field(a, "body")));
    }
  } else if (k == "Return") {
    s = Stmt::ret();
  } else if (k == "Panic") {
    s = Stmt::panic();
  } else if (k == "Free") {
    s.kind = Stmt::Kind::Free;
    s.place = j_place(field(j, "place"));
  } else {
    bad("unknown statement kind " + k);
  }
  if (j.contains("loc") && j["loc"].is_array() && j["loc"].size() == 2)
    s.loc = SrcLoc{j["loc"][0].get<int>(), j["loc"][1].get<int>()};
  return s;
}

std::vector<Var> j_vars(const json& j) {
  std::vector<Var> out;
  for (const auto& v : j) out.push_back(Var{str_field(v, "name"), j_ty(field(v, "ty"))});
  return out;
}

} // namespace

std::string program_to_json(const Program& p, int indent) {
  json decls = json::array();
  for (const auto& t : p.types) {
    json d{{"decl", "type"}, {"name", t.name}, {"ty_params", t.ty_params}, {"is_struct", t.is_struct}};
    d["ctors"] = json::array();
    for (const auto& c : t.ctors) {
      json cj{{"name", c.name}, {"fields", json::array()}};
      for (size_t i = 0; i < c.fields.size(); ++i)
        cj["fields"].push_back(json{{"name", c.field_names[i]}, {"ty", ty_j(c.fields[i])}});
      d["ctors"].push_back(cj);
    }
    decls.push_back(d);
  }
  for (const auto& f : p.fns) {
    json d{{"decl", "fn"},
           {"name", f.name},
           {"region_params", f.region_params},
           {"ty_params", f.ty_params},
           {"args", vars_j(f.args)},
           {"locals", vars_j(f.locals)},
           {"ret", json{{"name", f.ret.name}, {"ty", ty_j(f.ret.ty)}}}};
    d["body"] = f.body ? stmt_j(*f.body) : json(nullptr);
    decls.push_back(d);
  }
  return json{{"declarations", decls}}.dump(indent);
}

Program program_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), {}, {});
  }
  Program p;
  try {
    for (const auto& d : field(j, "declarations")) {
      std::string k = str_field(d, "decl");
      if (k == "type") {
        TypeDecl t;
        t.name = str_field(d, "name");
        if (d.contains("ty_params")) t.ty_params = strs(d["ty_params"]);
        t.is_struct = d.value("is_struct", false);
        for (const auto& c : field(d, "ctors")) {
          CtorDecl cd;
          cd.name = str_field(c, "name");
          for (const auto& f : field(c, "fields")) {
            cd.field_names.push_back(str_field(f, "name"));
            cd.fields.push_back(j_ty(field(f, "ty")));
          }
          t.ctors.push_back(std::move(cd));
        }
        p.types.push_back(std::move(t));
      } else if (k == "fn") {
        FnDecl f;
        f.name = str_field(d, "name");
        if (d.contains("region_params")) f.region_params = strs(d["region_params"]);
        if (d.contains("ty_params")) f.ty_params = strs(d["ty_params"]);
        f.args = j_vars(field(d, "args"));
        if (d.contains("locals")) f.locals = j_vars(d["locals"]);
        const json& r = field(d, "ret");
        f.ret = Var{str_field(r, "name"), j_ty(field(r, "ty"))};
        const json& b = field(d, "body");
        if (!b.is_null()) f.body = j_stmt(b);
        p.fns.push_back(std::move(f));
      } else {
        bad("unknown declaration kind " + k);
      }
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  compute_groups(p);
  return p;
}

} // namespace llbc
