// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "llbc/syntax.hpp"

namespace llbc {
namespace {

bool is_branch(const Stmt& s) { return s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::Match; }

Stmt push_down(const std::vector<Stmt>& stmts) {
  std::vector<Stmt> out;
  for (size_t i = 0; i < stmts.size(); ++i) {
    if (!is_branch(stmts[i])) {
      out.push_back(stmts[i]);
      continue;
    }
    Stmt b = stmts[i];
    std::vector<Stmt> rest(stmts.begin() + static_cast<std::ptrdiff_t>(i) + 1, stmts.end());
    for (auto& k : b.kids) {
      std::vector<Stmt> arm = flatten(k);
      arm.insert(arm.end(), rest.begin(), rest.end());
      k = push_down(arm);
    }
    out.push_back(std::move(b));
    break;
  }
  return from_list(std::move(out));
}

} // namespace

bool is_terminal_form(const Stmt& s) {
  if (s.kind == Stmt::Kind::Seq) {
    std::vector<Stmt> l = flatten(s);
    for (size_t i = 0; i < l.size(); ++i) {
      if (is_branch(l[i]) && i + 1 != l.size()) return false;
      if (!is_terminal_form(l[i])) return false;
    }
    return true;
  }
  for (const auto& k : s.kids)
    if (!is_terminal_form(k)) return false;
  return true;
}

Stmt terminalize(const Stmt& s) {
  if (is_terminal_form(s)) return s;
  return push_down(flatten(s));
}

void terminalize_program(Program& p) {
  for (auto& f : p.fns)
    if (f.body) f.body = terminalize(*f.body);
}

} // namespace llbc
