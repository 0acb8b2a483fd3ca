// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Front end: textual parser and printer, JSON form, validation and the
// continuation-duplication pass.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llbc/ast.hpp"
#include "llbc/error.hpp"

namespace llbc {

// Throws ParseError.
Program parse_program(std::string_view text);

std::string pretty_llbc(const Program& p);
std::string pretty_stmt(const Stmt& s, int indent = 0);
std::string pretty_fn(const FnDecl& f);

std::string program_to_json(const Program& p, int indent = 2);
// Throws ParseError on malformed documents.
Program program_from_json(std::string_view text);

// Checks every static restriction and annotates the program in place:
// dereferences and field indices get resolved, untyped integer literals get
// their width, call-graph groups get computed. Diagnostics come out in
// declaration order.
std::vector<Diagnostic> validate(Program& p);

// Duplicates continuations so every If/Match sits in terminal position.
Stmt terminalize(const Stmt& s);
void terminalize_program(Program& p);
bool is_terminal_form(const Stmt& s);

// Type of a place under a function's declarations, with dereferences resolved.
// Returns false and fills err on failure.
bool type_of_place(const Program& prog, const FnDecl& f, Place& place, Ty& out, std::string& err);

} // namespace llbc
