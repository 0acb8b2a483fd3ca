// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "llbc/llbc.h"

#include <cstring>
#include <json.hpp>

#include "llbc/interp.hpp"
#include "llbc/synth.hpp"
#include "llbc/syntax.hpp"

struct llbc_program {
  llbc::Program prog;
  std::vector<llbc::Diagnostic> diags;
};

namespace {

using json = nlohmann::json;

thread_local std::string g_error;
thread_local std::string g_code;

llbc_status fail(llbc_status st, const std::string& code, const std::string& msg) {
  g_code = code;
  g_error = msg;
  return st;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const json& j) {
  if (out) *out = dup(j.dump(2));
}

json diag_json(const llbc::Diagnostic& d) {
  return {{"code", d.code}, {"message", d.message}, {"line", d.loc.line}, {"col", d.loc.col}, {"fn", d.where}};
}

json reports_json(const std::vector<llbc::FnReport>& rs) {
  json a = json::array();
  for (const auto& r : rs) {
    json j = {{"fn", r.fn}, {"ok", r.ok}};
    if (!r.ok) {
      j["code"] = r.diag.code;
      j["message"] = r.diag.message;
      j["line"] = r.diag.loc.line;
      j["col"] = r.diag.loc.col;
      j["env"] = r.env_dump;
    }
    a.push_back(std::move(j));
  }
  return a;
}

llbc::RunOptions run_opts(const llbc_options* o) {
  llbc::RunOptions r;
  if (!o) return r;
  r.check_invariants = o->check_invariants != 0;
  r.trace = o->trace != 0;
  if (o->max_steps) r.max_steps = o->max_steps;
  return r;
}

uint64_t fuel_of(const llbc_options* o) { return o && o->fuel ? o->fuel : 1'000'000; }

llbc_status require_valid(const llbc_program* p) {
  if (!p) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null program");
  if (!p->diags.empty()) {
    const auto& d = p->diags.front();
    return fail(LLBC_ERR_INVALID, d.code, d.str());
  }
  return LLBC_OK;
}

// Runs f, mapping exceptions onto status codes.
template <class F>
llbc_status guarded(llbc_status on_error, F&& f) {
  g_error.clear();
  g_code.clear();
  try {
    return f();
  } catch (const llbc::ParseError& e) {
    return fail(LLBC_ERR_PARSE, "PARSE", e.loc().str() + ": " + e.what());
  } catch (const llbc::Error& e) {
    std::string where = e.loc().line ? e.loc().str() + ": " : "";
    return fail(on_error, e.code(), where + e.what());
  } catch (const std::exception& e) {
    return fail(LLBC_ERR_INTERNAL, "INTERNAL", e.what());
  }
}

llbc_status finish_parse(llbc::Program prog, llbc_program** out) {
  auto* p = new llbc_program{std::move(prog), {}};
  p->diags = llbc::validate(p->prog);
  *out = p;
  if (!p->diags.empty()) return fail(LLBC_ERR_INVALID, p->diags.front().code, p->diags.front().str());
  return LLBC_OK;
}

} // namespace

extern "C" {

void llbc_options_init(llbc_options* o) {
  if (!o) return;
  o->check_invariants = 1;
  o->trace = 0;
  o->inline_lets = 1;
  o->fuel = 1'000'000;
  o->max_steps = 20'000'000;
}

const char* llbc_version(void) { return "0.1.0"; }
const char* llbc_last_error(void) { return g_error.c_str(); }
const char* llbc_last_error_code(void) { return g_code.c_str(); }
void llbc_string_free(char* s) { std::free(s); }

llbc_status llbc_program_parse(const char* text, size_t len, llbc_program** out) {
  if (!text || !out) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null argument");
  *out = nullptr;
  return guarded(LLBC_ERR_PARSE, [&] { return finish_parse(llbc::parse_program(std::string_view(text, len)), out); });
}

llbc_status llbc_program_from_json(const char* text, size_t len, llbc_program** out) {
  if (!text || !out) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null argument");
  *out = nullptr;
  return guarded(LLBC_ERR_PARSE,
                 [&] { return finish_parse(llbc::program_from_json(std::string_view(text, len)), out); });
}

void llbc_program_free(llbc_program* p) { delete p; }

llbc_status llbc_program_to_json(const llbc_program* p, char** out) {
  if (!p || !out) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null argument");
  return guarded(LLBC_ERR_INTERNAL, [&] {
    *out = dup(llbc::program_to_json(p->prog));
    return LLBC_OK;
  });
}

llbc_status llbc_program_pretty(const llbc_program* p, char** out) {
  if (!p || !out) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null argument");
  return guarded(LLBC_ERR_INTERNAL, [&] {
    *out = dup(llbc::pretty_llbc(p->prog));
    return LLBC_OK;
  });
}

llbc_status llbc_program_entries(const llbc_program* p, char** out) {
  if (!p || !out) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null argument");
  json a = json::array();
  for (const auto& f : p->prog.fns)
    if (f.body && f.args.empty() && f.ty_params.empty() && f.region_params.empty()) a.push_back(f.name);
  put(out, a);
  return LLBC_OK;
}

llbc_status llbc_validate(const llbc_program* p, char** out) {
  if (!p || !out) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null argument");
  json a = json::array();
  for (const auto& d : p->diags) a.push_back(diag_json(d));
  put(out, a);
  return p->diags.empty() ? LLBC_OK : fail(LLBC_ERR_INVALID, p->diags.front().code, p->diags.front().str());
}

llbc_status llbc_check(const llbc_program* p, const llbc_options* opts, int* all_ok, char** report) {
  if (llbc_status st = require_valid(p)) return st;
  return guarded(LLBC_ERR_EVAL, [&] {
    auto rs = llbc::borrow_check(p->prog, run_opts(opts));
    bool ok = true;
    for (const auto& r : rs) ok = ok && r.ok;
    if (all_ok) *all_ok = ok ? 1 : 0;
    put(report, reports_json(rs));
    return LLBC_OK;
  });
}

llbc_status llbc_run(const llbc_program* p, const char* entry, const llbc_options* opts, llbc_outcome* outcome,
                     char** result) {
  if (!entry) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null entry");
  if (llbc_status st = require_valid(p)) return st;
  return guarded(LLBC_ERR_EVAL, [&] {
    auto r = llbc::run_program(p->prog, entry, run_opts(opts));
    bool panicked = r.kind == llbc::ExecResult::Kind::Panicked;
    if (outcome) *outcome = panicked ? LLBC_PANICKED : LLBC_RETURNED;
    json j = {{"outcome", panicked ? "Panicked" : "Returned"}, {"trace", r.trace}, {"env", r.env.dump()}};
    if (!panicked) j["value"] = llbc::value_str(r.value);
    put(result, j);
    return LLBC_OK;
  });
}

llbc_status llbc_translate(const llbc_program* p, const llbc_options* opts, llbc_style style, char** text,
                           char** report) {
  if (style != LLBC_STYLE_FSTAR && style != LLBC_STYLE_NEUTRAL) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "bad style");
  if (llbc_status st = require_valid(p)) return st;
  return guarded(LLBC_ERR_TRANSLATE, [&] {
    llbc::SynthOptions so;
    so.run = run_opts(opts);
    so.inline_lets = !opts || opts->inline_lets != 0;
    auto r = llbc::translate(p->prog, so);
    json summary = {{"functions", reports_json(r.reports)}, {"types", r.program.types.size()}};
    size_t fwd = 0, back = 0, opaque = 0;
    for (const auto& f : r.program.funs) {
      if (!f.body) ++opaque;
      if (f.name.ends_with("_fwd")) ++fwd;
      else if (f.name.find("_back") != std::string::npos) ++back;
    }
    summary["forward"] = fwd;
    summary["backward"] = back;
    summary["opaque"] = opaque;
    summary["decls"] = r.program.funs.size();
    put(report, summary);
    if (text)
      *text = dup(llbc::pure::print_program(r.program, style == LLBC_STYLE_FSTAR ? llbc::pure::Style::FStar
                                                                                 : llbc::pure::Style::Neutral));
    for (const auto& rep : r.reports)
      if (!rep.ok) return fail(LLBC_ERR_TRANSLATE, rep.diag.code, rep.fn + ": " + rep.diag.message);
    return LLBC_OK;
  });
}

llbc_status llbc_difftest(const llbc_program* p, const char* entry, const llbc_options* opts, llbc_outcome* outcome,
                          char** result) {
  if (!entry) return fail(LLBC_ERR_ARGUMENT, "ARGUMENT", "null entry");
  if (llbc_status st = require_valid(p)) return st;
  return guarded(LLBC_ERR_EVAL, [&] {
    llbc::SynthOptions so;
    so.run = run_opts(opts);
    so.inline_lets = !opts || opts->inline_lets != 0;
    auto tr = llbc::translate(p->prog, so);
    for (const auto& rep : tr.reports)
      if (!rep.ok) return fail(LLBC_ERR_TRANSLATE, rep.diag.code, rep.fn + ": " + rep.diag.message);
    auto d = llbc::difftest(p->prog, tr.program, entry, so.run, fuel_of(opts));
    const char* v = d.verdict == llbc::DiffResult::Verdict::Equal   ? "EQUAL"
                    : d.verdict == llbc::DiffResult::Verdict::Differ ? "DIFFER"
                                                                     : "INCONCLUSIVE";
    if (outcome)
      *outcome = d.verdict == llbc::DiffResult::Verdict::Equal    ? LLBC_EQUAL
                 : d.verdict == llbc::DiffResult::Verdict::Differ ? LLBC_DIFFER
                                                                  : LLBC_INCONCLUSIVE;
    put(result, json{{"verdict", v}, {"concrete", d.concrete}, {"pure", d.pure}});
    return LLBC_OK;
  });
}

} // extern "C"
