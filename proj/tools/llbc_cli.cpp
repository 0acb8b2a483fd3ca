// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver. Talks to the library only through llbc.h.
//
// Exit codes: 0 ok, 2 error or DIFFER, 3 inconclusive, 101 panic.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "llbc/llbc.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 2;
constexpr int kInconclusive = 3;
constexpr int kPanic = 101;

struct Config {
  std::vector<std::string> files;
  std::string entry;
  std::string out_dir;
  std::string style = "both";
  bool json_out = false;
  bool no_checks = false;
  bool trace = false;
  bool dump_env = false;
  bool inline_lets = true;
  uint64_t fuel = 1'000'000;
};

// Owns a string handed out by the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { llbc_string_free(p); }
  std::string str() const { return p ? p : ""; }
  json parse() const { return p ? json::parse(p) : json(); }
};

struct ProgramPtr {
  llbc_program* p = nullptr;
  ~ProgramPtr() { llbc_program_free(p); }
};

std::string error_text() {
  std::string code = llbc_last_error_code();
  std::string msg = llbc_last_error();
  return code.empty() ? msg : code + ": " + msg;
}

llbc_options options(const Config& c) {
  llbc_options o;
  llbc_options_init(&o);
  o.check_invariants = c.no_checks ? 0 : 1;
  o.trace = c.trace ? 1 : 0;
  o.inline_lets = c.inline_lets ? 1 : 0;
  o.fuel = c.fuel;
  return o;
}

// Loads and validates one file. On failure, err describes why and the
// returned status is not LLBC_OK; diags holds validation diagnostics.
llbc_status load(const std::string& path, ProgramPtr& out, std::string& err, json& diags) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err = path + ": cannot read file";
    return LLBC_ERR_ARGUMENT;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  llbc_status st = fs::path(path).extension() == ".json"
                       ? llbc_program_from_json(text.data(), text.size(), &out.p)
                       : llbc_program_parse(text.data(), text.size(), &out.p);
  if (st == LLBC_ERR_INVALID) {
    CStr d;
    llbc_validate(out.p, &d.p);
    diags = d.parse();
    err.clear();
    for (const auto& x : diags)
      err += path + ":" + std::to_string(x["line"].get<int>()) + ":" + std::to_string(x["col"].get<int>()) +
             ": " + x["code"].get<std::string>() + ": " + x["message"].get<std::string>() + "\n";
    if (!err.empty()) err.pop_back();
  } else if (st != LLBC_OK) {
    err = path + ": " + error_text();
  }
  return st;
}

// Writes text to path through a temporary file and a rename.
bool write_atomic(const fs::path& path, const std::string& text, std::string& err) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) {
      err = "cannot write " + tmp.string();
      return false;
    }
    o << text;
    if (!o.flush()) {
      err = "write failed: " + tmp.string();
      return false;
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    err = "cannot rename " + tmp.string() + ": " + ec.message();
    fs::remove(tmp, ec);
    return false;
  }
  return true;
}

struct FileCheck {
  std::string file;
  bool ok = false;
  std::string error;
  json diagnostics = json::array();
  json functions = json::array();
};

FileCheck check_one(const std::string& path, const llbc_options& o) {
  FileCheck r;
  r.file = path;
  ProgramPtr prog;
  if (load(path, prog, r.error, r.diagnostics) != LLBC_OK) return r;
  int all_ok = 0;
  CStr rep;
  if (llbc_check(prog.p, &o, &all_ok, &rep.p) != LLBC_OK) {
    r.error = path + ": " + error_text();
    return r;
  }
  r.functions = rep.parse();
  r.ok = all_ok != 0;
  return r;
}

int cmd_check(const Config& c) {
  llbc_options o = options(c);
  std::vector<std::future<FileCheck>> jobs;
  for (const auto& f : c.files) jobs.push_back(std::async(std::launch::async, check_one, f, o));
  bool all = true;
  json out = json::array();
  for (auto& j : jobs) {
    FileCheck r = j.get();
    all = all && r.ok;
    if (c.json_out) {
      json e = {{"file", r.file}, {"ok", r.ok}, {"functions", r.functions}, {"diagnostics", r.diagnostics}};
      if (!r.error.empty()) e["error"] = r.error;
      out.push_back(std::move(e));
      continue;
    }
    if (!r.error.empty()) {
      std::cerr << r.error << "\n";
      continue;
    }
    for (const auto& f : r.functions) {
      std::string name = f["fn"];
      if (f["ok"].get<bool>()) {
        std::cout << r.file << ": " << name << ": Accepted\n";
      } else {
        std::cout << r.file << ":" << f["line"].get<int>() << ":" << f["col"].get<int>() << ": " << name
                  << ": Rejected " << f["code"].get<std::string>() << ": " << f["message"].get<std::string>()
                  << "\n";
        if (c.dump_env && !f["env"].get<std::string>().empty()) std::cout << f["env"].get<std::string>() << "\n";
      }
    }
  }
  if (c.json_out) std::cout << out.dump(2) << "\n";
  return all ? kOk : kError;
}

int cmd_run(const Config& c) {
  ProgramPtr prog;
  std::string err;
  json diags;
  if (load(c.files[0], prog, err, diags) != LLBC_OK) {
    std::cerr << err << "\n";
    return kError;
  }
  llbc_options o = options(c);
  llbc_outcome oc{};
  CStr res;
  if (llbc_run(prog.p, c.entry.c_str(), &o, &oc, &res.p) != LLBC_OK) {
    if (c.json_out)
      std::cout << json{{"outcome", "EvalError"}, {"code", llbc_last_error_code()}, {"message", llbc_last_error()}}
                       .dump(2)
                << "\n";
    else
      std::cerr << c.files[0] << ": " << error_text() << "\n";
    return kError;
  }
  json j = res.parse();
  if (c.json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    if (c.trace)
      for (const auto& t : j["trace"]) std::cout << t.get<std::string>() << "\n";
    if (oc == LLBC_PANICKED)
      std::cout << "Panicked\n";
    else
      std::cout << "Returned(" << j["value"].get<std::string>() << ")\n";
    if (c.dump_env) std::cout << j["env"].get<std::string>() << "\n";
  }
  return oc == LLBC_PANICKED ? kPanic : kOk;
}

int cmd_translate(const Config& c) {
  ProgramPtr prog;
  std::string err;
  json diags;
  if (load(c.files[0], prog, err, diags) != LLBC_OK) {
    std::cerr << err << "\n";
    return kError;
  }
  llbc_options o = options(c);
  std::vector<std::pair<llbc_style, std::string>> styles;
  if (c.style == "fstar" || c.style == "both") styles.push_back({LLBC_STYLE_FSTAR, ".pure.fst.txt"});
  if (c.style == "neutral" || c.style == "both") styles.push_back({LLBC_STYLE_NEUTRAL, ".pure.ml.txt"});
  json summary;
  std::vector<std::pair<fs::path, std::string>> outputs;
  for (const auto& [style, ext] : styles) {
    CStr text, rep;
    if (llbc_translate(prog.p, &o, style, &text.p, &rep.p) != LLBC_OK) {
      std::cerr << c.files[0] << ": translation failed: " << error_text() << "\n";
      return kError;
    }
    summary = rep.parse();
    if (c.out_dir.empty()) {
      std::cout << text.str();
      continue;
    }
    outputs.push_back({fs::path(c.out_dir) / (fs::path(c.files[0]).stem().string() + ext), text.str()});
  }
  if (!c.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    for (const auto& [path, text] : outputs) {
      if (!write_atomic(path, text, err)) {
        std::cerr << err << "\n";
        return kError;
      }
    }
  }
  std::ostream& os = c.out_dir.empty() ? std::cerr : std::cout;
  if (c.json_out) {
    summary["files"] = json::array();
    for (const auto& [path, text] : outputs) summary["files"].push_back(path.string());
    os << summary.dump(2) << "\n";
  } else {
    os << c.files[0] << ": types=" << summary["types"] << " decls=" << summary["decls"] << " (forward="
       << summary["forward"] << " backward=" << summary["backward"] << " opaque=" << summary["opaque"]
       << ")\n";
    for (const auto& [path, text] : outputs) os << "wrote " << path.string() << "\n";
  }
  return kOk;
}

int cmd_difftest(const Config& c) {
  ProgramPtr prog;
  std::string err;
  json diags;
  if (load(c.files[0], prog, err, diags) != LLBC_OK) {
    std::cerr << err << "\n";
    return kError;
  }
  std::vector<std::string> entries;
  if (!c.entry.empty()) {
    entries.push_back(c.entry);
  } else {
    CStr names;
    llbc_program_entries(prog.p, &names.p);
    for (const auto& n : names.parse()) entries.push_back(n);
  }
  llbc_options o = options(c);
  int status = kOk;
  json out = json::array();
  for (const auto& e : entries) {
    llbc_outcome oc{};
    CStr res;
    if (llbc_difftest(prog.p, e.c_str(), &o, &oc, &res.p) != LLBC_OK) {
      if (c.json_out)
        out.push_back({{"entry", e}, {"verdict", "ERROR"}, {"code", llbc_last_error_code()},
                       {"message", llbc_last_error()}});
      else
        std::cout << e << ": ERROR " << error_text() << "\n";
      status = kError;
      continue;
    }
    json j = res.parse();
    j["entry"] = e;
    if (oc == LLBC_DIFFER) status = kError;
    if (oc == LLBC_INCONCLUSIVE && status == kOk) status = kInconclusive;
    if (c.json_out) {
      out.push_back(std::move(j));
      continue;
    }
    std::string pure = j["pure"], conc = j["concrete"];
    if (oc == LLBC_EQUAL)
      std::cout << e << ": EQUAL " << pure << "\n";
    else if (oc == LLBC_DIFFER)
      std::cout << e << ": DIFFER concrete=" << conc << " pure=" << pure << "\n";
    else
      std::cout << e << ": INCONCLUSIVE concrete=" << conc << " pure=" << pure << "\n";
  }
  if (c.json_out) std::cout << out.dump(2) << "\n";
  return status;
}

} // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"llbc: borrow checking, execution and pure translation of LLBC programs"};
  app.set_version_flag("--version", std::string(llbc_version()));
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* s) {
    s->add_flag("--json", c.json_out, "Machine-readable output");
    s->add_flag("--no-invariant-checks", c.no_checks, "Skip environment invariant checks");
  };

  auto* check = app.add_subcommand("check", "Borrow check every function of the given files");
  check->add_option("files", c.files, "Input files")->required()->check(CLI::ExistingFile);
  check->add_flag("--dump-env", c.dump_env, "Print the environment at each rejection");
  common(check);

  auto* run = app.add_subcommand("run", "Execute a nullary entry point concretely");
  run->add_option("file", c.files, "Input file")->required()->expected(1)->check(CLI::ExistingFile);
  run->add_option("--entry", c.entry, "Entry function")->required();
  run->add_flag("--trace", c.trace, "Print the environment after every statement");
  run->add_flag("--dump-env", c.dump_env, "Print the final environment");
  common(run);

  auto* tr = app.add_subcommand("translate", "Translate to pure code");
  tr->add_option("file", c.files, "Input file")->required()->expected(1)->check(CLI::ExistingFile);
  tr->add_option("-o,--output", c.out_dir, "Output directory (stdout if absent)");
  tr->add_option("--style", c.style, "Output style")->check(CLI::IsMember({"fstar", "neutral", "both"}));
  tr->add_flag("--inline-lets,!--no-inline-lets", c.inline_lets, "Inline trivial lets (default on)");
  common(tr);

  auto* dt = app.add_subcommand("difftest", "Compare concrete execution with the pure translation");
  dt->add_option("file", c.files, "Input file")->required()->expected(1)->check(CLI::ExistingFile);
  dt->add_option("--entry", c.entry, "Entry function (default: every closed entry)");
  dt->add_option("--fuel", c.fuel, "Call budget of the pure evaluator")->check(CLI::PositiveNumber);
  dt->add_flag("--inline-lets,!--no-inline-lets", c.inline_lets, "Inline trivial lets (default on)");
  common(dt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*check) return cmd_check(c);
    if (*run) return cmd_run(c);
    if (*tr) return cmd_translate(c);
    if (*dt) return cmd_difftest(c);
  } catch (const std::exception& e) {
    std::cerr << "llbc: " << e.what() << "\n";
  }
  return kError;
}
