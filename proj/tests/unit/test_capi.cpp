// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <string>
#include <thread>
#include <vector>

#include "corpus.hpp"
#include "llbc/llbc.h"

using json = nlohmann::json;
using llbc::testing::corpus_path;
using llbc::testing::read_file;

namespace {

struct Handle {
  llbc_program* p = nullptr;
  llbc_status st = LLBC_OK;
  explicit Handle(const std::string& text) { st = llbc_program_parse(text.data(), text.size(), &p); }
  ~Handle() { llbc_program_free(p); }
};

json take(char* s) {
  json j = json::parse(s);
  llbc_string_free(s);
  return j;
}

} // namespace

TEST_CASE("version and options") {
  CHECK(std::string(llbc_version()).size() > 0);
  llbc_options o;
  llbc_options_init(&o);
  CHECK(o.check_invariants == 1);
  CHECK(o.inline_lets == 1);
  CHECK(o.fuel > 0);
}

TEST_CASE("argument errors") {
  llbc_program* p = nullptr;
  CHECK(llbc_program_parse(nullptr, 0, &p) == LLBC_ERR_ARGUMENT);
  CHECK(llbc_check(nullptr, nullptr, nullptr, nullptr) == LLBC_ERR_ARGUMENT);
  Handle h("");
  REQUIRE(h.st == LLBC_OK);
  CHECK(llbc_run(h.p, nullptr, nullptr, nullptr, nullptr) == LLBC_ERR_ARGUMENT);
  CHECK(llbc_translate(h.p, nullptr, static_cast<llbc_style>(7), nullptr, nullptr) == LLBC_ERR_ARGUMENT);
}

TEST_CASE("parse and validation failures") {
  Handle bad("fn f( {");
  CHECK(bad.st == LLBC_ERR_PARSE);
  CHECK(bad.p == nullptr);
  CHECK(std::string(llbc_last_error()).find("1:") != std::string::npos);

  Handle inv(read_file(corpus_path("nested_sig")));
  CHECK(inv.st == LLBC_ERR_INVALID);
  REQUIRE(inv.p != nullptr);
  CHECK(std::string(llbc_last_error_code()) == "NESTED_BORROW_SIG");
  char* d = nullptr;
  CHECK(llbc_validate(inv.p, &d) == LLBC_ERR_INVALID);
  json diags = take(d);
  REQUIRE(diags.size() >= 1);
  CHECK(diags[0]["code"] == "NESTED_BORROW_SIG");
  CHECK(llbc_check(inv.p, nullptr, nullptr, nullptr) == LLBC_ERR_INVALID);
}

TEST_CASE("check, run, translate and difftest") {
  Handle h(read_file(corpus_path("list")));
  REQUIRE(h.st == LLBC_OK);
  llbc_options o;
  llbc_options_init(&o);

  int ok = 0;
  char* rep = nullptr;
  REQUIRE(llbc_check(h.p, &o, &ok, &rep) == LLBC_OK);
  CHECK(ok == 1);
  CHECK(take(rep).size() == 3);

  llbc_outcome oc{};
  char* res = nullptr;
  REQUIRE(llbc_run(h.p, "test_nth", &o, &oc, &res) == LLBC_OK);
  CHECK(oc == LLBC_RETURNED);
  CHECK(take(res)["value"] == "()");
  CHECK(llbc_run(h.p, "nope", &o, &oc, nullptr) == LLBC_ERR_EVAL);

  char* text = nullptr;
  REQUIRE(llbc_translate(h.p, &o, LLBC_STYLE_FSTAR, &text, &rep) == LLBC_OK);
  CHECK(std::string(text).find("let rec list_nth_mut_fwd") != std::string::npos);
  llbc_string_free(text);
  json summary = take(rep);
  CHECK(summary["types"] == 1);
  CHECK(summary["decls"] == 4);
  CHECK(summary["backward"] == 1);

  REQUIRE(llbc_difftest(h.p, "test_nth", &o, &oc, &res) == LLBC_OK);
  CHECK(oc == LLBC_EQUAL);
  json dj = take(res);
  CHECK(dj["verdict"] == "EQUAL");
  CHECK(dj["pure"] == "Return(())");

  o.fuel = 1;
  REQUIRE(llbc_difftest(h.p, "test_nth", &o, &oc, nullptr) == LLBC_OK);
  CHECK(oc == LLBC_INCONCLUSIVE);

  char* names = nullptr;
  REQUIRE(llbc_program_entries(h.p, &names) == LLBC_OK);
  CHECK(take(names) == json::array({"test_nth"}));
}

TEST_CASE("rejections are reported, not raised") {
  Handle h(read_file(corpus_path("illegal_borrow")));
  REQUIRE(h.st == LLBC_OK);
  int ok = 1;
  char* rep = nullptr;
  REQUIRE(llbc_check(h.p, nullptr, &ok, &rep) == LLBC_OK);
  CHECK(ok == 0);
  json r = take(rep);
  CHECK(r[0]["code"] == "PATH_MISMATCH");
  CHECK(r[0]["line"] == 9);
  CHECK(llbc_translate(h.p, nullptr, LLBC_STYLE_NEUTRAL, nullptr, nullptr) == LLBC_ERR_TRANSLATE);
}

TEST_CASE("JSON interchange") {
  Handle h(read_file(corpus_path("choose")));
  char* js = nullptr;
  REQUIRE(llbc_program_to_json(h.p, &js) == LLBC_OK);
  std::string text = js;
  llbc_string_free(js);
  llbc_program* q = nullptr;
  REQUIRE(llbc_program_from_json(text.data(), text.size(), &q) == LLBC_OK);
  char* a = nullptr;
  char* b = nullptr;
  llbc_program_pretty(h.p, &a);
  llbc_program_pretty(q, &b);
  CHECK(std::string(a) == std::string(b));
  llbc_string_free(a);
  llbc_string_free(b);
  llbc_program_free(q);
}

TEST_CASE("concurrent use from several threads") {
  std::vector<std::string> files = {"list", "choose", "hashmap", "swap", "two_phase", "incr"};
  std::vector<int> verdicts(files.size(), -1);
  std::vector<std::thread> ts;
  for (size_t i = 0; i < files.size(); ++i) {
    ts.emplace_back([&, i] {
      Handle h(read_file(corpus_path(files[i])));
      int ok = 0;
      if (h.st == LLBC_OK && llbc_check(h.p, nullptr, &ok, nullptr) == LLBC_OK) verdicts[i] = ok;
    });
  }
  for (auto& t : ts) t.join();
  for (int v : verdicts) CHECK(v == 1);
}
