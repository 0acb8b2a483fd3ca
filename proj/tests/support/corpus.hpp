// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the test binaries.

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "llbc/syntax.hpp"

#ifndef LLBC_TEST_DIR
#error "LLBC_TEST_DIR must point at the tests directory"
#endif

namespace llbc::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) { return std::string(LLBC_TEST_DIR) + "/corpus/" + name + ".llbc"; }
inline std::string golden_path(const std::string& name) {
  return std::string(LLBC_TEST_DIR) + "/golden/" + name + ".pure.ml.txt";
}

// Parses and validates; throws when validation reports anything.
inline Program load_text(const std::string& text) {
  Program p = parse_program(text);
  auto ds = validate(p);
  if (!ds.empty()) throw std::runtime_error("invalid program: " + ds.front().str());
  return p;
}

inline Program load_corpus(const std::string& name) { return load_text(read_file(corpus_path(name))); }

// Corpus files whose every function is expected to be accepted, with their
// closed entry points.
struct CorpusEntry {
  const char* file;
  std::vector<const char*> entries;
};

inline const std::vector<CorpusEntry>& accepted_corpus() {
  static const std::vector<CorpusEntry> c = {
      {"incr", {"test_incr"}},
      {"choose", {"test_choose"}},
      {"list", {"test_nth"}},
      {"swap", {"test_swap"}},
      {"two_phase", {"test_two_phase"}},
      {"get_suffix", {"test_suffix"}},
      {"shared_reborrow", {"shared_reborrow"}},
      {"mut_reborrow", {"mut_reborrow"}},
      {"twisted", {"twisted"}},
      {"hashmap", {"test_insert"}},
      {"opaque", {}},
      {"empty", {}},
  };
  return c;
}

} // namespace llbc::testing
