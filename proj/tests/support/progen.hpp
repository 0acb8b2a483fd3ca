// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Seeded generator of closed LLBC programs for differential testing.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace llbc::testing {

struct GenProgram {
  std::string family;
  uint64_t seed = 0;
  std::string text;
  std::string entry = "main";
};

// Number of program families; generate(k, seed) picks family k % families().
size_t families();
GenProgram generate(size_t family, uint64_t seed);
// n programs cycling through the families.
std::vector<GenProgram> generate_suite(size_t n, uint64_t base_seed = 1);

} // namespace llbc::testing
