#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tcsel::cli {

enum class Signal { Strong, None };

Signal parse_signal(std::string_view text);

struct FixtureParams {
  std::filesystem::path out;
  int chains = 2;
  int files = 20;
  int test_cases = 30;
  int vocabulary = 400;
  std::uint64_t seed = 7;
  // Per chain; the last entry repeats for the remaining chains.
  std::vector<Signal> signals{Signal::Strong};
};

struct FixtureLayout {
  std::filesystem::path product;
  std::filesystem::path build;
  std::vector<std::filesystem::path> chains;
  std::filesystem::path test_cases;
  std::filesystem::path config;
  // Chain id -> its relevant test case.
  std::vector<std::pair<std::string, std::string>> relevant;
};

// Writes a synthetic product tree (product/), per-chain deployed trees
// (build/<chain>/), chain specs (chains/), test cases (testcases/) and a
// ready-to-run pipeline.cfg under params.out. Output is a pure function of
// the parameters.
//
// Each chain adds one file, appends lines to one file and owns a block of
// lines in another file that disappears when the feature is off. A chain with
// strong signal shares its feature terms with its relevant test case; a chain
// without signal gets a relevant test case built from words that occur nowhere
// in the product.
FixtureLayout make_fixture(const FixtureParams& params);

}  // namespace tcsel::cli
