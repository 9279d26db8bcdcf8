#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "bioverify/text.hpp"

using namespace bioverify;

TEST_CASE("normalize applies the fixed ruleset") {
  CHECK(normalize("Hypertension") == "hypertension");
  CHECK(normalize("bull's-eye  Rash") == "bulls eye rash");
  CHECK(normalize("") == "");
  CHECK(normalize("Type-2/insulin, dependent.") == "type 2 insulin dependent");
  CHECK(normalize("  leading and trailing \t ") == "leading and trailing");
  CHECK(normalize("a,b-c/d") == "a b c d");
  CHECK(normalize("...") == "");
}

TEST_CASE("normalize is idempotent and total over random byte strings") {
  std::mt19937 rng(20240917);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const std::size_t len = rng() % 64;
    for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(rng() % 256));
    const std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("tokenize splits maximal alnum runs") {
  CHECK(tokenize("shortness of breath") == std::vector<std::string>{"shortness", "of", "breath"});
  CHECK(tokenize("a1 (b2) c3") == std::vector<std::string>{"a1", "b2", "c3"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("   ").empty());
}

TEST_CASE("contains_token_phrase is whole-token and contiguous") {
  const auto tokens = tokenize(normalize("Patients with hypertension were enrolled"));
  CHECK(contains_token_phrase(tokens, tokenize("hypertension")));
  CHECK(contains_token_phrase(tokens, tokenize("with hypertension")));
  CHECK_FALSE(contains_token_phrase(tokens, tokenize("hyper")));
  CHECK_FALSE(contains_token_phrase(tokens, tokenize("patients hypertension")));
  CHECK_FALSE(contains_token_phrase(tokens, {}));  // empty phrase matches nothing
}
