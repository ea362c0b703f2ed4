// Copyright 2026 The rea Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gmpxx.h>

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "rea/answer.hpp"

namespace rea {
namespace {

TEST(ExtractFinalAnswer, Examples) {
  EXPECT_EQ(ExtractFinalAnswer("thus \\boxed{42}"), "42");
  EXPECT_EQ(ExtractFinalAnswer("\\boxed{\\frac{1}{2}}"), "\\frac{1}{2}");
  EXPECT_EQ(ExtractFinalAnswer("no box here"), std::nullopt);
  EXPECT_EQ(ExtractFinalAnswer("\\boxed{1} then \\boxed{2}"), "2");
  EXPECT_EQ(ExtractFinalAnswer("\\boxed {x^{2}}"), "x^{2}");
  EXPECT_EQ(ExtractFinalAnswer("\\boxed{\\{1,2\\}}"), "\\{1,2\\}");
  EXPECT_EQ(ExtractFinalAnswer("\\boxed{\\boxed{3}}"), "\\boxed{3}");
  EXPECT_THROW(ExtractFinalAnswer("answer \\boxed{\\frac{1}{2}"), ParseError);
}

std::string RandomBraced(std::mt19937_64& rng, int depth) {
  std::string s;
  const int parts = static_cast<int>(rng() % 4);
  for (int i = 0; i < parts; ++i) {
    switch (rng() % 4) {
      case 0: s += std::to_string(rng() % 100); break;
      case 1: s += "x+"; break;
      case 2: s += "\\frac"; break;
      default:
        if (depth < 3) s += "{" + RandomBraced(rng, depth + 1) + "}";
    }
  }
  return s;
}

// Strings assembled from filler and boxes; the expected answer is the
// content of the last box placed.
TEST(ExtractFinalAnswer, ConstructedOracle) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 2000; ++n) {
    std::string s;
    std::optional<std::string> expected;
    const int pieces = static_cast<int>(rng() % 5);
    for (int i = 0; i < pieces; ++i) {
      if (rng() % 2) {
        s += " so the value is {a} ";
      } else {
        const std::string content = RandomBraced(rng, 0);
        s += "\\boxed{" + content + "}";
        expected = content;
      }
    }
    ASSERT_EQ(ExtractFinalAnswer(s), expected) << s;
  }
}

TEST(AnswersEqual, Examples) {
  EXPECT_TRUE(AnswersEqual("0.5", "\\frac{1}{2}"));
  EXPECT_TRUE(AnswersEqual("42", "42."));
  EXPECT_FALSE(AnswersEqual("7", "8"));
  EXPECT_TRUE(AnswersEqual(" 1,000 ", "1000"));
  EXPECT_TRUE(AnswersEqual("\\left( 1, 2 \\right)", "(1,2)"));
  EXPECT_TRUE(AnswersEqual("-\\dfrac{3}{4}", "-0.75"));
  EXPECT_TRUE(AnswersEqual("$\\frac{3}{4}$", "3/4"));
  EXPECT_TRUE(AnswersEqual("\\text{east}", "east"));
  EXPECT_FALSE(AnswersEqual("x+1", "1+x"));
  EXPECT_FALSE(AnswersEqual("1,00", "100"));
  EXPECT_TRUE(AnswersEqual("1000000", "1000000.5"));  // within 1e-6 relative
  EXPECT_FALSE(AnswersEqual("1000", "1000.5"));
}

TEST(AnswersEqual, ReflexiveAndSymmetric) {
  const std::vector<std::string> pool{"0.5", "\\frac{1}{2}", "1/2", "42", "42.", "x+1", "", "\\sqrt{2}",
                                      "-3", "-\\frac{6}{2}", "1,000", "1e3", "\\text{A}", "A", "50\\%"};
  for (const auto& a : pool) {
    EXPECT_TRUE(AnswersEqual(a, a)) << a;
    for (const auto& b : pool) EXPECT_EQ(AnswersEqual(a, b), AnswersEqual(b, a)) << a << " vs " << b;
  }
}

// Exact decimal rendering of p/q rounded to `digits` places, and its rational
// value.
std::pair<std::string, mpq_class> Decimal(long p, long q, int digits) {
  mpz_class scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  mpz_class num = mpz_class(p < 0 ? -p : p) * scale;
  mpz_class rounded = (2 * num + q) / (2 * q);
  mpz_class whole = rounded / scale;
  mpz_class frac = rounded % scale;
  std::string fs = frac.get_str();
  if (static_cast<int>(fs.size()) < digits) fs.insert(0, static_cast<std::size_t>(digits) - fs.size(), '0');
  const bool negative = p < 0 && rounded != 0;
  std::string s = (negative ? "-" : "") + whole.get_str() + (digits > 0 ? "." + fs : "");
  mpq_class value(rounded, scale);
  value.canonicalize();
  if (negative) value = -value;
  return {s, value};
}

std::pair<std::string, mpq_class> Fraction(long p, long q, std::mt19937_64& rng) {
  mpq_class value(p, q);
  value.canonicalize();
  switch (rng() % 3) {
    case 0: return {std::to_string(p) + "/" + std::to_string(q), value};
    case 1:
      return {(p < 0 ? "-\\frac{" : "\\frac{") + std::to_string(p < 0 ? -p : p) + "}{" + std::to_string(q) + "}", value};
    default: return {"\\dfrac{" + std::to_string(p) + "}{" + std::to_string(q) + "}", value};
  }
}

TEST(AnswersEqual, RationalOracle) {
  std::mt19937_64 rng(77);
  const mpq_class tol(1, 1000000);
  int checked = 0, agreed_true = 0;
  for (int n = 0; n < 20000; ++n) {
    const long p = static_cast<long>(rng() % 20001) - 10000;
    const long q = 1 + static_cast<long>(rng() % 400);
    auto a = Fraction(p, q, rng);
    std::pair<std::string, mpq_class> b;
    if (rng() % 2) {
      b = Decimal(p, q, static_cast<int>(rng() % 10));
    } else {
      const long p2 = rng() % 4 ? p * 3 : p + static_cast<long>(rng() % 3) - 1;
      b = Fraction(p2, q * 3, rng);
    }
    const mpq_class diff = abs(a.second - b.second);
    const mpq_class scale = std::max(abs(a.second), abs(b.second));
    // Skip pairs whose exact relative difference sits on the tolerance edge,
    // where the double comparison may round either way.
    const mpq_class edge = abs(diff - tol * scale);
    if (scale != 0 && edge < tol * scale / 1000) continue;
    const bool expected = diff <= tol * scale;
    ++checked;
    agreed_true += expected;
    ASSERT_EQ(AnswersEqual(a.first, b.first), expected) << a.first << " vs " << b.first;
  }
  EXPECT_GT(checked, 19900);
  EXPECT_GT(agreed_true, 1000);
  EXPECT_LT(agreed_true, checked - 1000);
}

}  // namespace
}  // namespace rea
