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

// Final-answer extraction from \boxed{...} and a light-weight answer matcher.
// The matcher is a small subset of what full math validators do: numeric
// comparison with fractions and decimals, plus cosmetic normalization.

#ifndef REA_ANSWER_HPP_
#define REA_ANSWER_HPP_

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include "rea/error.hpp"
#include "rea/tokens.hpp"

namespace rea {

namespace detail {

// Given `s[open] == '{'`, returns the index of the matching '}' or npos.
// Escaped braces ("\{", "\}") do not count towards depth.
inline std::size_t MatchBrace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\\' && i + 1 < s.size() && (s[i + 1] == '{' || s[i + 1] == '}')) {
      ++i;
      continue;
    }
    if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace detail

// Content of the last top-level \boxed{...}. Returns nullopt when no box is
// present; throws ParseError when a box opener has no matching close brace.
inline std::optional<std::string> ExtractFinalAnswer(std::string_view s) {
  static constexpr std::string_view kBoxed = "\\boxed";
  std::optional<std::string> last;
  std::size_t pos = 0;
  while ((pos = s.find(kBoxed, pos)) != std::string_view::npos) {
    std::size_t i = pos + kBoxed.size();
    while (i < s.size() && s[i] == ' ') ++i;
    if (i >= s.size() || s[i] != '{') {
      pos = i;
      continue;
    }
    const std::size_t close = detail::MatchBrace(s, i);
    if (close == std::string_view::npos) {
      throw ParseError("unbalanced braces in \\boxed at offset " + std::to_string(pos));
    }
    last.emplace(s.substr(i + 1, close - i - 1));
    pos = close + 1;
  }
  return last;
}

namespace detail {

inline void EraseAll(std::string& s, std::string_view what) {
  for (std::size_t p; (p = s.find(what)) != std::string::npos;) s.erase(p, what.size());
}

inline std::string NormalizeAnswer(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw) {
    if (!text::IsAsciiSpace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  EraseAll(s, "\\left");
  EraseAll(s, "\\right");
  EraseAll(s, "\\!");
  EraseAll(s, "\\,");
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) s.pop_back();
  while (s.size() >= 2 && s.front() == '$' && s.back() == '$') s = s.substr(1, s.size() - 2);
  if (s.starts_with("\\text{") && s.ends_with("}")) s = s.substr(6, s.size() - 7);
  return s;
}

// Parses a plain decimal such as "-12", "3.25", "1,000" or ".5". The whole
// string must be consumed.
inline std::optional<double> ParseDecimal(std::string_view s) {
  std::string digits;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) digits.push_back(s[i++]);
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      digits.push_back(c);
      seen_point = true;
    } else if (c == ',' && seen_digit && !seen_point) {
      // thousands separator: exactly three digits until the next separator
      std::size_t k = i + 1;
      while (k < s.size() && s[k] >= '0' && s[k] <= '9') ++k;
      if (k - i - 1 != 3) return std::nullopt;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(digits.c_str(), &end);
  if (end != digits.c_str() + digits.size()) return std::nullopt;
  return v;
}

// Numeric value of a decimal, "a/b", or "\frac{a}{b}" (also \dfrac, \tfrac),
// with an optional leading sign, or "n\%" read as n.
inline std::optional<double> ParseNumber(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double sign = 1.0;
  if (s.front() == '-' || s.front() == '+') {
    std::string_view rest = s.substr(1);
    if (rest.starts_with("\\frac") || rest.starts_with("\\dfrac") || rest.starts_with("\\tfrac")) {
      sign = s.front() == '-' ? -1.0 : 1.0;
      s = rest;
    }
  }
  for (std::string_view cmd : {"\\frac", "\\dfrac", "\\tfrac"}) {
    if (!s.starts_with(cmd)) continue;
    std::size_t a = cmd.size();
    if (a >= s.size() || s[a] != '{') return std::nullopt;
    const std::size_t a_end = MatchBrace(s, a);
    if (a_end == std::string_view::npos || a_end + 1 >= s.size() || s[a_end + 1] != '{') {
      return std::nullopt;
    }
    const std::size_t b = a_end + 1;
    const std::size_t b_end = MatchBrace(s, b);
    if (b_end != s.size() - 1) return std::nullopt;
    auto num = ParseNumber(s.substr(a + 1, a_end - a - 1));
    auto den = ParseNumber(s.substr(b + 1, b_end - b - 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return sign * *num / *den;
  }
  if (s.ends_with("\\%")) return ParseDecimal(s.substr(0, s.size() - 2));
  if (s.ends_with("%")) return ParseDecimal(s.substr(0, s.size() - 1));
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = ParseDecimal(s.substr(0, slash));
    auto den = ParseDecimal(s.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  return ParseDecimal(s);
}

}  // namespace detail

inline constexpr double kAnswerRelativeTolerance = 1e-6;

inline bool AnswersEqual(std::string_view a, std::string_view b) {
  const std::string na = detail::NormalizeAnswer(a);
  const std::string nb = detail::NormalizeAnswer(b);
  if (na == nb) return true;
  const auto va = detail::ParseNumber(na);
  const auto vb = detail::ParseNumber(nb);
  if (va && vb) {
    const double scale = std::max(std::fabs(*va), std::fabs(*vb));
    return std::fabs(*va - *vb) <= kAnswerRelativeTolerance * scale;
  }
  return false;
}

}  // namespace rea

#endif  // REA_ANSWER_HPP_
