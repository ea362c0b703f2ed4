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

// Reward functions for group-relative RL on reasoning traces:
//
//   accuracy    1 iff the last \boxed{} answer matches the gold answer.
//   length      min-max normalized group length score. The Kimi variant caps
//               incorrect responses at 0.5; the refined variant zeroes them.
//   reflection  min(0, D / D_q - 1) where D is the clustered reflective-keyword
//               density of the response and D_q a corpus density quantile.

#ifndef REA_REWARDS_HPP_
#define REA_REWARDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rea/answer.hpp"
#include "rea/error.hpp"
#include "rea/tokens.hpp"
#include "rea/trace.hpp"

namespace rea {

enum class LengthVariant { kKimi, kRefined };

inline LengthVariant ParseLengthVariant(std::string_view s) {
  if (s == "kimi") return LengthVariant::kKimi;
  if (s == "refined") return LengthVariant::kRefined;
  throw ConfigurationError("unknown length variant: " + std::string(s));
}

inline const char* LengthVariantName(LengthVariant v) {
  return v == LengthVariant::kKimi ? "kimi" : "refined";
}

// Density quantiles observed on the reference training corpus, expressed as
// reflective instances per token.
inline constexpr double kDensityQuantile10 = 1.0 / 299.0;
inline constexpr double kDensityQuantile20 = 1.0 / 225.0;
inline constexpr double kDensityQuantile40 = 1.0 / 157.0;

struct RewardWeights {
  double accuracy = 1.0;
  double length = 1.0;
  double reflection = 1.0;
};

struct RewardConfig {
  std::set<std::string> reflective_tokens = {"wait", "alternatively", "check", "but"};
  std::size_t cluster_window_tokens = 16;
  double density_threshold = kDensityQuantile20;
  LengthVariant length_variant = LengthVariant::kKimi;
  RewardWeights weights;
  // When set, reflective keywords are counted in the think part only; the
  // density denominator still covers the full response.
  bool reflect_think_only = false;

  void Validate() const {
    if (reflective_tokens.empty()) throw ConfigurationError("reflective_tokens must be non-empty");
    if (!(density_threshold > 0.0) || !std::isfinite(density_threshold)) {
      throw ConfigurationError("density threshold must be positive");
    }
    if (cluster_window_tokens == 0) throw ConfigurationError("cluster window must be positive");
    for (double w : {weights.accuracy, weights.length, weights.reflection}) {
      if (!std::isfinite(w)) throw ConfigurationError("reward weights must be finite");
    }
  }
};

struct RewardVector {
  int accuracy = 0;
  double length = 0.0;
  double reflection = 0.0;
  double combined = 0.0;
};

// ---------------------------------------------------------------------------
// Accuracy

inline int AccuracyReward(std::string_view response_answer, std::string_view gold) {
  std::optional<std::string> extracted;
  try {
    extracted = ExtractFinalAnswer(response_answer);
  } catch (const ParseError&) {
    return 0;
  }
  return extracted && AnswersEqual(*extracted, gold) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Length

struct LengthSample {
  double length = 0.0;
  bool correct = false;
};

inline std::vector<double> LengthRewards(const std::vector<LengthSample>& group,
                                         LengthVariant variant) {
  if (group.empty()) throw DomainError("length reward needs a non-empty group");
  double lo = group.front().length;
  double hi = group.front().length;
  for (const auto& s : group) {
    if (s.length < 0.0 || !std::isfinite(s.length)) throw DomainError("negative or non-finite length");
    lo = std::min(lo, s.length);
    hi = std::max(hi, s.length);
  }
  std::vector<double> out;
  out.reserve(group.size());
  for (const auto& s : group) {
    const double lambda = hi == lo ? 1.0 : 1.0 - (s.length - lo) / (hi - lo);
    if (s.correct) {
      out.push_back(lambda);
    } else {
      out.push_back(variant == LengthVariant::kKimi ? std::min(0.5, lambda) : 0.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reflection

struct ReflectionCount {
  std::size_t instances = 0;
  std::size_t raw_matches = 0;
  // Token ordinal of each counted instance.
  std::vector<std::size_t> positions;
};

// Clustered count of reflective keywords. Matching is whole-word and
// case-insensitive over unicode-word tokens; each match is placed at the
// ordinal of the counter token containing its first byte. A match at most
// `cluster_window_tokens` tokens after the previously counted instance is
// absorbed into it.
inline ReflectionCount CountReflective(std::string_view response, const RewardConfig& config,
                                       const TokenCounter& counter) {
  ReflectionCount result;
  const auto words = text::WordSpans(response);
  const bool word_mode = counter.mode() == CounterMode::kUnicodeWord;
  std::vector<ByteSpan> token_spans;
  if (!word_mode) token_spans = counter.Spans(response);
  std::optional<std::size_t> last_counted;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const ByteSpan& span = words[w];
    const std::string lower = text::AsciiLower(response.substr(span.begin, span.size()));
    if (config.reflective_tokens.count(lower) == 0) continue;
    ++result.raw_matches;
    std::size_t ordinal = w;
    if (!word_mode) {
      auto it = std::upper_bound(token_spans.begin(), token_spans.end(), span.begin,
                                 [](std::size_t off, const ByteSpan& t) { return off < t.begin; });
      ordinal = it == token_spans.begin() ? 0 : static_cast<std::size_t>(it - token_spans.begin()) - 1;
    }
    if (last_counted && ordinal - *last_counted <= config.cluster_window_tokens) continue;
    last_counted = ordinal;
    result.positions.push_back(ordinal);
    ++result.instances;
  }
  return result;
}

struct ReflectionStats {
  std::size_t n_token = 0;
  std::size_t n_reflect = 0;
  double density = 0.0;
};

inline ReflectionStats MeasureReflection(const ReasoningTrace& trace, const RewardConfig& config,
                                         const TokenCounter& counter) {
  const std::string full = trace.FullText();
  ReflectionStats stats;
  stats.n_token = counter.Count(full);
  stats.n_reflect = CountReflective(config.reflect_think_only ? std::string_view(trace.think)
                                                              : std::string_view(full),
                                    config, counter)
                        .instances;
  if (stats.n_token > 0) {
    stats.density = static_cast<double>(stats.n_reflect) / static_cast<double>(stats.n_token);
  }
  return stats;
}

inline double ReflectionRewardFromDensity(double density, double density_threshold) {
  if (!(density_threshold > 0.0)) throw DomainError("density threshold must be positive");
  return std::min(0.0, density / density_threshold - 1.0);
}

inline double ReflectionReward(std::string_view response, const RewardConfig& config,
                               const TokenCounter& counter) {
  const std::size_t n_token = counter.Count(response);
  if (n_token == 0) throw DomainError("reflection reward of a zero-token response");
  const std::size_t n_reflect = CountReflective(response, config, counter).instances;
  return ReflectionRewardFromDensity(
      static_cast<double>(n_reflect) / static_cast<double>(n_token), config.density_threshold);
}

// Empirical quantile with linear interpolation between order statistics,
// position q * (n - 1).
inline double CorpusDensityQuantile(std::vector<double> densities, double q) {
  if (densities.empty()) throw DomainError("quantile of an empty list");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile must lie in (0, 1)");
  std::sort(densities.begin(), densities.end());
  const double pos = q * static_cast<double>(densities.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, densities.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return densities[lo] + frac * (densities[hi] - densities[lo]);
}

// ---------------------------------------------------------------------------
// Combination

inline double Combine(int accuracy, double length, double reflection, const RewardWeights& w) {
  return w.accuracy * accuracy + w.length * length + w.reflection * reflection;
}

inline RewardVector MakeRewardVector(int accuracy, double length, double reflection,
                                     const RewardWeights& w) {
  return {accuracy, length, reflection, Combine(accuracy, length, reflection, w)};
}

// Rewards for one group of responses to the same question. `correct[i]` is the
// accuracy of response i; lengths are token counts of the full response.
struct ScoredResponse {
  RewardVector reward;
  ReflectionStats stats;
};

inline std::vector<ScoredResponse> ScoreGroup(const std::vector<const ReasoningTrace*>& group,
                                              const RewardConfig& config,
                                              const TokenCounter& counter) {
  std::vector<ScoredResponse> out(group.size());
  std::vector<LengthSample> lengths(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const ReasoningTrace& t = *group[i];
    out[i].stats = MeasureReflection(t, config, counter);
    const int acc = t.gold_answer ? AccuracyReward(t.answer, *t.gold_answer) : 0;
    out[i].reward.accuracy = acc;
    lengths[i] = {static_cast<double>(out[i].stats.n_token), acc == 1};
  }
  if (group.empty()) return out;
  const auto len = LengthRewards(lengths, config.length_variant);
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double refl = out[i].stats.n_token == 0
                            ? -1.0
                            : ReflectionRewardFromDensity(out[i].stats.density,
                                                          config.density_threshold);
    out[i].reward = MakeRewardVector(out[i].reward.accuracy, len[i], refl, config.weights);
  }
  return out;
}

}  // namespace rea

#endif  // REA_REWARDS_HPP_
