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

// Group assembly for group-relative policy optimization with sequential
// revisions. A group holds G parallel samples for one question plus up to G
// revisions, each revision derived from one original by truncating its
// overthinking tail and forcing a final answer.

#ifndef REA_GRPO_HPP_
#define REA_GRPO_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rea/error.hpp"
#include "rea/rewards.hpp"
#include "rea/trace.hpp"

namespace rea {

inline constexpr double kAdvantageEpsilon = 1e-8;

enum class Origin { kOriginal, kRevision };

enum class DropReason {
  kNone,
  kCorrectToIncorrect,  // revision broke a correct original
  kBothIncorrect,       // neither attempt is correct; shorter is not better
};

inline const char* DropReasonName(DropReason r) {
  switch (r) {
    case DropReason::kNone: return "none";
    case DropReason::kCorrectToIncorrect: return "correct_to_incorrect";
    case DropReason::kBothIncorrect: return "both_incorrect";
  }
  return "none";
}

struct GroupSample {
  ReasoningTrace response;
  Origin origin = Origin::kOriginal;
  std::string parent_id;  // set for revisions
  RewardVector reward;
  std::optional<double> advantage;
  bool dropped = false;
  DropReason drop_reason = DropReason::kNone;

  bool surviving() const { return !dropped; }
};

struct SampleGroup {
  std::string question_id;
  std::vector<GroupSample> samples;
  bool skipped = false;
};

namespace detail {

inline std::map<std::string, std::size_t> IndexOriginals(const SampleGroup& group) {
  std::map<std::string, std::size_t> originals;
  for (std::size_t i = 0; i < group.samples.size(); ++i) {
    if (group.samples[i].origin == Origin::kOriginal) originals[group.samples[i].response.id] = i;
  }
  return originals;
}

}  // namespace detail

// Checks that every revision's parent is an original of the same group.
inline void ValidateGroup(const SampleGroup& group) {
  const auto originals = detail::IndexOriginals(group);
  for (const auto& s : group.samples) {
    if (s.origin == Origin::kRevision && originals.count(s.parent_id) == 0) {
      throw StructuralError("revision " + s.response.id + " in group " + group.question_id +
                            " has no original with id '" + s.parent_id + "'");
    }
  }
}

// Keep rules for each (original, revision) pair:
//   original correct,   revision correct    keep both
//   original incorrect, revision correct    keep both
//   original correct,   revision incorrect  drop revision
//   original incorrect, revision incorrect  drop revision
// Originals are never dropped.
inline SampleGroup ApplyRevisionFilters(SampleGroup group) {
  ValidateGroup(group);
  const auto originals = detail::IndexOriginals(group);
  for (auto& s : group.samples) {
    if (s.origin != Origin::kRevision) continue;
    const bool orig_ok = group.samples[originals.at(s.parent_id)].reward.accuracy == 1;
    const bool rev_ok = s.reward.accuracy == 1;
    if (!rev_ok) {
      s.dropped = true;
      s.drop_reason = orig_ok ? DropReason::kCorrectToIncorrect : DropReason::kBothIncorrect;
    }
  }
  return group;
}

inline SampleGroup SkipIfAllIncorrect(SampleGroup group) {
  bool any_correct = false;
  for (const auto& s : group.samples) {
    if (s.surviving() && s.reward.accuracy == 1) any_correct = true;
  }
  group.skipped = !any_correct;
  if (group.skipped) {
    for (auto& s : group.samples) s.advantage.reset();
  }
  return group;
}

// Standardizes combined rewards over the surviving samples:
// a = (r - mean) / (population std + eps).
inline std::vector<double> StandardizeRewards(const std::vector<double>& rewards) {
  const auto n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / (sd + kAdvantageEpsilon));
  return out;
}

inline SampleGroup GroupAdvantages(SampleGroup group, Warnings* warnings = nullptr) {
  if (group.skipped) return group;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < group.samples.size(); ++i) {
    if (group.samples[i].surviving()) idx.push_back(i);
  }
  if (idx.size() < 2) {
    Warn(warnings, "group " + group.question_id + " has fewer than two surviving samples");
    for (std::size_t i : idx) group.samples[i].advantage = 0.0;
    return group;
  }
  std::vector<double> rewards;
  for (std::size_t i : idx) rewards.push_back(group.samples[i].reward.combined);
  const auto adv = StandardizeRewards(rewards);
  for (std::size_t k = 0; k < idx.size(); ++k) group.samples[idx[k]].advantage = adv[k];
  return group;
}

// Filters, skip check, and advantages in one pass.
inline SampleGroup ProcessGroup(SampleGroup group, Warnings* warnings = nullptr) {
  return GroupAdvantages(SkipIfAllIncorrect(ApplyRevisionFilters(std::move(group))), warnings);
}

// A real number held exactly as the unevaluated sum hi + lo, with hi the
// correctly rounded double value.
struct ExactSum {
  double hi = 0.0;
  double lo = 0.0;

  double value() const { return hi; }
  ExactSum operator-() const { return {-hi, -lo}; }
};

// Knuth's error-free addition: a + b == hi + lo exactly.
inline ExactSum TwoSum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline ExactSum Halve(ExactSum x) { return {x.hi / 2.0, x.lo / 2.0}; }

// Rewrites a kept pair's advantages as a shared term over all tokens plus a
// partial term that is negative on the removed overthinking tokens and
// positive on the revised tokens:
//   shared = (a_rev + a_orig) / 2, overthink = -(a_rev - a_orig) / 2,
//   revised = (a_rev - a_orig) / 2.
// Components are exact, so shared + overthink == a_orig and
// shared + revised == a_rev hold without rounding error.
struct PartialReward {
  ExactSum shared;
  ExactSum overthink;
  ExactSum revised;
};

inline PartialReward DecomposePair(double a_orig, double a_rev) {
  PartialReward p;
  p.shared = Halve(TwoSum(a_rev, a_orig));
  p.revised = Halve(TwoSum(a_rev, -a_orig));
  p.overthink = -p.revised;
  return p;
}

// x + y rounded to double; recovers a_orig from (shared, overthink) and a_rev
// from (shared, revised).
inline double Recombine(ExactSum x, ExactSum y) {
  const ExactSum head = TwoSum(x.hi, y.hi);
  return head.hi + (head.lo + (x.lo + y.lo));
}

struct SegmentSpans {
  ByteSpan shared;
  std::optional<ByteSpan> overthink;
  std::optional<ByteSpan> revised;
};

inline std::size_t CommonPrefixLength(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

struct BatchRecord {
  std::string qid;
  std::string id;
  std::string text;
  Origin origin = Origin::kOriginal;
  std::string parent;
  RewardVector rewards;
  std::optional<double> advantage;
  SegmentSpans spans;
  bool dropped = false;
  DropReason drop_reason = DropReason::kNone;
};

// One record per surviving sample of each non-skipped group, in group order.
// With `include_dropped`, dropped revisions are also emitted (for audit logs)
// with their drop reason and no advantage.
inline std::vector<BatchRecord> AssembleTrainingBatch(const std::vector<SampleGroup>& groups,
                                                      bool include_dropped = false) {
  std::vector<BatchRecord> out;
  for (const auto& g : groups) {
    if (g.skipped && !include_dropped) continue;
    // Kept revision per original id, for the overthink span.
    std::map<std::string, const GroupSample*> kept_revision;
    for (const auto& s : g.samples) {
      if (s.origin == Origin::kRevision && s.surviving()) kept_revision[s.parent_id] = &s;
    }
    std::map<std::string, const GroupSample*> originals;
    for (const auto& s : g.samples) {
      if (s.origin == Origin::kOriginal) originals[s.response.id] = &s;
    }
    for (const auto& s : g.samples) {
      if (s.dropped && !include_dropped) continue;
      if (g.skipped && !s.dropped) continue;
      BatchRecord r;
      r.qid = g.question_id;
      r.id = s.response.id;
      r.text = s.response.FullText();
      r.origin = s.origin;
      r.parent = s.parent_id;
      r.rewards = s.reward;
      r.advantage = s.dropped || g.skipped ? std::nullopt : s.advantage;
      r.dropped = s.dropped;
      r.drop_reason = s.drop_reason;
      r.spans.shared = {0, r.text.size()};
      const GroupSample* partner = nullptr;
      if (s.origin == Origin::kOriginal) {
        if (auto it = kept_revision.find(s.response.id); it != kept_revision.end()) partner = it->second;
      } else if (auto it = originals.find(s.parent_id); it != originals.end()) {
        partner = it->second;
      }
      if (partner != nullptr && !s.dropped) {
        const std::string other = partner->response.FullText();
        const std::size_t lcp = CommonPrefixLength(r.text, other);
        r.spans.shared = {0, lcp};
        if (s.origin == Origin::kOriginal) {
          r.spans.overthink = ByteSpan{lcp, r.text.size()};
        } else {
          r.spans.revised = ByteSpan{lcp, r.text.size()};
        }
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace rea

#endif  // REA_GRPO_HPP_
