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

#include <cmath>

#include <gtest/gtest.h>

#include "rea/answer.hpp"
#include "rea/sim.hpp"
#include "tests/corpus.hpp"

namespace rea::sim {
namespace {

TEST(Rng, DeterministicAndNormalMoments) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.Normal(), b.Normal());
  Rng r(11);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = r.Normal();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(GenerateTasks, Examples) {
  const auto t = GenerateTasks(7, 10);
  ASSERT_EQ(t.size(), 10u);
  int easy = 0;
  for (const auto& task : t) {
    if (task.kind == Difficulty::kEasy) {
      ++easy;
      EXPECT_GE(task.difficulty, 0.0);
      EXPECT_LE(task.difficulty, 0.3);
    } else {
      EXPECT_GE(task.difficulty, 0.7);
      EXPECT_LE(task.difficulty, 1.0);
    }
    EXPECT_EQ(task.gold_answer, TaskGold(task.id));
  }
  EXPECT_EQ(easy, 5);
  const auto again = GenerateTasks(7, 10);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i].id, again[i].id);
  const auto one = GenerateTasks(3, 1, {1.0, 0.0});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].kind, Difficulty::kEasy);
  EXPECT_THROW(GenerateTasks(1, 0), DomainError);
  EXPECT_EQ(GenerateTasks(9, 7).size(), 7u);
}

TEST(Apportion, SumsToN) {
  for (std::size_t n = 1; n < 50; ++n) {
    const auto c = Apportion(n, {0.3, 0.7});
    EXPECT_EQ(c[0] + c[1], n);
    EXPECT_LE(std::fabs(static_cast<double>(c[0]) - 0.3 * static_cast<double>(n)), 1.0);
  }
}

TEST(SampleTrace, ZeroReflectRateEarnsMinimumReflectionReward) {
  SimPolicyParams p;
  p.reflect_rate = 0.0;
  Rng rng(1);
  RewardConfig rc;
  const TokenCounter counter;
  for (const auto& task : GenerateTasks(2, 20)) {
    const auto s = SampleTrace(p, task, rng);
    EXPECT_EQ(s.body_reflections, 0u);
    EXPECT_EQ(ReflectionReward(s.trace.FullText(), rc, counter), -1.0);
  }
}

TEST(SampleTrace, ZeroOverthinkEndsAtAnswerStatement) {
  SimPolicyParams p;
  p.overthink_factor = 0.0;
  Rng rng(4);
  for (const auto& task : GenerateTasks(5, 20)) {
    const auto s = SampleTrace(p, task, rng);
    EXPECT_EQ(s.tail_tokens, 0u);
    const std::string& th = s.trace.think;
    const auto last = th.rfind("So the answer is ");
    ASSERT_NE(last, std::string::npos);
    EXPECT_EQ(th.find('\n', last), th.size() - 1);
    EXPECT_EQ(s.trace.answer.find("**Final Answer:** \\boxed{"), 2u);
  }
}

TEST(SampleTrace, BudgetTruncationLosesAnswer) {
  SimPolicyParams p;
  p.mean_reason_tokens = 3000;
  SimConfig cfg;
  cfg.token_budget = 500;
  Rng rng(6);
  const TokenCounter counter;
  const auto s = SampleTrace(p, GenerateTasks(1, 1)[0], rng, cfg);
  EXPECT_TRUE(s.truncated);
  EXPECT_FALSE(s.correct);
  EXPECT_TRUE(s.trace.answer.empty());
  EXPECT_LE(counter.Count(s.trace.think), 500u);
}

TEST(SampleTrace, CorrectnessMatchesExtractedAnswer) {
  Rng rng(8);
  const TokenCounter counter;
  SegmentOptions seg;
  for (const auto& task : GenerateTasks(8, 300)) {
    SimPolicyParams p;
    p.mean_reason_tokens = 100 + 900 * rng.Uniform();
    p.reflect_rate = 0.5 * rng.Uniform();
    p.overthink_factor = 1.5 * rng.Uniform();
    const auto s = SampleTrace(p, task, rng);
    ASSERT_EQ(s.correct, AccuracyReward(s.trace.answer, *s.trace.gold_answer) == 1);
    const auto chunks = SegmentThink(s.trace, counter, seg);
    ASSERT_EQ(testing_corpus::CheckChunks(s.trace.think, chunks, counter, seg), "");
    if (s.first_correct_end) {
      const auto& th = s.trace.think;
      const std::string stmt = std::to_string(task.gold_answer) + ".";
      ASSERT_EQ(th.compare(*s.first_correct_end - stmt.size(), stmt.size(), stmt), 0);
    }
    const auto rev = ReviseSample(s);
    ASSERT_EQ(rev.has_value(), s.first_correct_end.has_value());
    if (rev) {
      ASSERT_TRUE(s.trace.think.starts_with(rev->trace.think));
      ASSERT_EQ(AccuracyReward(rev->trace.answer, *s.trace.gold_answer), 1);
      ASSERT_LE(counter.Count(rev->trace.FullText()), counter.Count(s.trace.FullText()) + 8);
    }
  }
}

TEST(PolicyUpdate, Examples) {
  const SimPolicyParams p;
  const auto same = PolicyUpdate(p, {{{1.0, -2.0, 0.5}, 0.0}, {{0.3, 0.3, 0.3}, 0.0}}, 0.6);
  EXPECT_EQ(same.mean_reason_tokens, p.mean_reason_tokens);
  EXPECT_EQ(same.reflect_rate, p.reflect_rate);
  EXPECT_EQ(same.overthink_factor, p.overthink_factor);
  const auto frozen = PolicyUpdate(p, {{{1.0, 1.0, 1.0}, 1.0}}, 0.0);
  EXPECT_EQ(frozen.mean_reason_tokens, p.mean_reason_tokens);
  // The shorter sample scored higher, so the mean length moves down.
  const auto shorter = PolicyUpdate(p, {{{-1.0, 0.0, 0.0}, 1.0}, {{1.0, 0.0, 0.0}, -1.0}}, 0.6);
  EXPECT_LT(shorter.mean_reason_tokens, p.mean_reason_tokens);
  EXPECT_NEAR(shorter.mean_reason_tokens, 600.0 * std::exp(-0.6 * 0.1), 1e-9);
  EXPECT_EQ(shorter.reflect_rate, p.reflect_rate);
  Warnings w;
  const auto rejected = PolicyUpdate(p, {{{NAN, 0.0, 0.0}, 1.0}}, 0.6, {}, &w);
  EXPECT_EQ(rejected.mean_reason_tokens, p.mean_reason_tokens);
  EXPECT_EQ(w.size(), 1u);
  EXPECT_THROW(PolicyUpdate(p, {}, 0.6), DomainError);
  const auto clamped = PolicyUpdate(p, {{{0.0, -100.0, 0.0}, 1.0}}, 1.0);
  EXPECT_EQ(clamped.reflect_rate, 0.0);
}

TEST(Variant, ParseAndName) {
  EXPECT_EQ(Variant::Parse("acc").Name(), "acc");
  EXPECT_EQ(Variant::Parse("rlen+reflect+rev").Name(), "acc+rlen+reflect+rev");
  EXPECT_EQ(Variant::Parse("len").length_kind, LengthVariant::kKimi);
  EXPECT_TRUE(Variant::Parse("reflect").reflect);
  EXPECT_THROW(Variant::Parse("rlen+magic"), ConfigurationError);
  EXPECT_THROW(Variant::Parse("rlen+"), ConfigurationError);
}

TEST(RunExperiment, SeededDeterminism) {
  ExperimentConfig cfg;
  cfg.variant = Variant::Parse("rlen+reflect+rev");
  cfg.steps = 5;
  cfg.eval_tasks = 20;
  cfg.seed = 3;
  const auto a = RunExperiment(cfg);
  const auto b = RunExperiment(cfg);
  EXPECT_EQ(TrajectoryCsv(a) + SummaryLine(a), TrajectoryCsv(b) + SummaryLine(b));
  EXPECT_EQ(a.steps.size(), 5u);
  EXPECT_GT(a.dq, 0.0);
  cfg.seed = 4;
  EXPECT_NE(TrajectoryCsv(RunExperiment(cfg)), TrajectoryCsv(a));
  cfg.steps = 0;
  EXPECT_THROW(RunExperiment(cfg), DomainError);
}

TEST(Output, CsvAndSvgShape) {
  ExperimentConfig cfg;
  cfg.steps = 3;
  cfg.eval_tasks = 10;
  const auto t = RunExperiment(cfg);
  const std::string csv = TrajectoryCsv(t);
  EXPECT_TRUE(csv.starts_with(TrajectoryCsvHeader()));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  const std::string svg = TrajectorySvg(t);
  EXPECT_TRUE(svg.starts_with("<svg"));
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace rea::sim
