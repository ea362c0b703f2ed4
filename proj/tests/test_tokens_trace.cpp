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

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rea/trace.hpp"
#include "tests/corpus.hpp"

namespace rea {
namespace {

TEST(TokenCounter, Examples) {
  const auto word = TokenCounter::UnicodeWord();
  EXPECT_EQ(word.Count(""), 0u);
  EXPECT_EQ(word.Count("hello world"), 2u);
  EXPECT_EQ(TokenCounter::CharsDiv4().Count(std::string(400, 'x')), 100u);
  EXPECT_EQ(TokenCounter::CharsDiv4().Count(""), 0u);
  EXPECT_EQ(word.Count("Wait, let's see: 3+4=7."), 13u);
}

TEST(TokenCounter, CharsDiv4CountsCodePoints) {
  // 4 two-byte code points and 1 three-byte code point.
  EXPECT_EQ(TokenCounter::CharsDiv4().Count("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xe2\x82\xac"), 2u);
}

TEST(TokenCounter, VocabularyFile) {
  const auto path = std::filesystem::temp_directory_path() / "rea_vocab_test.txt";
  {
    std::ofstream out(path);
    out << "hel\nhello\nwor\nld\n";
  }
  const auto v = TokenCounter::Parse("vocab:" + path.string());
  EXPECT_EQ(v.Count("hello world"), 3u);  // hello | wor | ld
  EXPECT_EQ(v.Count("xyz"), 3u);          // unknown bytes fall back to single characters
  std::filesystem::remove(path);
  EXPECT_THROW(TokenCounter::FromVocabularyFile("/nonexistent/vocab.txt"), ConfigurationError);
  EXPECT_THROW(TokenCounter::Parse("bpe"), ConfigurationError);
}

TEST(TokenCounter, MonotoneAndNearlyAdditive) {
  std::mt19937_64 rng(11);
  for (const auto& counter : {TokenCounter::UnicodeWord(), TokenCounter::CharsDiv4()}) {
    for (int i = 0; i < 500; ++i) {
      const std::string a = testing_corpus::RandomText(rng, 1 + rng() % 40);
      const std::string b = testing_corpus::RandomText(rng, 1 + rng() % 40);
      const std::size_t ca = counter.Count(a), cb = counter.Count(b), cab = counter.Count(a + b);
      EXPECT_GE(cab, ca);
      EXPECT_LE(cab, ca + cb + 1);
      EXPECT_GE(cab + 1, ca + cb);
      EXPECT_EQ(counter.Count(a), ca);
    }
  }
}

TEST(ReasoningTrace, FullTextCostsConstantDelimiterTokens) {
  const auto counter = TokenCounter::UnicodeWord();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    ReasoningTrace t;
    t.think = testing_corpus::RandomText(rng, rng() % 50);
    t.answer = testing_corpus::RandomText(rng, rng() % 10);
    EXPECT_EQ(counter.Count(t.FullText()), counter.Count(t.think) + counter.Count(t.answer) + 7);
    std::string think, answer;
    SplitGeneration(t.FullText(), think, answer);
    EXPECT_EQ(think, t.think);
    EXPECT_EQ(answer, t.answer);
  }
}

TEST(SplitGeneration, MissingDelimiters) {
  std::string think, answer;
  SplitGeneration("reasoning</think>The answer is 4.", think, answer);
  EXPECT_EQ(think, "reasoning");
  EXPECT_EQ(answer, "The answer is 4.");
  SplitGeneration("<think>cut off mid", think, answer);
  EXPECT_EQ(think, "cut off mid");
  EXPECT_EQ(answer, "");
}

ReasoningTrace Think(std::string think) {
  ReasoningTrace t;
  t.id = "t";
  t.think = std::move(think);
  return t;
}

std::vector<std::string> Texts(const std::vector<Chunk>& chunks) {
  std::vector<std::string> out;
  for (const auto& c : chunks) out.push_back(c.text);
  return out;
}

TEST(SegmentThink, Examples) {
  const auto counter = TokenCounter::UnicodeWord();
  EXPECT_EQ(Texts(SegmentThink(Think("Hello.\n\nWorld."), counter)),
            (std::vector<std::string>{"Hello.", "World."}));
  EXPECT_EQ(Texts(SegmentThink(Think("Step 1\n\ndone."), counter)),
            (std::vector<std::string>{"Step 1\n\ndone."}));
  std::string long_fragment;
  for (int i = 0; i < 130; ++i) long_fragment += "w" + std::to_string(i) + " ";
  const auto chunks = SegmentThink(Think(long_fragment + "\n\nok."), counter);
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].token_count, 130u);
  EXPECT_EQ(chunks[1].text, "ok.");
}

TEST(SegmentThink, SeparatorForms) {
  const auto counter = TokenCounter::UnicodeWord();
  EXPECT_EQ(Texts(SegmentThink(Think("A.\n \n\nB.\n\t\nC:"), counter)),
            (std::vector<std::string>{"A.", "B.", "C:"}));
  // A single newline is not a separator.
  EXPECT_EQ(SegmentThink(Think("A.\nB."), counter).size(), 1u);
  EXPECT_EQ(Texts(SegmentThink(Think("so \\[x=1\\].\n\nnext"), counter)),
            (std::vector<std::string>{"so \\[x=1\\].", "next"}));
  // Trailing separator stays outside the last chunk.
  EXPECT_EQ(Texts(SegmentThink(Think("A.\n\nB.\n\n"), counter)), (std::vector<std::string>{"A.", "B."}));
}

TEST(SegmentThink, EmptyThinkIsAnError) {
  EXPECT_THROW(SegmentThink(Think(""), TokenCounter()), EmptyInputError);
  EXPECT_THROW(SegmentThink(Think(" \n\n \n"), TokenCounter()), EmptyInputError);
}

// Fuzz over randomized multi-paragraph texts.
TEST(SegmentThink, FuzzInvariants) {
  std::mt19937_64 rng(2026);
  const SegmentOptions options;
  for (const auto& counter : {TokenCounter::UnicodeWord(), TokenCounter::CharsDiv4()}) {
    for (int n = 0; n < 500; ++n) {
      const ReasoningTrace t = Think(testing_corpus::RandomThink(rng));
      const auto chunks = SegmentThink(t, counter, options);
      const auto failure = testing_corpus::CheckChunks(t.think, chunks, counter, options);
      ASSERT_EQ(failure, "") << "trace " << n << ": " << testing_corpus::Escape(t.think);
    }
  }
}

TEST(BatchChunks, Examples) {
  auto make = [](std::vector<std::size_t> counts) {
    std::vector<Chunk> chunks;
    for (std::size_t i = 0; i < counts.size(); ++i) chunks.push_back({i, "", counts[i], {}});
    return chunks;
  };
  using Batches = std::vector<std::vector<std::size_t>>;
  EXPECT_EQ(BatchChunks(make({400, 400, 400}), 1000), (Batches{{0, 1}, {2}}));
  EXPECT_EQ(BatchChunks(make({1200}), 1000), (Batches{{0}}));
  EXPECT_EQ(BatchChunks(make({}), 1000), Batches{});
  EXPECT_EQ(BatchChunks(make({10, 1200, 10}), 1000), (Batches{{0}, {1}, {2}}));
  EXPECT_EQ(BatchChunks(make({500, 500, 1}), 1000), (Batches{{0, 1}, {2}}));
}

TEST(BatchChunks, FuzzNeverReordersOrDrops) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 1000; ++n) {
    std::vector<Chunk> chunks;
    const std::size_t k = rng() % 30;
    for (std::size_t i = 0; i < k; ++i) chunks.push_back({i, "", rng() % 5 == 0 ? 900 + rng() % 400 : rng() % 300, {}});
    const auto failure = testing_corpus::CheckBatches(chunks, BatchChunks(chunks, 1000), 1000);
    ASSERT_EQ(failure, "");
  }
}

}  // namespace
}  // namespace rea
