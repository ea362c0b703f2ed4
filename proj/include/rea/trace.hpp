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

#ifndef REA_TRACE_HPP_
#define REA_TRACE_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rea/error.hpp"
#include "rea/tokens.hpp"

namespace rea {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";

struct SamplingMeta {
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> budget;
};

// One generation split at the think delimiters.
struct ReasoningTrace {
  std::string id;
  std::string question;
  std::optional<std::string> gold_answer;
  std::string think;
  std::string answer;
  std::optional<SamplingMeta> sampling_meta;
  // Free-form string metadata carried through the pipeline (dataset, qid,
  // origin, parent, ...).
  std::map<std::string, std::string> tags;

  std::string FullText() const {
    std::string out;
    out.reserve(kThinkOpen.size() + think.size() + kThinkClose.size() + answer.size());
    out.append(kThinkOpen).append(think).append(kThinkClose).append(answer);
    return out;
  }
};

// Splits a raw generation on the first "<think>" / "</think>" pair. A missing
// opener is tolerated (many chat templates inject it into the prompt); a
// missing closer means the whole remainder is think text and the answer is
// empty, which is what a budget-truncated generation looks like.
inline void SplitGeneration(std::string_view generation, std::string& think, std::string& answer) {
  std::string_view rest = generation;
  if (auto open = rest.find(kThinkOpen); open != std::string_view::npos) {
    rest.remove_prefix(open + kThinkOpen.size());
  }
  if (auto close = rest.find(kThinkClose); close != std::string_view::npos) {
    think.assign(rest.substr(0, close));
    answer.assign(rest.substr(close + kThinkClose.size()));
  } else {
    think.assign(rest);
    answer.clear();
  }
}

struct Chunk {
  std::size_t index = 0;
  std::string text;
  std::size_t token_count = 0;
  ByteSpan byte_span;
};

struct SegmentOptions {
  std::size_t max_chunk_tokens = 128;
  // A chunk is closed once its right-trimmed text ends with one of these.
  std::vector<std::string> terminators = {".", "!", "?", ":", "\\].", "$$."};
};

namespace detail {

inline bool EndsWithTerminator(std::string_view s, const std::vector<std::string>& terminators) {
  const std::string_view t = text::TrimRight(s);
  for (const auto& term : terminators) {
    if (!term.empty() && t.ends_with(term)) return true;
  }
  return false;
}

// Length of a blank-line separator starting at `i`: a newline, then one or more
// further newlines, each optionally preceded by spaces or tabs. Returns 0 if
// there is no separator at `i`.
inline std::size_t SeparatorLength(std::string_view s, std::size_t i) {
  if (s[i] != '\n') return 0;
  std::size_t j = i + 1;
  std::size_t newlines = 1;
  std::size_t end = 0;
  while (j < s.size()) {
    std::size_t k = j;
    while (k < s.size() && (s[k] == ' ' || s[k] == '\t' || s[k] == '\r')) ++k;
    if (k < s.size() && s[k] == '\n') {
      ++newlines;
      j = k + 1;
      end = j;
    } else {
      break;
    }
  }
  return newlines >= 2 ? end - i : 0;
}

}  // namespace detail

// Fragments between blank-line separators, as byte spans into `s`.
inline std::vector<ByteSpan> SplitBlankLines(std::string_view s) {
  std::vector<ByteSpan> fragments;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t sep = detail::SeparatorLength(s, i);
    if (sep > 0) {
      fragments.push_back({start, i});
      i += sep;
      start = i;
    } else {
      ++i;
    }
  }
  fragments.push_back({start, s.size()});
  return fragments;
}

// Splits the think part into chunks. Fragments are merged left to right until
// the accumulated chunk ends with a terminator or exceeds
// `max_chunk_tokens`. The trailing chunk is closed at end of input whatever
// its ending.
inline std::vector<Chunk> SegmentThink(const ReasoningTrace& trace, const TokenCounter& counter,
                                       const SegmentOptions& options = {}) {
  const std::string_view think = trace.think;
  if (text::Trim(think).empty()) {
    throw EmptyInputError("trace " + trace.id + " has an empty think part");
  }
  std::vector<Chunk> chunks;
  const auto fragments = SplitBlankLines(think);
  std::size_t open_begin = 0;
  bool open = false;
  auto close = [&](std::size_t end) {
    Chunk c;
    c.index = chunks.size();
    c.byte_span = {open_begin, end};
    c.text.assign(think.substr(open_begin, end - open_begin));
    c.token_count = counter.Count(c.text);
    chunks.push_back(std::move(c));
    open = false;
  };
  for (const ByteSpan& f : fragments) {
    if (!open) {
      open_begin = f.begin;
      open = true;
    }
    const std::string_view acc = think.substr(open_begin, f.end - open_begin);
    if (detail::EndsWithTerminator(acc, options.terminators) ||
        counter.Count(acc) > options.max_chunk_tokens) {
      close(f.end);
    }
  }
  // A whitespace-only tail after the last closed chunk stays a separator.
  if (open && !(chunks.size() > 0 && text::Trim(think.substr(open_begin)).empty())) {
    close(think.size());
  }
  return chunks;
}

// Greedy contiguous batches whose token sums stay within `max_total_tokens`.
// A chunk that alone exceeds the cap becomes a singleton batch.
inline std::vector<std::vector<std::size_t>> BatchChunks(const std::vector<Chunk>& chunks,
                                                         std::size_t max_total_tokens = 1000) {
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::size_t> current;
  std::size_t total = 0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const std::size_t t = chunks[i].token_count;
    if (!current.empty() && total + t > max_total_tokens) {
      batches.push_back(std::move(current));
      current.clear();
      total = 0;
    }
    current.push_back(i);
    total += t;
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

}  // namespace rea

#endif  // REA_TRACE_HPP_
