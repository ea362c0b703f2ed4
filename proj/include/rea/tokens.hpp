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

// Approximate tokenization. Three counting modes are supported:
//
//   unicode-word  Maximal runs of word characters (ASCII alphanumerics, '_',
//                 and any non-ASCII code point) are one token each; every other
//                 non-space character is a token of its own.
//   chars-div-4   ceil(code points / 4).
//   vocabulary    Greedy longest-match against an external vocabulary file
//                 (one entry per line), applied within each unicode-word
//                 token. Characters not covered by the vocabulary become
//                 single-code-point tokens.
//
// All modes expose byte spans so that positions in the text can be mapped to
// token ordinals.

#ifndef REA_TOKENS_HPP_
#define REA_TOKENS_HPP_

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rea/error.hpp"

namespace rea {

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

namespace text {

inline bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c == '_' || c >= 0x80;
}

// Length of the UTF-8 sequence starting with `lead`. Malformed lead bytes are
// treated as one-byte sequences.
inline std::size_t Utf8Length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

inline std::size_t CountCodePoints(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

inline std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string_view Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && IsAsciiSpace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && IsAsciiSpace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string_view TrimRight(std::string_view s) {
  std::size_t e = s.size();
  while (e > 0 && IsAsciiSpace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(0, e);
}

// Word runs and single punctuation characters, in order.
inline std::vector<ByteSpan> WordSpans(std::string_view s) {
  std::vector<ByteSpan> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (IsAsciiSpace(c)) {
      ++i;
    } else if (IsWordByte(c)) {
      std::size_t j = i;
      while (j < s.size() && IsWordByte(static_cast<unsigned char>(s[j]))) ++j;
      spans.push_back({i, j});
      i = j;
    } else {
      spans.push_back({i, i + 1});
      ++i;
    }
  }
  return spans;
}

}  // namespace text

enum class CounterMode { kUnicodeWord, kCharsDiv4, kVocabulary };

// Deterministic token counter. Cheap to copy; the vocabulary, when loaded, is
// shared between copies.
class TokenCounter {
 public:
  TokenCounter() = default;
  explicit TokenCounter(CounterMode mode) : mode_(mode) {
    if (mode == CounterMode::kVocabulary) {
      throw ConfigurationError("vocabulary counter requires a vocabulary file");
    }
  }

  static TokenCounter UnicodeWord() { return TokenCounter(CounterMode::kUnicodeWord); }
  static TokenCounter CharsDiv4() { return TokenCounter(CounterMode::kCharsDiv4); }

  static TokenCounter FromVocabulary(std::vector<std::string> entries) {
    TokenCounter counter;
    counter.mode_ = CounterMode::kVocabulary;
    auto vocab = std::make_shared<Vocabulary>();
    for (auto& e : entries) {
      if (e.empty()) continue;
      vocab->max_entry = std::max(vocab->max_entry, e.size());
      vocab->entries.insert(std::move(e));
    }
    counter.vocab_ = std::move(vocab);
    return counter;
  }

  static TokenCounter FromVocabularyFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read vocabulary file: " + path);
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      entries.push_back(line);
    }
    return FromVocabulary(std::move(entries));
  }

  // Accepts "unicode-word", "chars-div-4", or "vocab:<path>".
  static TokenCounter Parse(std::string_view spec) {
    if (spec == "unicode-word") return UnicodeWord();
    if (spec == "chars-div-4") return CharsDiv4();
    if (spec.starts_with("vocab:")) return FromVocabularyFile(std::string(spec.substr(6)));
    throw ConfigurationError("unknown token counter: " + std::string(spec));
  }

  CounterMode mode() const { return mode_; }

  // Byte spans of each token in `s`. For chars-div-4 each span covers four
  // code points (the last may be shorter).
  std::vector<ByteSpan> Spans(std::string_view s) const {
    switch (mode_) {
      case CounterMode::kUnicodeWord:
        return text::WordSpans(s);
      case CounterMode::kCharsDiv4:
        return QuadSpans(s);
      case CounterMode::kVocabulary:
        return VocabSpans(s);
    }
    return {};
  }

  std::size_t Count(std::string_view s) const {
    if (s.empty()) return 0;
    if (mode_ == CounterMode::kCharsDiv4) return (text::CountCodePoints(s) + 3) / 4;
    return Spans(s).size();
  }

 private:
  struct Vocabulary {
    std::unordered_set<std::string> entries;
    std::size_t max_entry = 0;
  };

  static std::vector<ByteSpan> QuadSpans(std::string_view s) {
    std::vector<ByteSpan> spans;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t j = i;
      for (int k = 0; k < 4 && j < s.size(); ++k) {
        j += std::min(text::Utf8Length(static_cast<unsigned char>(s[j])), s.size() - j);
      }
      spans.push_back({i, j});
      i = j;
    }
    return spans;
  }

  std::vector<ByteSpan> VocabSpans(std::string_view s) const {
    std::vector<ByteSpan> spans;
    for (const ByteSpan& word : text::WordSpans(s)) {
      std::size_t i = word.begin;
      while (i < word.end) {
        std::size_t best = 0;
        const std::size_t limit = std::min(vocab_->max_entry, word.end - i);
        for (std::size_t len = limit; len > 0; --len) {
          if (vocab_->entries.count(std::string(s.substr(i, len))) != 0) {
            best = len;
            break;
          }
        }
        if (best == 0) {
          best = std::min(text::Utf8Length(static_cast<unsigned char>(s[i])), word.end - i);
        }
        spans.push_back({i, i + best});
        i += best;
      }
    }
    return spans;
  }

  CounterMode mode_ = CounterMode::kUnicodeWord;
  std::shared_ptr<const Vocabulary> vocab_;
};

inline std::size_t CountTokens(std::string_view s, const TokenCounter& counter) {
  return counter.Count(s);
}

}  // namespace rea

#endif  // REA_TOKENS_HPP_
