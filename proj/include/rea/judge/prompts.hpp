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

// Judge prompt templates and lenient reply parsers.
//
// Stage 1 labels every chunk of a batch as Reasoning / Right Result /
// Wrong Result. Stage 2 re-asks, one chunk at a time, whether the answer has
// been given. The reflection-model format is the compact "[i]. Think/Result"
// variant used for supervised fine-tuning.

#ifndef REA_JUDGE_PROMPTS_HPP_
#define REA_JUDGE_PROMPTS_HPP_

#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "rea/error.hpp"
#include "rea/judge/chat.hpp"
#include "rea/tokens.hpp"
#include "rea/trace.hpp"

namespace rea::judge {

enum class Stage1Label { kReasoning, kRightResult, kWrongResult };

inline const char* Stage1LabelName(Stage1Label l) {
  switch (l) {
    case Stage1Label::kReasoning: return "Reasoning";
    case Stage1Label::kRightResult: return "Right Result";
    case Stage1Label::kWrongResult: return "Wrong Result";
  }
  return "Reasoning";
}

inline Stage1Label ParseStage1LabelName(std::string_view s) {
  const std::string l = text::AsciiLower(s);
  if (l == "reasoning") return Stage1Label::kReasoning;
  if (l == "right result" || l == "rightresult") return Stage1Label::kRightResult;
  if (l == "wrong result" || l == "wrongresult") return Stage1Label::kWrongResult;
  throw ParseError("unknown stage-1 label: " + std::string(s));
}

namespace detail {

inline void ReplaceAll(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t p = 0; (p = s.find(from, p)) != std::string::npos; p += to.size()) {
    s.replace(p, from.size(), to);
  }
}

inline std::string NumberedChunks(const std::vector<const Chunk*>& chunks) {
  std::string out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (i > 0) out += "\n";
    out += "[" + std::to_string(i + 1) + "]. " + chunks[i]->text;
  }
  return out;
}

inline constexpr std::string_view kStage1WithGold =
    "**Question:** {Question}\n"
    "**Gold Answer:** {Answer}\n"
    "**Response:** {Response}\n"
    "You are provided with a math Question, a Gold Answer and a model-generated Response. "
    "The response is divided into {N} parts. For each part, analyze it and classify it based "
    "on its relationship to the provided context. For each part, assign one of the following "
    "labels:\n"
    "    - Reasoning: The part represents the reasoning process that leads to the answer.\n"
    "    - Right Result: The part is the answer provided by the model, where the model may "
    "provide the answer in the middle of its response, and the answer aligns with the Gold "
    "Answer.\n"
    "    - Wrong Result: Same as Right Result, but the answer does not align with the Gold "
    "Answer.\n"
    "For each of the {N} parts, please reply in format:\n"
    "[1]. Think: [Explanation for label choice]\n"
    "Label: Reasoning/Right Result/Wrong Result\n"
    "[2]. Think: [Explanation for label choice]\n"
    "Label: Reasoning/Right Result/Wrong Result\n"
    "...";

inline constexpr std::string_view kStage1WithoutGold =
    "**Question:** {Question}\n"
    "**Response:** {Response}\n"
    "You are provided with a math Question and a model-generated Response. The response is "
    "divided into {N} parts. For each part, analyze it and classify it based on its "
    "relationship to the provided context. For each part, assign one of the following "
    "labels:\n"
    "    - Reasoning: The part represents the reasoning process that leads to the answer.\n"
    "    - Right Result: The part is the answer provided by the model, where the model may "
    "provide the answer in the middle of its response, and the answer align with the Gold "
    "Answer.\n"
    "    - Wrong Result: Same as Right Result, but the answer do not align with the Gold "
    "Answer.\n"
    "For each of the {N} parts, please reply in format:\n"
    "[1]. Think: [Explanation for label choice]\n"
    "Label: Reasoning/Right Result/Wrong Result\n"
    "[2]. Think: [Explanation for label choice]\n"
    "Label: Reasoning/Right Result/Wrong Result\n"
    "...";

inline constexpr std::string_view kStage2WithGold =
    "**Question:** {Question}\n"
    "**Gold Answer:** {Answer}\n"
    "**Response:** {Response}\n"
    "Evaluate whether the model correctly answered the question. As long as the model "
    "provides the correct result, it counts as correct, regardless of format or wording. The "
    "response I provided is part of the complete response, so there's no need to include the "
    "entire reasoning process. Please judge only if the model has provided the correct answer "
    "up to this point. Please reason step by step first after \"Reasoning:\", then answer only "
    "with Yes or No after \"Answer:\".";

inline constexpr std::string_view kStage2WithoutGold =
    "**Question:** {Question}\n"
    "**Response:** {Response}\n"
    "Evaluate whether the model has already answered the question. The response I provided is "
    "part of the complete response, so there's no need to include the entire reasoning "
    "process. Please judge only if the model has provided the answer up to this point. Please "
    "reason step by step first after \"Reasoning:\", then answer only with Yes or No after "
    "\"Answer:\".";

inline constexpr std::string_view kReflectionSft =
    "**Question:** {Question}\n"
    "**Response:** {Response}\n"
    "You are provided with a math Question and a model-generated Response. The response is "
    "divided into {N} parts. For each part, analyze it and classify it based on its "
    "relationship to the provided context. For each part, assign one of the following "
    "labels:\n"
    "    - Think: The part represents the reasoning process that leads to the answer.\n"
    "    - Result: The part is the answer provided by the model, where the model may provide "
    "the answer in the middle of its response.\n"
    "For each of the {N} parts, please reply in format:\n"
    "[1]. Think/Result\n"
    "[2]. Think/Result\n"
    "...";

// Substitutes placeholders in a single pass so that text inside the inserted
// values is never re-expanded.
inline std::string Fill(std::string_view tmpl, std::string_view question,
                        const std::optional<std::string>& gold, std::string_view response,
                        std::size_t n) {
  std::string out;
  out.reserve(tmpl.size() + question.size() + response.size() + 64);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      const std::string_view name = tmpl.substr(i + 1, close - i - 1);
      if (name == "Question") {
        out.append(question);
      } else if (name == "Answer") {
        out.append(gold.value_or(""));
      } else if (name == "Response") {
        out.append(response);
      } else if (name == "N") {
        out.append(std::to_string(n));
      } else {
        out.append(tmpl.substr(i, close - i + 1));
      }
      i = close + 1;
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

}  // namespace detail

inline std::string RenderStage1Prompt(std::string_view question,
                                      const std::vector<const Chunk*>& chunks,
                                      const std::optional<std::string>& gold_answer) {
  if (chunks.empty()) throw EmptyInputError("stage-1 prompt needs at least one chunk");
  const auto tmpl = gold_answer ? detail::kStage1WithGold : detail::kStage1WithoutGold;
  return detail::Fill(tmpl, question, gold_answer, detail::NumberedChunks(chunks), chunks.size());
}

inline std::string RenderStage2Prompt(std::string_view question, const Chunk& chunk,
                                      const std::optional<std::string>& gold_answer) {
  const auto tmpl = gold_answer ? detail::kStage2WithGold : detail::kStage2WithoutGold;
  return detail::Fill(tmpl, question, gold_answer, chunk.text, 1);
}

inline std::string RenderReflectionPrompt(std::string_view question,
                                          const std::vector<const Chunk*>& chunks) {
  return detail::Fill(detail::kReflectionSft, question, std::nullopt,
                      detail::NumberedChunks(chunks), chunks.size());
}

// Prompt for forcing a final answer out of the policy model.
inline std::string RenderEvaluationPrompt(std::string_view question) {
  return "Please reason step by step, and put your final answer within \\boxed{}.\nQuestion: " +
         std::string(question);
}

inline constexpr std::string_view kForcedAnswerPrefix = " **Final Answer:**";

// ---------------------------------------------------------------------------
// Reply parsing

struct Stage1Parse {
  std::vector<Stage1Label> labels;
  // Byte offset of each parsed label word in the reply; nullopt if defaulted.
  std::vector<std::optional<std::size_t>> label_offsets;
  std::vector<std::size_t> defaulted;  // 0-based positions that fell back to Reasoning
};

namespace detail {

struct LabelHit {
  std::size_t offset;
  std::string word;
};

// Assigns labels to 1-based part indices. A label belongs to the most recent
// "[k]" marker at the start of a line; labels with no usable marker take the
// next unassigned position.
inline std::vector<std::optional<LabelHit>> AssignLabels(std::string_view reply, std::size_t n,
                                                         const std::regex& label_re) {
  static const std::regex marker_re(R"((?:^|\n)[ \t*#]*\[(\d+)\])");
  struct Event {
    std::size_t pos;
    bool is_marker;
    std::size_t index;
    std::string word;
  };
  std::vector<Event> events;
  const std::string s(reply);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), marker_re); it != std::sregex_iterator();
       ++it) {
    events.push_back({static_cast<std::size_t>(it->position(1)), true,
                      static_cast<std::size_t>(std::stoul((*it)[1].str())), {}});
  }
  for (auto it = std::sregex_iterator(s.begin(), s.end(), label_re); it != std::sregex_iterator();
       ++it) {
    events.push_back({static_cast<std::size_t>(it->position(1)), false, 0, (*it)[1].str()});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.pos < b.pos; });
  std::vector<std::optional<LabelHit>> out(n);
  std::size_t current = 0;  // pending 1-based marker, 0 for none
  for (const auto& e : events) {
    if (e.is_marker) {
      current = e.index;
      continue;
    }
    std::size_t slot = 0;
    if (current >= 1 && current <= n && !out[current - 1]) {
      slot = current;
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        if (!out[k]) {
          slot = k + 1;
          break;
        }
      }
    }
    if (slot != 0) out[slot - 1] = LabelHit{e.pos, e.word};
    current = 0;
  }
  return out;
}

}  // namespace detail

inline Stage1Parse ParseStage1Response(std::string_view reply, std::size_t n_chunks,
                                       Warnings* warnings = nullptr) {
  if (n_chunks == 0) throw DomainError("stage-1 parse needs n_chunks >= 1");
  static const std::regex label_re(
      R"(label[ \t*]*:[ \t*]*(reasoning|right[ \t_]*result|wrong[ \t_]*result))",
      std::regex::icase);
  const auto hits = detail::AssignLabels(reply, n_chunks, label_re);
  Stage1Parse out;
  std::size_t parsed = 0;
  for (std::size_t k = 0; k < n_chunks; ++k) {
    if (hits[k]) {
      std::string w = text::AsciiLower(hits[k]->word);
      std::string compact;
      for (char c : w) {
        if (c != ' ' && c != '\t' && c != '_') compact.push_back(c);
      }
      out.labels.push_back(ParseStage1LabelName(compact));
      out.label_offsets.push_back(hits[k]->offset);
      ++parsed;
    } else {
      out.labels.push_back(Stage1Label::kReasoning);
      out.label_offsets.push_back(std::nullopt);
      out.defaulted.push_back(k);
      Warn(warnings, "stage-1 reply has no label for part [" + std::to_string(k + 1) +
                         "]; defaulting to Reasoning");
    }
  }
  if (parsed == 0) throw JudgeFormatError("stage-1 reply contains no parseable labels");
  return out;
}

// Yes/No after the last "Answer:" marker, else a whole-reply scan for a
// standalone Yes or No.
inline bool ParseStage2Response(std::string_view reply) {
  const std::string lower = text::AsciiLower(reply);
  auto first_word = [](std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && !(std::isalpha(static_cast<unsigned char>(s[i])))) {
      if (s[i] != ' ' && s[i] != '\t' && s[i] != '\n' && s[i] != '*' && s[i] != '"' &&
          s[i] != '\'' && s[i] != ':') {
        return std::string();
      }
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
    return std::string(s.substr(i, j - i));
  };
  if (auto p = lower.rfind("answer:"); p != std::string::npos) {
    const std::string w = first_word(std::string_view(lower).substr(p + 7));
    if (w == "yes") return true;
    if (w == "no") return false;
  }
  bool yes = false;
  bool no = false;
  for (const ByteSpan& sp : text::WordSpans(lower)) {
    const std::string_view w = std::string_view(lower).substr(sp.begin, sp.size());
    yes = yes || w == "yes";
    no = no || w == "no";
  }
  if (yes != no) return yes;
  throw JudgeFormatError(yes ? "stage-2 reply is ambiguous (both Yes and No)"
                             : "stage-2 reply contains neither Yes nor No");
}

enum class ReflectionLabel { kThink, kResult };

struct ReflectionParse {
  std::vector<ReflectionLabel> labels;
  std::vector<std::optional<std::size_t>> label_offsets;
  std::vector<std::size_t> defaulted;
};

// Parses the compact "[i]. Think" / "[i]. Result" format.
inline ReflectionParse ParseReflectionResponse(std::string_view reply, std::size_t n_chunks,
                                               Warnings* warnings = nullptr) {
  if (n_chunks == 0) throw DomainError("reflection parse needs n_chunks >= 1");
  static const std::regex label_re(R"(\][ \t]*\.?[ \t*]*(think|result)\b)", std::regex::icase);
  const auto hits = detail::AssignLabels(reply, n_chunks, label_re);
  ReflectionParse out;
  std::size_t parsed = 0;
  for (std::size_t k = 0; k < n_chunks; ++k) {
    if (hits[k]) {
      out.labels.push_back(text::AsciiLower(hits[k]->word) == "result" ? ReflectionLabel::kResult
                                                                      : ReflectionLabel::kThink);
      out.label_offsets.push_back(hits[k]->offset);
      ++parsed;
    } else {
      out.labels.push_back(ReflectionLabel::kThink);
      out.label_offsets.push_back(std::nullopt);
      out.defaulted.push_back(k);
      Warn(warnings, "reflection reply has no label for part [" + std::to_string(k + 1) + "]");
    }
  }
  if (parsed == 0) throw JudgeFormatError("reflection reply contains no parseable labels");
  return out;
}

// Probability mass the model put on a label starting with `target_prefix`
// (case-insensitive) at the token covering byte `offset` of the reply.
// Returns nullopt when the reply carries no logprobs; 0 when the target is not
// among the recorded alternatives.
inline std::optional<double> LabelProbability(const ChatReply& reply, std::size_t offset,
                                              std::string_view target_prefix) {
  if (!reply.logprobs) return std::nullopt;
  const std::string target = text::AsciiLower(target_prefix);
  auto matches = [&](const std::string& token) {
    return text::AsciiLower(text::Trim(token)).starts_with(target) && !text::Trim(token).empty();
  };
  std::size_t pos = 0;
  for (const TokenLogprob& t : *reply.logprobs) {
    const std::size_t end = pos + t.token.size();
    if (offset >= pos && offset < end) {
      if (matches(t.token)) return std::exp(t.logprob);
      for (const TopLogprob& alt : t.top) {
        if (matches(alt.token)) return std::exp(alt.logprob);
      }
      return 0.0;
    }
    pos = end;
  }
  return 0.0;
}

}  // namespace rea::judge

#endif  // REA_JUDGE_PROMPTS_HPP_
