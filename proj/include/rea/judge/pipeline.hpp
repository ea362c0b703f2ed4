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

// Overthinking detection and response revision.
//
// Detection segments the think part, asks the judge to label every chunk in
// token-bounded batches, and re-verifies each "Right Result" chunk on its own.
// Only chunks positive in both passes are confirmed. Revision keeps the think
// prefix up to a chosen confirmed chunk, closes the think part, and lets the
// policy model write the final answer.

#ifndef REA_JUDGE_PIPELINE_HPP_
#define REA_JUDGE_PIPELINE_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rea/error.hpp"
#include "rea/judge/chat.hpp"
#include "rea/judge/prompts.hpp"
#include "rea/rewards.hpp"
#include "rea/trace.hpp"

namespace rea::judge {

struct ChunkVerdict {
  std::size_t chunk_index = 0;
  Stage1Label stage1_label = Stage1Label::kReasoning;
  std::optional<bool> stage2_confirmed;  // only for Right Result chunks
  std::optional<double> result_probability;
};

struct DetectionResult {
  std::string trace_id;
  std::vector<Chunk> chunks;
  std::vector<ChunkVerdict> verdicts;
  std::vector<std::size_t> confirmed_indices;
  bool has_probabilities = false;
};

struct DetectionOptions {
  bool use_gold = false;
  SegmentOptions segment;
  std::size_t max_batch_tokens = 1000;
  TokenCounter counter;
};

// A judge: backend plus the request settings for it.
struct ChatClient {
  std::shared_ptr<ChatBackend> backend;
  ChatClientConfig config;

  ChatReply Call(std::string prompt, RequestContext ctx) const {
    return backend->Complete(MakeRequest(config, {{"user", std::move(prompt)}}, std::move(ctx)));
  }
};

// Detection over chunks produced earlier (e.g. by the `segment` command).
inline DetectionResult DetectOnChunks(const ReasoningTrace& trace, std::vector<Chunk> chunks,
                                      const ChatClient& judge, const DetectionOptions& options,
                                      Warnings* warnings = nullptr) {
  if (options.use_gold && !trace.gold_answer) {
    throw PipelineError(trace.id, "gold-answer detection requested but the trace has no gold answer");
  }
  if (chunks.empty()) throw EmptyInputError("trace " + trace.id + " has no chunks");
  const std::optional<std::string> gold = options.use_gold ? trace.gold_answer : std::nullopt;
  DetectionResult result;
  result.trace_id = trace.id;
  result.chunks = std::move(chunks);
  result.verdicts.resize(result.chunks.size());
  result.has_probabilities = judge.config.request_logprobs;
  for (std::size_t i = 0; i < result.chunks.size(); ++i) result.verdicts[i].chunk_index = i;

  const auto batches = BatchChunks(result.chunks, options.max_batch_tokens);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& batch = batches[b];
    std::vector<const Chunk*> parts;
    for (std::size_t i : batch) parts.push_back(&result.chunks[i]);
    ChatReply reply;
    try {
      reply = judge.Call(RenderStage1Prompt(trace.question, parts, gold),
                         {trace.id, CallStage::kStage1, batch});
    } catch (const TransportError& e) {
      throw PipelineError(trace.id, e.what());
    }
    Stage1Parse parsed;
    try {
      parsed = ParseStage1Response(reply.content, batch.size(), warnings);
    } catch (const JudgeFormatError& e) {
      throw JudgeFormatError("trace " + trace.id + ", batch " + std::to_string(b) + " (chunks " +
                             std::to_string(batch.front()) + ".." + std::to_string(batch.back()) +
                             "): " + e.what());
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      ChunkVerdict& v = result.verdicts[batch[k]];
      v.stage1_label = parsed.labels[k];
      if (judge.config.request_logprobs) {
        const auto& offset = parsed.label_offsets[k];
        v.result_probability =
            offset ? LabelProbability(reply, *offset, "right").value_or(0.0) : 0.0;
      }
    }
  }

  for (ChunkVerdict& v : result.verdicts) {
    if (v.stage1_label != Stage1Label::kRightResult) continue;
    ChatReply reply;
    try {
      reply = judge.Call(RenderStage2Prompt(trace.question, result.chunks[v.chunk_index], gold),
                         {trace.id, CallStage::kStage2, {v.chunk_index}});
    } catch (const TransportError& e) {
      throw PipelineError(trace.id, e.what());
    }
    try {
      v.stage2_confirmed = ParseStage2Response(reply.content);
    } catch (const JudgeFormatError& e) {
      throw JudgeFormatError("trace " + trace.id + ", chunk " + std::to_string(v.chunk_index) +
                             ": " + e.what());
    }
    if (*v.stage2_confirmed) result.confirmed_indices.push_back(v.chunk_index);
  }
  return result;
}

inline DetectionResult DetectOverthinking(const ReasoningTrace& trace, const ChatClient& judge,
                                          const DetectionOptions& options,
                                          Warnings* warnings = nullptr) {
  return DetectOnChunks(trace, SegmentThink(trace, options.counter, options.segment), judge, options,
                        warnings);
}

// ---------------------------------------------------------------------------
// Truncation strategy

struct RevisionStrategy {
  enum class Kind { kNormal, kWeak, kStrong };
  Kind kind = Kind::kNormal;
  double threshold = 0.25;  // Strong only

  static RevisionStrategy Normal() { return {Kind::kNormal, 0.25}; }
  static RevisionStrategy Weak() { return {Kind::kWeak, 0.25}; }
  static RevisionStrategy Strong(double threshold = 0.25) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw ConfigurationError("strong-strategy threshold must lie in (0, 1)");
    }
    return {Kind::kStrong, threshold};
  }

  static RevisionStrategy Parse(std::string_view s, double threshold = 0.25) {
    if (s == "normal") return Normal();
    if (s == "weak") return Weak();
    if (s == "strong") return Strong(threshold);
    throw ConfigurationError("unknown revision strategy: " + std::string(s));
  }
};

inline std::optional<std::size_t> ChooseTruncation(const DetectionResult& d,
                                                   const RevisionStrategy& strategy,
                                                   Warnings* warnings = nullptr) {
  const auto& c = d.confirmed_indices;
  if (c.empty()) return std::nullopt;
  switch (strategy.kind) {
    case RevisionStrategy::Kind::kNormal:
      return c.front();
    case RevisionStrategy::Kind::kWeak:
      if (c.size() < 2) return std::nullopt;
      return c[1];
    case RevisionStrategy::Kind::kStrong: {
      bool any_probability = false;
      for (const auto& v : d.verdicts) {
        if (!v.result_probability) continue;
        any_probability = true;
        if (*v.result_probability > strategy.threshold) return v.chunk_index;
      }
      if (!any_probability) {
        Warn(warnings, "trace " + d.trace_id +
                           ": strong strategy without recorded probabilities; using normal");
      }
      return c.front();
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Revision

struct RevisionOptions {
  int budget_tokens = 1000;
  // Never remove more than half of the original think tokens.
  bool enforce_half_cap = false;
  TokenCounter counter;

  static RevisionOptions Evaluation() { return {1000, false, {}}; }
  static RevisionOptions Training() { return {256, true, {}}; }
};

struct RevisionOutcome {
  ReasoningTrace revised;
  std::size_t cut_index = 0;  // after the half cap, if applied
  bool failed = false;        // policy returned an empty continuation
};

// Smallest cut index >= `cut` whose retained think prefix holds at least half
// of the think tokens.
inline std::size_t ApplyHalfCap(const std::string& think, const std::vector<Chunk>& chunks,
                                std::size_t cut, const TokenCounter& counter) {
  const std::size_t total = counter.Count(think);
  while (cut + 1 < chunks.size() &&
         2 * counter.Count(std::string_view(think).substr(0, chunks[cut].byte_span.end)) < total) {
    ++cut;
  }
  return cut;
}

inline RevisionOutcome Revise(const ReasoningTrace& trace, const std::vector<Chunk>& chunks,
                              std::size_t cut_index, const ChatClient& policy,
                              const RevisionOptions& options) {
  if (cut_index >= chunks.size()) {
    throw DomainError("trace " + trace.id + ": cut index " + std::to_string(cut_index) +
                      " out of range for " + std::to_string(chunks.size()) + " chunks");
  }
  RevisionOutcome out;
  out.cut_index = options.enforce_half_cap ? ApplyHalfCap(trace.think, chunks, cut_index, options.counter)
                                           : cut_index;
  const std::string prefix = trace.think.substr(0, chunks[out.cut_index].byte_span.end);
  ChatClientConfig cfg = policy.config;
  cfg.max_tokens = options.budget_tokens;
  ChatRequest req = MakeRequest(
      cfg,
      {{"user", RenderEvaluationPrompt(trace.question)},
       {"assistant", std::string(kThinkOpen) + prefix + std::string(kThinkClose) +
                         std::string(kForcedAnswerPrefix)}},
      {trace.id, CallStage::kPolicy, {out.cut_index}});
  req.continue_final_message = true;
  ChatReply reply;
  try {
    reply = policy.backend->Complete(req);
  } catch (const TransportError& e) {
    throw PipelineError(trace.id, e.what());
  }
  out.revised = trace;
  out.revised.think = prefix;
  out.revised.answer = std::string(kForcedAnswerPrefix) + reply.content;
  SamplingMeta meta = trace.sampling_meta.value_or(SamplingMeta{});
  meta.budget = options.budget_tokens;
  out.revised.sampling_meta = meta;
  out.failed = text::Trim(reply.content).empty();
  return out;
}

// ---------------------------------------------------------------------------
// Reflection-model SFT data

struct SftRecord {
  std::string id;
  std::string prompt;
  std::string target;
};

// Builds one record per correct trace: the compact labelling prompt over all
// chunks and a "[i]. Think" / "[i]. Result" target, Result exactly at the
// confirmed chunks. Traces without a gold answer or with an incorrect final
// answer are excluded.
inline std::vector<SftRecord> BuildReflectionSft(
    const std::vector<std::pair<ReasoningTrace, DetectionResult>>& items, Warnings* warnings = nullptr) {
  std::vector<SftRecord> out;
  for (const auto& [trace, detection] : items) {
    if (!trace.gold_answer || AccuracyReward(trace.answer, *trace.gold_answer) != 1) continue;
    if (detection.chunks.empty()) {
      Warn(warnings, "trace " + trace.id + " has no chunks; skipped");
      continue;
    }
    std::vector<const Chunk*> parts;
    for (const auto& c : detection.chunks) parts.push_back(&c);
    SftRecord r;
    r.id = trace.id;
    r.prompt = RenderReflectionPrompt(trace.question, parts);
    std::size_t next_confirmed = 0;
    for (std::size_t i = 0; i < detection.chunks.size(); ++i) {
      bool result = false;
      while (next_confirmed < detection.confirmed_indices.size() &&
             detection.confirmed_indices[next_confirmed] < i) {
        ++next_confirmed;
      }
      if (next_confirmed < detection.confirmed_indices.size() &&
          detection.confirmed_indices[next_confirmed] == i) {
        result = true;
      }
      if (i > 0) r.target += "\n";
      r.target += "[" + std::to_string(i + 1) + "]. " + (result ? "Result" : "Think");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rea::judge

#endif  // REA_JUDGE_PIPELINE_HPP_
