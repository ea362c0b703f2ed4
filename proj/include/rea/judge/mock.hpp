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

// Scripted offline backend. A fixture file maps (trace id, chunk index) to the
// judge's behaviour and trace id to the policy continuation:
//
//   {
//     "judge": [{"trace_id": "t1", "chunk": 3, "label": "Right Result",
//                "confirm": true, "probability": 0.9}, ...],
//     "policy": [{"trace_id": "t1", "continuation": " \\boxed{5}"}, ...],
//     "stage1_reply": [{"trace_id": "t9", "reply": "garbage"}],
//     "default_continuation": ""
//   }
//
// Unlisted chunks are labelled Reasoning. Replies are rendered in the same
// text format a real judge produces so that they go through the ordinary
// parsers. When the request asks for logprobs the reply carries a token list
// whose label tokens expose the scripted probability.

#ifndef REA_JUDGE_MOCK_HPP_
#define REA_JUDGE_MOCK_HPP_

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "rea/error.hpp"
#include "rea/judge/chat.hpp"
#include "rea/judge/prompts.hpp"

namespace rea::judge {

struct ScriptedChunk {
  Stage1Label label = Stage1Label::kReasoning;
  bool confirm = false;
  std::optional<double> probability;
};

class MockBackend : public ChatBackend {
 public:
  MockBackend() = default;

  static MockBackend FromJson(const Json& j) {
    MockBackend m;
    if (auto it = j.find("judge"); it != j.end()) {
      for (const Json& e : *it) {
        ScriptedChunk c;
        c.label = ParseStage1LabelName(e.value("label", std::string("Reasoning")));
        c.confirm = e.value("confirm", false);
        if (auto p = e.find("probability"); p != e.end() && !p->is_null()) c.probability = p->get<double>();
        m.SetChunk(e.at("trace_id").get<std::string>(), e.at("chunk").get<std::size_t>(), c);
      }
    }
    if (auto it = j.find("policy"); it != j.end()) {
      for (const Json& e : *it) {
        m.SetContinuation(e.at("trace_id").get<std::string>(), e.at("continuation").get<std::string>());
      }
    }
    if (auto it = j.find("stage1_reply"); it != j.end()) {
      for (const Json& e : *it) {
        m.stage1_override_[e.at("trace_id").get<std::string>()] = e.at("reply").get<std::string>();
      }
    }
    m.default_continuation_ = j.value("default_continuation", std::string());
    return m;
  }

  static std::shared_ptr<MockBackend> FromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read mock fixture: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return std::make_shared<MockBackend>(FromJson(Json::parse(ss.str())));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigurationError("bad mock fixture " + path + ": " + e.what());
    }
  }

  MockBackend(const MockBackend& other)
      : chunks_(other.chunks_), continuations_(other.continuations_),
        stage1_override_(other.stage1_override_), default_continuation_(other.default_continuation_) {}

  void SetChunk(const std::string& trace_id, std::size_t chunk, ScriptedChunk c) {
    chunks_[{trace_id, chunk}] = c;
  }
  void SetContinuation(const std::string& trace_id, std::string text) {
    continuations_[trace_id] = std::move(text);
  }

  ChatReply Complete(const ChatRequest& request) override {
    const RequestContext& ctx = request.context;
    switch (ctx.stage) {
      case CallStage::kStage1:
        ++stage1_calls_;
        return Stage1Reply(ctx, request.logprobs);
      case CallStage::kStage2: {
        ++stage2_calls_;
        const bool yes = ctx.chunk_indices.size() == 1 && Lookup(ctx.trace_id, ctx.chunk_indices[0]).confirm;
        return {std::string("Reasoning: scripted.\nAnswer: ") + (yes ? "Yes" : "No"), std::nullopt};
      }
      case CallStage::kPolicy: {
        ++policy_calls_;
        auto it = continuations_.find(ctx.trace_id);
        return {it == continuations_.end() ? default_continuation_ : it->second, std::nullopt};
      }
      case CallStage::kOther:
        break;
    }
    throw TransportError("mock backend received a request without routing context");
  }

  std::string Endpoint() const override { return "mock://scripted"; }

  std::size_t stage1_calls() const { return stage1_calls_.load(); }
  std::size_t stage2_calls() const { return stage2_calls_.load(); }
  std::size_t policy_calls() const { return policy_calls_.load(); }

 private:
  ScriptedChunk Lookup(const std::string& trace_id, std::size_t chunk) const {
    auto it = chunks_.find({trace_id, chunk});
    return it == chunks_.end() ? ScriptedChunk{} : it->second;
  }

  ChatReply Stage1Reply(const RequestContext& ctx, bool logprobs) const {
    if (auto it = stage1_override_.find(ctx.trace_id); it != stage1_override_.end()) {
      return {it->second, std::nullopt};
    }
    ChatReply reply;
    std::vector<TokenLogprob> tokens;
    auto emit = [&](std::string piece, double lp = 0.0, std::vector<TopLogprob> top = {}) {
      reply.content += piece;
      tokens.push_back({std::move(piece), lp, std::move(top)});
    };
    for (std::size_t k = 0; k < ctx.chunk_indices.size(); ++k) {
      const ScriptedChunk c = Lookup(ctx.trace_id, ctx.chunk_indices[k]);
      emit("[" + std::to_string(k + 1) + "]. Think: scripted.\nLabel:");
      // Label token: the chosen label carries probability mass p_right on
      // "Right" (scripted probability, or 1/0 by label when unscripted).
      const double p_right = c.probability.value_or(c.label == Stage1Label::kRightResult ? 1.0 : 0.0);
      const std::string chosen = c.label == Stage1Label::kRightResult ? " Right"
                                 : c.label == Stage1Label::kWrongResult ? " Wrong"
                                                                        : " Reasoning";
      auto safe_log = [](double p) { return p <= 0.0 ? -1e4 : std::log(p); };
      std::vector<TopLogprob> top{{" Right", safe_log(p_right)},
                                  {chosen == " Right" ? " Reasoning" : chosen, safe_log(1.0 - p_right)}};
      emit(chosen, chosen == " Right" ? safe_log(p_right) : safe_log(1.0 - p_right), std::move(top));
      if (c.label != Stage1Label::kReasoning) emit(" Result");
      emit("\n");
    }
    if (logprobs) reply.logprobs = std::move(tokens);
    return reply;
  }

  std::map<std::pair<std::string, std::size_t>, ScriptedChunk> chunks_;
  std::map<std::string, std::string> continuations_;
  std::map<std::string, std::string> stage1_override_;
  std::string default_continuation_;
  std::atomic<std::size_t> stage1_calls_{0};
  std::atomic<std::size_t> stage2_calls_{0};
  std::atomic<std::size_t> policy_calls_{0};
};

}  // namespace rea::judge

#endif  // REA_JUDGE_MOCK_HPP_
