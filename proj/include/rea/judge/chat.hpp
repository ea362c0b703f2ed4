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

// Chat-completions request/response types and the OpenAI-compatible wire
// format. Backends (HTTP, scripted mock, cache decorator) implement
// ChatBackend.

#ifndef REA_JUDGE_CHAT_HPP_
#define REA_JUDGE_CHAT_HPP_

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rea/error.hpp"

namespace rea::judge {

using Json = nlohmann::ordered_json;

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
};

struct ChatClientConfig {
  std::string base_url;
  std::string model_name;
  std::string api_key_env = "REA_API_KEY";
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 4096;
  bool request_logprobs = false;
  int max_in_flight = 8;
  RetryPolicy retry_policy;

  void Validate() const {
    if (!(temperature >= 0.0)) throw ConfigurationError("temperature must be >= 0");
    if (max_in_flight < 1) throw ConfigurationError("max_in_flight must be >= 1");
    if (retry_policy.max_attempts < 1) throw ConfigurationError("max_attempts must be >= 1");
  }

  // Judge defaults: greedy decoding.
  static ChatClientConfig Judge(std::string base_url, std::string model) {
    ChatClientConfig c;
    c.base_url = std::move(base_url);
    c.model_name = std::move(model);
    c.temperature = 0.0;
    c.top_p = 1.0;
    return c;
  }

  // Policy defaults: the sampling settings of the subject reasoning model.
  static ChatClientConfig Policy(std::string base_url, std::string model) {
    ChatClientConfig c;
    c.base_url = std::move(base_url);
    c.model_name = std::move(model);
    c.temperature = 0.6;
    c.top_p = 0.95;
    c.max_tokens = 1000;
    return c;
  }
};

struct ChatMessage {
  std::string role;
  std::string content;
};

enum class CallStage { kStage1, kStage2, kPolicy, kOther };

// Routing information that never reaches the wire. Scripted backends use it to
// look up their answers.
struct RequestContext {
  std::string trace_id;
  CallStage stage = CallStage::kOther;
  std::vector<std::size_t> chunk_indices;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 0;
  bool logprobs = false;
  int top_logprobs = 5;
  // Ask the server to continue the trailing assistant message instead of
  // opening a new turn (vLLM / SGLang extension).
  bool continue_final_message = false;
  RequestContext context;
};

struct TopLogprob {
  std::string token;
  double logprob = 0.0;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
  std::vector<TopLogprob> top;
};

struct ChatReply {
  std::string content;
  std::optional<std::vector<TokenLogprob>> logprobs;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply Complete(const ChatRequest& request) = 0;
  // Stable identity of the endpoint, part of the cache key.
  virtual std::string Endpoint() const = 0;
};

inline ChatRequest MakeRequest(const ChatClientConfig& config, std::vector<ChatMessage> messages,
                               RequestContext context = {}) {
  ChatRequest r;
  r.model = config.model_name;
  r.messages = std::move(messages);
  r.temperature = config.temperature;
  r.top_p = config.top_p;
  r.max_tokens = config.max_tokens;
  r.logprobs = config.request_logprobs;
  r.context = std::move(context);
  return r;
}

// Request body as sent to POST {base_url}/chat/completions.
inline Json RequestBody(const ChatRequest& r) {
  Json body;
  body["model"] = r.model;
  Json messages = Json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(messages);
  body["temperature"] = r.temperature;
  body["top_p"] = r.top_p;
  body["max_tokens"] = r.max_tokens;
  if (r.logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = r.top_logprobs;
  }
  if (r.continue_final_message) {
    body["continue_final_message"] = true;
    body["add_generation_prompt"] = false;
  }
  return body;
}

inline Json ReplyToJson(const ChatReply& reply) {
  Json message{{"role", "assistant"}, {"content", reply.content}};
  Json choice{{"index", 0}, {"message", std::move(message)}};
  if (reply.logprobs) {
    Json content = Json::array();
    for (const auto& t : *reply.logprobs) {
      Json top = Json::array();
      for (const auto& alt : t.top) top.push_back({{"token", alt.token}, {"logprob", alt.logprob}});
      content.push_back({{"token", t.token}, {"logprob", t.logprob}, {"top_logprobs", std::move(top)}});
    }
    choice["logprobs"] = {{"content", std::move(content)}};
  } else {
    choice["logprobs"] = nullptr;
  }
  return Json{{"object", "chat.completion"}, {"choices", Json::array({std::move(choice)})}};
}

// Parses a chat.completion response body. Throws JudgeFormatError if the
// shape is wrong.
inline ChatReply ReplyFromJson(const Json& j) {
  try {
    const Json& choice = j.at("choices").at(0);
    ChatReply reply;
    const Json& content = choice.at("message").at("content");
    reply.content = content.is_null() ? std::string() : content.get<std::string>();
    if (auto lp = choice.find("logprobs"); lp != choice.end() && lp->is_object()) {
      std::vector<TokenLogprob> tokens;
      for (const Json& t : lp->at("content")) {
        TokenLogprob tl;
        tl.token = t.at("token").get<std::string>();
        tl.logprob = t.at("logprob").get<double>();
        if (auto top = t.find("top_logprobs"); top != t.end() && top->is_array()) {
          for (const Json& alt : *top) {
            tl.top.push_back({alt.at("token").get<std::string>(), alt.at("logprob").get<double>()});
          }
        }
        tokens.push_back(std::move(tl));
      }
      reply.logprobs = std::move(tokens);
    }
    return reply;
  } catch (const nlohmann::json::exception& e) {
    throw JudgeFormatError(std::string("malformed chat completion: ") + e.what());
  }
}

}  // namespace rea::judge

#endif  // REA_JUDGE_CHAT_HPP_
