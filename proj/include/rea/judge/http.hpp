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

#ifndef REA_JUDGE_HTTP_HPP_
#define REA_JUDGE_HTTP_HPP_

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "rea/error.hpp"
#include "rea/judge/chat.hpp"

namespace rea::judge {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "http://localhost:8000"
  std::string path_prefix;       // e.g. "/v1", never ends with '/'
};

inline ParsedUrl ParseBaseUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigurationError("base_url needs a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl p;
  p.scheme_host_port = url.substr(0, path_begin);
  p.path_prefix = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!p.path_prefix.empty() && p.path_prefix.back() == '/') p.path_prefix.pop_back();
  return p;
}

// Counting semaphore bounding concurrent requests per client.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int slots) : free_(slots) {}

  void Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }
  void Release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(ChatClientConfig config)
      : config_(std::move(config)), url_(ParseBaseUrl(config_.base_url)),
        limiter_(config_.max_in_flight) {
    config_.Validate();
  }

  ChatReply Complete(const ChatRequest& request) override {
    const std::string body = RequestBody(request).dump();
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    const std::string path = url_.path_prefix + "/chat/completions";
    auto backoff = config_.retry_policy.backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= config_.retry_policy.max_attempts; ++attempt) {
      limiter_.Acquire();
      httplib::Client client(url_.scheme_host_port);
      client.set_read_timeout(600, 0);
      auto res = client.Post(path, headers, body, "application/json");
      limiter_.Release();
      if (res && res->status == 200) {
        try {
          return ReplyFromJson(Json::parse(res->body));
        } catch (const nlohmann::json::exception& e) {
          throw JudgeFormatError(std::string("response is not JSON: ") + e.what());
        }
      }
      if (!res) {
        last_error = "connection error: " + httplib::to_string(res.error());
      } else {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
        const bool retryable = res->status == 429 || res->status >= 500;
        if (!retryable) break;
      }
      if (attempt < config_.retry_policy.max_attempts) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
    throw TransportError(config_.base_url + ": " + last_error);
  }

  std::string Endpoint() const override { return config_.base_url; }

  const ChatClientConfig& config() const { return config_; }

 private:
  ChatClientConfig config_;
  ParsedUrl url_;
  InFlightLimiter limiter_;
};

}  // namespace rea::judge

#endif  // REA_JUDGE_HTTP_HPP_
