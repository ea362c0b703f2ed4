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

// Content-addressed response cache. Each entry is one file named by the
// SHA-256 of (endpoint, request body); entries are published with an atomic
// rename so concurrent readers never see partial files.

#ifndef REA_JUDGE_CACHE_HPP_
#define REA_JUDGE_CACHE_HPP_

#include <openssl/evp.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>

#include "rea/error.hpp"
#include "rea/judge/chat.hpp"

namespace rea::judge {

inline std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kPipeline, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

inline std::string CacheKey(std::string_view endpoint, const ChatRequest& request) {
  std::string material(endpoint);
  material.push_back('\n');
  material += RequestBody(request).dump();
  return Sha256Hex(material);
}

class CachingBackend : public ChatBackend {
 public:
  CachingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  ChatReply Complete(const ChatRequest& request) override {
    const std::string key = CacheKey(inner_->Endpoint(), request);
    const auto path = dir_ / key.substr(0, 2) / (key + ".json");
    if (std::ifstream in(path); in) {
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        auto reply = ReplyFromJson(Json::parse(ss.str()));
        hits_.fetch_add(1);
        return reply;
      } catch (const std::exception&) {
        // fall through and refetch; the bad entry is replaced below
      }
    }
    misses_.fetch_add(1);
    ChatReply reply = inner_->Complete(request);
    Store(path, ReplyToJson(reply).dump());
    return reply;
  }

  std::string Endpoint() const override { return inner_->Endpoint(); }

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  static void Store(const std::filesystem::path& path, const std::string& payload) {
    std::filesystem::create_directories(path.parent_path());
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << std::this_thread::get_id() << '.'
             << Counter().fetch_add(1);
    const auto tmp = path.parent_path() / tmp_name.str();
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw Error(ErrorCode::kPipeline, "cannot write cache entry " + tmp.string());
      out << payload;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }

  static std::atomic<unsigned long>& Counter() {
    static std::atomic<unsigned long> counter{0};
    return counter;
  }

  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path dir_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace rea::judge

#endif  // REA_JUDGE_CACHE_HPP_
