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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "rea/judge/cache.hpp"
#include "rea/judge/http.hpp"
#include "rea/judge/mock.hpp"
#include "rea/judge/pipeline.hpp"

namespace rea::judge {
namespace {

ReasoningTrace SixParagraphs() {
  ReasoningTrace t;
  t.id = "t1";
  t.question = "What is 2+3?";
  t.gold_answer = "5";
  t.think =
      "\nFirst add the numbers carefully here.\n\nSo 2 plus 3 gives 5.\n\n"
      "Wait, let me double check that sum.\n\nYes the answer is 5.\n\n"
      "Alternatively count on fingers to get five.\n\nStill 5.\n";
  t.answer = "\n\n**Final Answer:** \\boxed{5}";
  return t;
}

ChatClient MockJudge(std::shared_ptr<MockBackend> m, bool logprobs = false) {
  ChatClientConfig cfg = ChatClientConfig::Judge("mock://", "judge");
  cfg.request_logprobs = logprobs;
  return {std::move(m), cfg};
}

TEST(Prompts, Stage1Rendering) {
  Chunk a{0, "alpha.", 1, {0, 6}}, b{1, "beta.", 1, {8, 13}}, c{2, "gamma {Answer}.", 2, {15, 30}};
  const std::string with = RenderStage1Prompt("Q {Response}", {&a, &b, &c}, std::string("5"));
  EXPECT_NE(with.find("**Gold Answer:** 5"), std::string::npos);
  EXPECT_NE(with.find("divided into 3 parts"), std::string::npos);
  EXPECT_NE(with.find("For each of the 3 parts"), std::string::npos);
  EXPECT_NE(with.find("**Question:** Q {Response}\n"), std::string::npos);
  EXPECT_NE(with.find("gamma {Answer}."), std::string::npos);
  EXPECT_NE(with.find("[1]"), std::string::npos);
  EXPECT_NE(with.find("[3]"), std::string::npos);
  const std::string without = RenderStage1Prompt("Q", {&a}, std::nullopt);
  EXPECT_EQ(without.find("**Gold Answer:**"), std::string::npos);
  EXPECT_NE(without.find("divided into 1 parts"), std::string::npos);
  EXPECT_THROW(RenderStage1Prompt("Q", {}, std::nullopt), EmptyInputError);
}

TEST(Prompts, Stage2Rendering) {
  Chunk a{0, "So it is 5.", 4, {0, 11}};
  EXPECT_NE(RenderStage2Prompt("Q", a, std::string("5")).find("correctly answered the question"),
            std::string::npos);
  const std::string s = RenderStage2Prompt("Q", a, std::nullopt);
  EXPECT_NE(s.find("has already answered the question"), std::string::npos);
  EXPECT_NE(s.find("**Response:** So it is 5.\n"), std::string::npos);
}

TEST(Stage1Parse, WellFormedAndVariants) {
  const auto p = ParseStage1Response(
      "[1]. Think: setup\nLabel: Reasoning\n[2]. Think: states 5\nLabel: Right Result\n"
      "[3]. Think: bad\n**Label:** wrong_result\n",
      3);
  ASSERT_EQ(p.labels.size(), 3u);
  EXPECT_EQ(p.labels[0], Stage1Label::kReasoning);
  EXPECT_EQ(p.labels[1], Stage1Label::kRightResult);
  EXPECT_EQ(p.labels[2], Stage1Label::kWrongResult);
  EXPECT_TRUE(p.defaulted.empty());
}

TEST(Stage1Parse, OutOfOrderAndMissing) {
  Warnings w;
  const auto p = ParseStage1Response("[3]. Think: x\nLabel: Right Result\n[1]. Think: y\nLabel: Reasoning\n", 3, &w);
  EXPECT_EQ(p.labels[0], Stage1Label::kReasoning);
  EXPECT_EQ(p.labels[1], Stage1Label::kReasoning);
  EXPECT_EQ(p.labels[2], Stage1Label::kRightResult);
  EXPECT_EQ(p.defaulted, std::vector<std::size_t>{1});
  EXPECT_EQ(w.size(), 1u);
  EXPECT_THROW(ParseStage1Response("I refuse.", 2), JudgeFormatError);
}

TEST(Stage2Parse, Examples) {
  EXPECT_TRUE(ParseStage2Response("Reasoning: it says 5.\nAnswer: Yes"));
  EXPECT_FALSE(ParseStage2Response("Reasoning: yes it tries, but no.\nAnswer: **No**"));
  EXPECT_TRUE(ParseStage2Response("The model answered. Yes."));
  EXPECT_THROW(ParseStage2Response("maybe"), JudgeFormatError);
  EXPECT_THROW(ParseStage2Response("yes or no"), JudgeFormatError);
}

TEST(Pipeline, ConfirmedOnlyWhenBothStagesAgree) {
  auto mock = std::make_shared<MockBackend>();
  mock->SetChunk("t1", 1, {Stage1Label::kRightResult, false, std::nullopt});
  mock->SetChunk("t1", 3, {Stage1Label::kRightResult, true, std::nullopt});
  mock->SetChunk("t1", 4, {Stage1Label::kWrongResult, true, std::nullopt});
  DetectionOptions opts;
  opts.use_gold = true;
  const auto d = DetectOverthinking(SixParagraphs(), MockJudge(mock), opts);
  ASSERT_EQ(d.chunks.size(), 6u);
  EXPECT_EQ(d.confirmed_indices, std::vector<std::size_t>{3});
  EXPECT_EQ(mock->stage1_calls(), 1u);
  EXPECT_EQ(mock->stage2_calls(), 2u);
  EXPECT_EQ(d.verdicts[1].stage2_confirmed, false);
  EXPECT_FALSE(d.verdicts[4].stage2_confirmed.has_value());
}

TEST(Pipeline, NoRightResultMeansNoStage2Calls) {
  auto mock = std::make_shared<MockBackend>();
  const auto d = DetectOverthinking(SixParagraphs(), MockJudge(mock), {});
  EXPECT_TRUE(d.confirmed_indices.empty());
  EXPECT_EQ(mock->stage2_calls(), 0u);
}

TEST(Pipeline, BatchesSplitStage1Calls) {
  auto mock = std::make_shared<MockBackend>();
  DetectionOptions opts;
  opts.max_batch_tokens = 10;
  DetectOverthinking(SixParagraphs(), MockJudge(mock), opts);
  EXPECT_GE(mock->stage1_calls(), 3u);
}

TEST(Pipeline, ErrorsCarryContext) {
  auto t = SixParagraphs();
  t.gold_answer.reset();
  DetectionOptions opts;
  opts.use_gold = true;
  EXPECT_THROW(DetectOverthinking(t, MockJudge(std::make_shared<MockBackend>()), opts), PipelineError);
  auto bad = std::make_shared<MockBackend>(MockBackend::FromJson(
      Json{{"stage1_reply", Json::array({{{"trace_id", "t1"}, {"reply", "no labels here"}}})}}));
  try {
    DetectOverthinking(SixParagraphs(), MockJudge(bad), {});
    FAIL();
  } catch (const JudgeFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("t1"), std::string::npos);
  }
}

TEST(Pipeline, LogprobsGiveRightProbabilities) {
  auto mock = std::make_shared<MockBackend>();
  mock->SetChunk("t1", 1, {Stage1Label::kRightResult, true, 0.9});
  mock->SetChunk("t1", 2, {Stage1Label::kReasoning, false, 0.2});
  const auto d = DetectOverthinking(SixParagraphs(), MockJudge(mock, true), {});
  EXPECT_TRUE(d.has_probabilities);
  EXPECT_NEAR(*d.verdicts[1].result_probability, 0.9, 1e-9);
  EXPECT_NEAR(*d.verdicts[2].result_probability, 0.2, 1e-9);
  EXPECT_NEAR(*d.verdicts[0].result_probability, 0.0, 1e-9);
}

DetectionResult Detection(std::vector<std::size_t> confirmed, std::vector<std::optional<double>> probs = {}) {
  DetectionResult d;
  d.trace_id = "t";
  d.confirmed_indices = std::move(confirmed);
  d.verdicts.resize(std::max<std::size_t>(8, probs.size()));
  for (std::size_t i = 0; i < d.verdicts.size(); ++i) {
    d.verdicts[i].chunk_index = i;
    if (i < probs.size()) d.verdicts[i].result_probability = probs[i];
  }
  d.has_probabilities = !probs.empty();
  return d;
}

TEST(Strategies, Examples) {
  EXPECT_EQ(ChooseTruncation(Detection({2, 4, 6}), RevisionStrategy::Normal()), 2u);
  EXPECT_EQ(ChooseTruncation(Detection({2, 4, 6}), RevisionStrategy::Weak()), 4u);
  EXPECT_FALSE(ChooseTruncation(Detection({2}), RevisionStrategy::Weak()).has_value());
  EXPECT_FALSE(ChooseTruncation(Detection({}), RevisionStrategy::Normal()).has_value());
  const auto d = Detection({2, 4, 6}, {0, 0, 0.1, 0, 0.3, 0, 0.9, 0});
  EXPECT_EQ(ChooseTruncation(d, RevisionStrategy::Strong(0.25)), 4u);
  EXPECT_EQ(ChooseTruncation(d, RevisionStrategy::Strong(0.05)), 2u);
  // Strong may cut before the first confirmed chunk.
  EXPECT_EQ(ChooseTruncation(Detection({2, 4}, {0.5, 0, 0, 0, 0, 0, 0, 0}), RevisionStrategy::Strong()), 0u);
  Warnings w;
  EXPECT_EQ(ChooseTruncation(Detection({3}), RevisionStrategy::Strong(), &w), 3u);
  EXPECT_EQ(w.size(), 1u);
  EXPECT_THROW(RevisionStrategy::Strong(1.0), ConfigurationError);
  EXPECT_THROW(RevisionStrategy::Parse("medium"), ConfigurationError);
}

class RecordingBackend : public ChatBackend {
 public:
  explicit RecordingBackend(std::string reply) : reply_(std::move(reply)) {}
  ChatReply Complete(const ChatRequest& request) override {
    std::lock_guard lock(mu_);
    requests.push_back(request);
    return {reply_, std::nullopt};
  }
  std::string Endpoint() const override { return "record://"; }
  std::vector<ChatRequest> requests;

 private:
  std::mutex mu_;
  std::string reply_;
};

TEST(Revise, PrefixAndForcedAnswer) {
  const auto trace = SixParagraphs();
  const auto chunks = SegmentThink(trace, TokenCounter{});
  for (std::size_t cut = 0; cut < chunks.size(); ++cut) {
    auto rec = std::make_shared<RecordingBackend>(" \\boxed{5}");
    ChatClient policy{rec, ChatClientConfig::Policy("mock://", "policy")};
    const auto out = Revise(trace, chunks, cut, policy, RevisionOptions::Evaluation());
    EXPECT_TRUE(trace.think.starts_with(out.revised.think));
    EXPECT_EQ(out.revised.think.size(), chunks[cut].byte_span.end);
    EXPECT_EQ(out.revised.answer, " **Final Answer:** \\boxed{5}");
    EXPECT_EQ(out.revised.id, trace.id);
    EXPECT_FALSE(out.failed);
    ASSERT_EQ(rec->requests.size(), 1u);
    const auto& req = rec->requests[0];
    EXPECT_TRUE(req.continue_final_message);
    EXPECT_EQ(req.max_tokens, 1000);
    ASSERT_EQ(req.messages.size(), 2u);
    EXPECT_EQ(req.messages[1].content, "<think>" + out.revised.think + "</think> **Final Answer:**");
  }
  auto empty = std::make_shared<RecordingBackend>("   ");
  ChatClient policy{empty, ChatClientConfig::Policy("mock://", "policy")};
  EXPECT_TRUE(Revise(trace, chunks, 0, policy, RevisionOptions::Evaluation()).failed);
  EXPECT_THROW(Revise(trace, chunks, chunks.size(), policy, RevisionOptions::Evaluation()), DomainError);
}

TEST(Revise, HalfCapInTraining) {
  const auto trace = SixParagraphs();
  const TokenCounter counter;
  const auto chunks = SegmentThink(trace, counter);
  auto rec = std::make_shared<RecordingBackend>(" \\boxed{5}");
  ChatClient policy{rec, ChatClientConfig::Policy("mock://", "policy")};
  const auto train = Revise(trace, chunks, 0, policy, RevisionOptions::Training());
  EXPECT_GT(train.cut_index, 0u);
  EXPECT_GE(2 * counter.Count(train.revised.think), counter.Count(trace.think));
  EXPECT_EQ(rec->requests.back().max_tokens, 256);
  const auto shorter = std::string_view(trace.think).substr(0, chunks[train.cut_index - 1].byte_span.end);
  EXPECT_LT(2 * counter.Count(shorter), counter.Count(trace.think));
  EXPECT_EQ(Revise(trace, chunks, 0, policy, RevisionOptions::Evaluation()).cut_index, 0u);
  EXPECT_EQ(Revise(trace, chunks, 5, policy, RevisionOptions::Training()).cut_index, 5u);
}

TEST(Sft, TargetFormatAndExclusion) {
  auto mock = std::make_shared<MockBackend>();
  mock->SetChunk("t1", 1, {Stage1Label::kRightResult, true, std::nullopt});
  mock->SetChunk("t1", 3, {Stage1Label::kRightResult, true, std::nullopt});
  const auto trace = SixParagraphs();
  const auto d = DetectOverthinking(trace, MockJudge(mock), {});
  auto wrong = trace;
  wrong.id = "t2";
  wrong.answer = "\\boxed{6}";
  const auto recs = BuildReflectionSft({{trace, d}, {wrong, d}});
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].target, "[1]. Think\n[2]. Result\n[3]. Think\n[4]. Result\n[5]. Think\n[6]. Think");
  const auto parsed = ParseReflectionResponse(recs[0].target, 6);
  EXPECT_EQ(parsed.labels[3], ReflectionLabel::kResult);
  EXPECT_EQ(parsed.labels[4], ReflectionLabel::kThink);
}

// A local OpenAI-compatible endpoint that fails the first request with 500.
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      bodies.push_back(req.body);
      auth.push_back(req.get_header_value("Authorization"));
      if (bodies.size() == 1) {
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      ChatReply reply{"[1]. Think: x\nLabel: Right Result", std::vector<TokenLogprob>{
                                                                 {"[1]. Think: x\nLabel:", 0.0, {}},
                                                                 {" Right", std::log(0.7), {{" Right", std::log(0.7)}, {" Reasoning", std::log(0.3)}}},
                                                                 {" Result", 0.0, {}}}};
      res.set_content(ReplyToJson(reply).dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/"; }

  std::mutex mu_;
  std::vector<std::string> bodies;
  std::vector<std::string> auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Http, WireFormatRetryAndLogprobs) {
  FakeServer server;
  setenv("REA_TEST_KEY", "sekret", 1);
  ChatClientConfig cfg = ChatClientConfig::Judge(server.url(), "judge-model");
  cfg.api_key_env = "REA_TEST_KEY";
  cfg.request_logprobs = true;
  cfg.retry_policy.backoff = std::chrono::milliseconds(1);
  ChatClient client{std::make_shared<HttpChatBackend>(cfg), cfg};
  const ChatReply reply = client.Call("hello", {"t", CallStage::kStage1, {0}});
  ASSERT_EQ(server.bodies.size(), 2u);
  EXPECT_EQ(server.auth[1], "Bearer sekret");
  const Json body = Json::parse(server.bodies[1]);
  EXPECT_EQ(body["model"], "judge-model");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["top_p"], 1.0);
  EXPECT_EQ(body["logprobs"], true);
  EXPECT_FALSE(body.contains("trace_id"));
  const auto parsed = ParseStage1Response(reply.content, 1);
  EXPECT_NEAR(*LabelProbability(reply, *parsed.label_offsets[0], "right"), 0.7, 1e-9);
  unsetenv("REA_TEST_KEY");
}

TEST(Http, TransportFailureAfterRetries) {
  ChatClientConfig cfg = ChatClientConfig::Judge("http://127.0.0.1:1/v1", "m");
  cfg.retry_policy = {2, std::chrono::milliseconds(1)};
  HttpChatBackend backend(cfg);
  EXPECT_THROW(backend.Complete(MakeRequest(cfg, {{"user", "x"}})), TransportError);
  EXPECT_THROW(ParseBaseUrl("localhost:8000"), ConfigurationError);
}

class CountingBackend : public ChatBackend {
 public:
  ChatReply Complete(const ChatRequest& request) override {
    ++calls;
    return {"reply to " + request.messages.back().content, std::nullopt};
  }
  std::string Endpoint() const override { return "count://"; }
  std::atomic<int> calls{0};
};

TEST(Cache, HitSkipsBackendAndIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / ("rea_cache_test_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  auto inner = std::make_shared<CountingBackend>();
  const ChatClientConfig cfg = ChatClientConfig::Judge("count://", "m");
  const ChatRequest req = MakeRequest(cfg, {{"user", "q"}});
  std::string first;
  {
    CachingBackend cache(inner, dir);
    first = ReplyToJson(cache.Complete(req)).dump();
  }
  CachingBackend cache(inner, dir);
  const std::string second = ReplyToJson(cache.Complete(req)).dump();
  EXPECT_EQ(inner->calls.load(), 1);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(first, second);
  ChatRequest other = req;
  other.temperature = 0.5;
  cache.Complete(other);
  EXPECT_EQ(inner->calls.load(), 2);
  // Routing context is not part of the key.
  ChatRequest routed = req;
  routed.context = {"x", CallStage::kStage2, {3}};
  cache.Complete(routed);
  EXPECT_EQ(inner->calls.load(), 2);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rea::judge
