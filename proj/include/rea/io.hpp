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

// JSONL encodings of the record types exchanged between pipeline stages.

#ifndef REA_IO_HPP_
#define REA_IO_HPP_

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rea/error.hpp"
#include "rea/grpo.hpp"
#include "rea/judge/pipeline.hpp"
#include "rea/rewards.hpp"
#include "rea/trace.hpp"

namespace rea::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Line-oriented files

inline std::vector<Json> ReadJsonl(std::istream& in, const std::string& name = "<stream>") {
  std::vector<Json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::Trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Json> ReadJsonlFile(const std::string& path) {
  if (path == "-") return ReadJsonl(std::cin, "<stdin>");
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open input file: " + path);
  return ReadJsonl(in, path);
}

inline std::string ToJsonl(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out.push_back('\n');
  }
  return out;
}

inline void WriteText(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot open output file: " + path);
  out << content;
}

inline std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open input file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Wraps a field-access failure with the record's position.
template <typename T, typename Fn>
std::vector<T> DecodeAll(const std::vector<Json>& records, const std::string& what, Fn&& decode) {
  std::vector<T> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      out.push_back(decode(records[i]));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(what + " record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traces

inline Json TraceToJson(const ReasoningTrace& t) {
  Json j;
  j["id"] = t.id;
  j["question"] = t.question;
  j["gold_answer"] = t.gold_answer ? Json(*t.gold_answer) : Json(nullptr);
  j["think"] = t.think;
  j["answer"] = t.answer;
  if (!t.sampling_meta && t.tags.empty()) {
    j["meta"] = nullptr;
  } else {
    Json meta = Json::object();
    if (t.sampling_meta) {
      if (t.sampling_meta->temperature) meta["temperature"] = *t.sampling_meta->temperature;
      if (t.sampling_meta->top_p) meta["top_p"] = *t.sampling_meta->top_p;
      if (t.sampling_meta->budget) meta["budget"] = *t.sampling_meta->budget;
    }
    for (const auto& [k, v] : t.tags) meta[k] = v;
    j["meta"] = std::move(meta);
  }
  return j;
}

// Accepts the split form {"think", "answer"} or a raw generation in
// "generation" / "response" / "text" containing the think delimiters.
inline ReasoningTrace TraceFromJson(const Json& j) {
  ReasoningTrace t;
  t.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  t.question = j.value("question", std::string());
  if (auto g = j.find("gold_answer"); g != j.end() && !g->is_null()) {
    t.gold_answer = g->is_string() ? g->get<std::string>() : g->dump();
  }
  if (j.contains("think")) {
    t.think = j.at("think").get<std::string>();
    t.answer = j.value("answer", std::string());
  } else {
    for (const char* key : {"generation", "response", "text"}) {
      if (j.contains(key)) {
        SplitGeneration(j.at(key).get<std::string>(), t.think, t.answer);
        break;
      }
    }
  }
  if (auto m = j.find("meta"); m != j.end() && m->is_object()) {
    SamplingMeta sm;
    bool any = false;
    for (auto it = m->begin(); it != m->end(); ++it) {
      if (it.key() == "temperature" && it->is_number()) {
        sm.temperature = it->get<double>();
        any = true;
      } else if (it.key() == "top_p" && it->is_number()) {
        sm.top_p = it->get<double>();
        any = true;
      } else if (it.key() == "budget" && it->is_number()) {
        sm.budget = it->get<int>();
        any = true;
      } else {
        t.tags[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
      }
    }
    if (any) t.sampling_meta = sm;
  }
  return t;
}

inline std::vector<ReasoningTrace> ReadTraces(const std::string& path) {
  return DecodeAll<ReasoningTrace>(ReadJsonlFile(path), "trace", TraceFromJson);
}

// ---------------------------------------------------------------------------
// Chunks

inline Json ChunkToJson(const Chunk& c, bool with_text) {
  Json j{{"index", c.index},
         {"byte_span", Json::array({c.byte_span.begin, c.byte_span.end})},
         {"tokens", c.token_count}};
  if (with_text) j["text"] = c.text;
  return j;
}

// Chunk records reference the trace's think text by byte span; the text is
// restored from `think`.
inline Chunk ChunkFromJson(const Json& j, std::string_view think) {
  Chunk c;
  c.index = j.at("index").get<std::size_t>();
  c.byte_span = {j.at("byte_span").at(0).get<std::size_t>(), j.at("byte_span").at(1).get<std::size_t>()};
  c.token_count = j.at("tokens").get<std::size_t>();
  if (c.byte_span.end > think.size() || c.byte_span.begin > c.byte_span.end) {
    throw StructuralError("chunk byte span outside the think text");
  }
  c.text.assign(think.substr(c.byte_span.begin, c.byte_span.size()));
  return c;
}

// Output of `segment`: {"id", "chunks": [...]} with chunk texts included.
inline Json SegmentRecord(const ReasoningTrace& t, const std::vector<Chunk>& chunks) {
  Json arr = Json::array();
  for (const auto& c : chunks) arr.push_back(ChunkToJson(c, true));
  return Json{{"id", t.id}, {"chunks", std::move(arr)}};
}

// ---------------------------------------------------------------------------
// Detection

inline Json DetectionToJson(const judge::DetectionResult& d) {
  Json chunks = Json::array();
  for (const auto& c : d.chunks) chunks.push_back(ChunkToJson(c, false));
  Json stage1 = Json::array();
  Json stage2 = Json::array();
  Json probs = Json::array();
  for (const auto& v : d.verdicts) {
    stage1.push_back(judge::Stage1LabelName(v.stage1_label));
    stage2.push_back(v.stage2_confirmed ? Json(*v.stage2_confirmed) : Json(nullptr));
    probs.push_back(v.result_probability ? Json(*v.result_probability) : Json(nullptr));
  }
  return Json{{"id", d.trace_id},
              {"chunks", std::move(chunks)},
              {"stage1", std::move(stage1)},
              {"stage2", std::move(stage2)},
              {"confirmed", d.confirmed_indices},
              {"result_prob", d.has_probabilities ? std::move(probs) : Json(nullptr)}};
}

inline judge::DetectionResult DetectionFromJson(const Json& j, std::string_view think) {
  judge::DetectionResult d;
  d.trace_id = j.at("id").get<std::string>();
  for (const Json& c : j.at("chunks")) d.chunks.push_back(ChunkFromJson(c, think));
  const Json& stage1 = j.at("stage1");
  const Json& stage2 = j.at("stage2");
  const Json& probs = j.at("result_prob");
  if (stage1.size() != d.chunks.size() || stage2.size() != d.chunks.size()) {
    throw StructuralError("detection record " + d.trace_id + " has mismatched array lengths");
  }
  d.has_probabilities = !probs.is_null();
  for (std::size_t i = 0; i < d.chunks.size(); ++i) {
    judge::ChunkVerdict v;
    v.chunk_index = i;
    v.stage1_label = judge::ParseStage1LabelName(stage1.at(i).get<std::string>());
    if (!stage2.at(i).is_null()) v.stage2_confirmed = stage2.at(i).get<bool>();
    if (d.has_probabilities && !probs.at(i).is_null()) v.result_probability = probs.at(i).get<double>();
    d.verdicts.push_back(v);
  }
  d.confirmed_indices = j.at("confirmed").get<std::vector<std::size_t>>();
  return d;
}

inline Json SftToJson(const judge::SftRecord& r) {
  return Json{{"prompt", r.prompt}, {"target", r.target}, {"id", r.id}};
}

// ---------------------------------------------------------------------------
// Rewards

struct RewardRecord {
  std::string id;
  RewardVector reward;
  ReflectionStats stats;
  // Pass-through grouping fields.
  std::string qid;
  std::string dataset;
  Origin origin = Origin::kOriginal;
  std::string parent;
};

inline Json RewardToJson(const RewardRecord& r) {
  Json j{{"id", r.id},
         {"accuracy", r.reward.accuracy},
         {"length", r.reward.length},
         {"reflection", r.reward.reflection},
         {"combined", r.reward.combined},
         {"n_token", r.stats.n_token},
         {"n_reflect", r.stats.n_reflect},
         {"density", r.stats.density}};
  j["qid"] = r.qid;
  j["dataset"] = r.dataset;
  j["origin"] = r.origin == Origin::kOriginal ? "original" : "revision";
  j["parent"] = r.parent.empty() ? Json(nullptr) : Json(r.parent);
  return j;
}

inline Origin ParseOrigin(std::string_view s) {
  if (s == "original") return Origin::kOriginal;
  if (s == "revision") return Origin::kRevision;
  throw ParseError("unknown origin: " + std::string(s));
}

inline RewardRecord RewardFromJson(const Json& j) {
  RewardRecord r;
  r.id = j.at("id").get<std::string>();
  r.reward.accuracy = j.at("accuracy").get<int>();
  r.reward.length = j.at("length").get<double>();
  r.reward.reflection = j.at("reflection").get<double>();
  r.reward.combined = j.at("combined").get<double>();
  r.stats.n_token = j.at("n_token").get<std::size_t>();
  r.stats.n_reflect = j.at("n_reflect").get<std::size_t>();
  r.stats.density = j.at("density").get<double>();
  r.qid = j.value("qid", std::string());
  r.dataset = j.value("dataset", std::string());
  r.origin = ParseOrigin(j.value("origin", std::string("original")));
  if (auto p = j.find("parent"); p != j.end() && !p->is_null()) r.parent = p->get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------
// Training batch

inline Json SpanJson(const std::optional<ByteSpan>& s) {
  return s ? Json::array({s->begin, s->end}) : Json(nullptr);
}

inline Json BatchRecordToJson(const BatchRecord& r) {
  return Json{{"qid", r.qid},
              {"id", r.id},
              {"text", r.text},
              {"origin", r.origin == Origin::kOriginal ? "original" : "revision"},
              {"parent", r.parent.empty() ? Json(nullptr) : Json(r.parent)},
              {"rewards",
               {{"accuracy", r.rewards.accuracy},
                {"length", r.rewards.length},
                {"reflection", r.rewards.reflection},
                {"combined", r.rewards.combined}}},
              {"advantage", r.advantage ? Json(*r.advantage) : Json(nullptr)},
              {"spans",
               {{"shared", SpanJson(r.spans.shared)},
                {"overthink", SpanJson(r.spans.overthink)},
                {"revised", SpanJson(r.spans.revised)}}},
              {"dropped", r.dropped},
              {"drop_reason", r.dropped ? Json(DropReasonName(r.drop_reason)) : Json(nullptr)}};
}

}  // namespace rea::io

#endif  // REA_IO_HPP_
