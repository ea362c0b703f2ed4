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

// The `rea` command line. Dispatch() is callable in-process so tests can run
// whole pipelines without spawning processes.
//
// Shared settings are options of the top-level app. They may appear before or
// after the subcommand and may also come from a flat `key = value` config
// file (--config); precedence is flag, then environment, then config file,
// then built-in default.

#ifndef REA_CLI_HPP_
#define REA_CLI_HPP_

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rea/error.hpp"
#include "rea/grpo.hpp"
#include "rea/io.hpp"
#include "rea/judge/cache.hpp"
#include "rea/judge/http.hpp"
#include "rea/judge/mock.hpp"
#include "rea/judge/pipeline.hpp"
#include "rea/parallel.hpp"
#include "rea/report.hpp"
#include "rea/rewards.hpp"
#include "rea/sim.hpp"
#include "rea/trace.hpp"

namespace rea::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;
inline constexpr unsigned kNetworkJobs = 8;

struct GlobalOptions {
  std::string config_file;
  unsigned jobs = 0;  // 0: stage default
  std::string tokenizer = "unicode-word";
  std::string cache_dir;
  std::string api_key_env = "REA_API_KEY";
  std::string judge_url;
  std::string judge_model;
  std::string policy_url;
  std::string policy_model;
  std::string mock;
  bool logprobs = false;
  std::string length_variant = "kimi";
  double dq = kDensityQuantile20;
  double quantile = 0.2;
  std::size_t window = 16;
  std::string keywords = "wait,alternatively,check,but";
  std::string weights = "1,1,1";
  bool reflect_think_only = false;
  std::size_t max_chunk_tokens = 128;
  std::size_t max_batch_tokens = 1000;
};

namespace detail {

inline std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    const auto t = text::Trim(cur);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline RewardConfig MakeRewardConfig(const GlobalOptions& g) {
  RewardConfig c;
  c.reflective_tokens.clear();
  for (const auto& k : SplitList(g.keywords)) c.reflective_tokens.insert(text::AsciiLower(k));
  c.cluster_window_tokens = g.window;
  c.density_threshold = g.dq;
  c.length_variant = ParseLengthVariant(g.length_variant);
  const auto w = SplitList(g.weights);
  if (w.size() != 3) throw ConfigurationError("--weights needs three comma-separated numbers");
  try {
    c.weights = {std::stod(w[0]), std::stod(w[1]), std::stod(w[2])};
  } catch (const std::exception&) {
    throw ConfigurationError("--weights needs three comma-separated numbers");
  }
  c.reflect_think_only = g.reflect_think_only;
  c.Validate();
  return c;
}

inline unsigned Jobs(const GlobalOptions& g, unsigned stage_default) {
  return g.jobs > 0 ? g.jobs : stage_default;
}

inline void Emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    out.flush();
  } else {
    io::WriteText(path, content);
  }
}

inline void EmitWarnings(const Warnings& w, std::ostream& err) {
  for (const auto& m : w) err << io::Json{{"warning", m}}.dump() << "\n";
}

inline std::shared_ptr<judge::ChatBackend> WithCache(std::shared_ptr<judge::ChatBackend> backend,
                                                     const GlobalOptions& g) {
  if (g.cache_dir.empty()) return backend;
  return std::make_shared<judge::CachingBackend>(std::move(backend), g.cache_dir);
}

inline judge::ChatClient JudgeClient(const GlobalOptions& g, std::shared_ptr<judge::ChatBackend> mock) {
  judge::ChatClientConfig cfg = judge::ChatClientConfig::Judge(g.judge_url, g.judge_model);
  cfg.api_key_env = g.api_key_env;
  cfg.request_logprobs = g.logprobs;
  if (mock) return {WithCache(std::move(mock), g), cfg};
  if (g.judge_url.empty()) throw UsageError("detect needs --judge-url (or --mock)");
  return {WithCache(std::make_shared<judge::HttpChatBackend>(cfg), g), cfg};
}

inline judge::ChatClient PolicyClient(const GlobalOptions& g, std::shared_ptr<judge::ChatBackend> mock) {
  judge::ChatClientConfig cfg = judge::ChatClientConfig::Policy(g.policy_url, g.policy_model);
  cfg.api_key_env = g.api_key_env;
  if (mock) return {WithCache(std::move(mock), g), cfg};
  if (g.policy_url.empty()) throw UsageError("revise needs --policy-url (or --mock)");
  return {WithCache(std::make_shared<judge::HttpChatBackend>(cfg), g), cfg};
}

inline std::shared_ptr<judge::ChatBackend> MockFrom(const GlobalOptions& g) {
  if (g.mock.empty()) return nullptr;
  return judge::MockBackend::FromFile(g.mock);
}

inline std::map<std::string, const ReasoningTrace*> TraceIndex(const std::vector<ReasoningTrace>& traces) {
  std::map<std::string, const ReasoningTrace*> out;
  for (const auto& t : traces) {
    if (!out.emplace(t.id, &t).second) throw StructuralError("duplicate trace id " + t.id);
  }
  return out;
}

// Detection records keyed by id, with chunk texts restored from the traces.
inline std::map<std::string, judge::DetectionResult> ReadDetections(
    const std::string& path, const std::map<std::string, const ReasoningTrace*>& traces) {
  std::map<std::string, judge::DetectionResult> out;
  const auto records = io::ReadJsonlFile(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      const std::string id = records[i].at("id").get<std::string>();
      auto it = traces.find(id);
      if (it == traces.end()) throw StructuralError("detection for unknown trace " + id);
      out.emplace(id, io::DetectionFromJson(records[i], it->second->think));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("detection record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

inline std::string GroupKey(const ReasoningTrace& t) {
  if (auto it = t.tags.find("qid"); it != t.tags.end()) return it->second;
  return t.question;
}

inline std::string Tag(const ReasoningTrace& t, const char* key) {
  auto it = t.tags.find(key);
  return it == t.tags.end() ? std::string() : it->second;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

inline void RunSegment(const GlobalOptions& g, const std::string& in, const std::string& out_path,
                       std::ostream& out) {
  const auto traces = io::ReadTraces(in);
  const TokenCounter counter = TokenCounter::Parse(g.tokenizer);
  SegmentOptions opts;
  opts.max_chunk_tokens = g.max_chunk_tokens;
  const auto records = ParallelMap(traces.size(), detail::Jobs(g, DefaultJobs()), [&](std::size_t i) {
    return io::SegmentRecord(traces[i], SegmentThink(traces[i], counter, opts));
  });
  detail::Emit(out_path, io::ToJsonl(records), out);
}

inline void RunDetect(const GlobalOptions& g, const std::string& in, const std::string& chunks_path,
                      bool use_gold, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto traces = io::ReadTraces(in);
  judge::DetectionOptions opts;
  opts.use_gold = use_gold;
  opts.segment.max_chunk_tokens = g.max_chunk_tokens;
  opts.max_batch_tokens = g.max_batch_tokens;
  opts.counter = TokenCounter::Parse(g.tokenizer);
  const judge::ChatClient client = detail::JudgeClient(g, detail::MockFrom(g));

  std::map<std::string, std::vector<Chunk>> given;
  if (!chunks_path.empty()) {
    const auto index = detail::TraceIndex(traces);
    for (const auto& rec : io::ReadJsonlFile(chunks_path)) {
      const std::string id = rec.at("id").get<std::string>();
      auto it = index.find(id);
      if (it == index.end()) throw StructuralError("chunk record for unknown trace " + id);
      std::vector<Chunk> chunks;
      for (const auto& c : rec.at("chunks")) chunks.push_back(io::ChunkFromJson(c, it->second->think));
      given[id] = std::move(chunks);
    }
  }
  std::vector<Warnings> warnings(traces.size());
  const auto results = ParallelMap(traces.size(), detail::Jobs(g, kNetworkJobs), [&](std::size_t i) {
    const auto& t = traces[i];
    if (!chunks_path.empty()) {
      auto it = given.find(t.id);
      if (it == given.end()) throw StructuralError("no chunk record for trace " + t.id);
      return io::DetectionToJson(judge::DetectOnChunks(t, it->second, client, opts, &warnings[i]));
    }
    return io::DetectionToJson(judge::DetectOverthinking(t, client, opts, &warnings[i]));
  });
  for (const auto& w : warnings) detail::EmitWarnings(w, err);
  detail::Emit(out_path, io::ToJsonl(results), out);
}

struct ReviseArgs {
  std::string in;
  std::string detections;
  std::string strategy = "normal";
  double threshold = 0.25;
  int budget = 0;  // 0: 1000, or 256 with --training
  bool training = false;
  bool passthrough = false;
  std::string out = "-";
};

inline void RunRevise(const GlobalOptions& g, const ReviseArgs& a, std::ostream& out, std::ostream& err) {
  const auto traces = io::ReadTraces(a.in);
  const auto index = detail::TraceIndex(traces);
  const auto detections = detail::ReadDetections(a.detections, index);
  const auto strategy = judge::RevisionStrategy::Parse(a.strategy, a.threshold);
  judge::RevisionOptions opts = a.training ? judge::RevisionOptions::Training() : judge::RevisionOptions::Evaluation();
  if (a.budget > 0) opts.budget_tokens = a.budget;
  opts.counter = TokenCounter::Parse(g.tokenizer);
  const judge::ChatClient client = detail::PolicyClient(g, detail::MockFrom(g));

  std::vector<Warnings> warnings(traces.size());
  const auto results = ParallelMap(traces.size(), detail::Jobs(g, kNetworkJobs), [&](std::size_t i) {
    const auto& t = traces[i];
    std::optional<io::Json> record;
    auto d = detections.find(t.id);
    if (d == detections.end()) {
      if (a.passthrough) record = io::TraceToJson(t);
      return record;
    }
    const auto cut = judge::ChooseTruncation(d->second, strategy, &warnings[i]);
    if (!cut) {
      if (a.passthrough) record = io::TraceToJson(t);
      return record;
    }
    auto outcome = judge::Revise(t, d->second.chunks, *cut, client, opts);
    if (outcome.failed) warnings[i].push_back("trace " + t.id + ": policy returned an empty continuation");
    ReasoningTrace& r = outcome.revised;
    r.id = t.id + "#rev";
    r.tags["origin"] = "revision";
    r.tags["parent"] = t.id;
    r.tags["cut_index"] = std::to_string(outcome.cut_index);
    if (!r.tags.count("qid")) r.tags["qid"] = detail::GroupKey(t);
    record = io::TraceToJson(r);
    return record;
  });
  for (const auto& w : warnings) detail::EmitWarnings(w, err);
  std::vector<io::Json> records;
  for (const auto& r : results) {
    if (r) records.push_back(*r);
  }
  detail::Emit(a.out, io::ToJsonl(records), out);
}

inline void RunSftData(const std::string& in, const std::string& detections_path, const std::string& out_path,
                       std::ostream& out, std::ostream& err) {
  const auto traces = io::ReadTraces(in);
  const auto index = detail::TraceIndex(traces);
  const auto detections = detail::ReadDetections(detections_path, index);
  std::vector<std::pair<ReasoningTrace, judge::DetectionResult>> items;
  for (const auto& t : traces) {
    auto d = detections.find(t.id);
    if (d != detections.end()) items.emplace_back(t, d->second);
  }
  Warnings warnings;
  const auto sft = judge::BuildReflectionSft(items, &warnings);
  detail::EmitWarnings(warnings, err);
  std::vector<io::Json> records;
  for (const auto& r : sft) records.push_back(io::SftToJson(r));
  detail::Emit(out_path, io::ToJsonl(records), out);
}

// Rewards for every trace, grouped by the "qid" tag (or the question text).
inline std::vector<io::RewardRecord> ScoreTraces(const std::vector<ReasoningTrace>& traces,
                                                 const RewardConfig& config, const TokenCounter& counter,
                                                 unsigned jobs) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::string key = detail::GroupKey(traces[i]);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(i);
  }
  const auto scored = ParallelMap(order.size(), jobs, [&](std::size_t k) {
    std::vector<const ReasoningTrace*> members;
    for (std::size_t i : groups.at(order[k])) members.push_back(&traces[i]);
    return ScoreGroup(members, config, counter);
  });
  std::vector<io::RewardRecord> out(traces.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& idx = groups.at(order[k]);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const ReasoningTrace& t = traces[idx[m]];
      io::RewardRecord& r = out[idx[m]];
      r.id = t.id;
      r.reward = scored[k][m].reward;
      r.stats = scored[k][m].stats;
      r.qid = order[k];
      r.dataset = detail::Tag(t, "dataset");
      r.origin = detail::Tag(t, "origin") == "revision" ? Origin::kRevision : Origin::kOriginal;
      r.parent = detail::Tag(t, "parent");
    }
  }
  return out;
}

inline void RunReward(const GlobalOptions& g, const std::string& in, const std::string& out_path,
                      std::ostream& out) {
  const auto traces = io::ReadTraces(in);
  const auto records = ScoreTraces(traces, detail::MakeRewardConfig(g), TokenCounter::Parse(g.tokenizer),
                                   detail::Jobs(g, DefaultJobs()));
  std::vector<io::Json> json;
  for (const auto& r : records) json.push_back(io::RewardToJson(r));
  detail::Emit(out_path, io::ToJsonl(json), out);
}

inline void RunQuantile(const GlobalOptions& g, const std::string& in, bool originals_only,
                        const std::string& out_path, std::ostream& out) {
  const auto records = io::DecodeAll<io::RewardRecord>(io::ReadJsonlFile(in), "reward", io::RewardFromJson);
  std::vector<double> densities;
  for (const auto& r : records) {
    if (!originals_only || r.origin == Origin::kOriginal) densities.push_back(r.stats.density);
  }
  const double dq = CorpusDensityQuantile(densities, g.quantile);
  io::Json j{{"quantile", g.quantile}, {"dq", dq}, {"n", densities.size()}};
  detail::Emit(out_path, j.dump() + "\n", out);
}

inline void RunAdvantage(const std::string& in, const std::string& rewards_path, bool include_dropped,
                         const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto traces = io::ReadTraces(in);
  const auto index = detail::TraceIndex(traces);
  const auto rewards = io::DecodeAll<io::RewardRecord>(io::ReadJsonlFile(rewards_path), "reward", io::RewardFromJson);
  std::vector<SampleGroup> groups;
  std::map<std::string, std::size_t> group_of;
  for (const auto& r : rewards) {
    auto t = index.find(r.id);
    if (t == index.end()) throw StructuralError("reward record for unknown trace " + r.id);
    const std::string qid = r.qid.empty() ? detail::GroupKey(*t->second) : r.qid;
    auto [it, fresh] = group_of.try_emplace(qid, groups.size());
    if (fresh) groups.push_back(SampleGroup{qid, {}, false});
    GroupSample s;
    s.response = *t->second;
    s.origin = r.origin;
    s.parent_id = r.parent;
    s.reward = r.reward;
    groups[it->second].samples.push_back(std::move(s));
  }
  Warnings warnings;
  for (auto& grp : groups) grp = ProcessGroup(std::move(grp), &warnings);
  detail::EmitWarnings(warnings, err);
  std::vector<io::Json> json;
  for (const auto& r : AssembleTrainingBatch(groups, include_dropped)) json.push_back(io::BatchRecordToJson(r));
  detail::Emit(out_path, io::ToJsonl(json), out);
}

struct SimulateArgs {
  std::vector<std::string> variants;
  std::vector<std::uint64_t> seeds;
  int steps = 200;
  std::string out = "-";
  std::string svg_dir;
  std::string summary;
  std::optional<double> dq;
};

inline void RunSimulate(const GlobalOptions& g, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<sim::ExperimentConfig> configs;
  for (const auto& v : a.variants) {
    for (auto seed : a.seeds) {
      sim::ExperimentConfig c;
      c.variant = sim::Variant::Parse(v);
      c.seed = seed;
      c.steps = a.steps;
      c.rewards = detail::MakeRewardConfig(g);
      c.dq = a.dq;
      c.dq_quantile = g.quantile;
      configs.push_back(c);
    }
  }
  std::vector<Warnings> warnings(configs.size());
  const auto runs = ParallelMap(configs.size(), detail::Jobs(g, DefaultJobs()),
                                [&](std::size_t i) { return sim::RunExperiment(configs[i], &warnings[i]); });
  for (const auto& w : warnings) detail::EmitWarnings(w, err);
  std::string csv = sim::TrajectoryCsvHeader();
  std::string summary;
  for (const auto& r : runs) {
    csv += sim::TrajectoryCsv(r, false);
    summary += sim::SummaryLine(r);
  }
  detail::Emit(a.out, csv, out);
  if (!a.summary.empty()) detail::Emit(a.summary, summary, out);
  if (!a.svg_dir.empty()) {
    std::filesystem::create_directories(a.svg_dir);
    for (const auto& r : runs) {
      std::string name = r.variant;
      for (char& c : name) {
        if (c == '+') c = '_';
      }
      io::WriteText((std::filesystem::path(a.svg_dir) / (name + "_seed" + std::to_string(r.seed) + ".svg")).string(),
                    sim::TrajectorySvg(r));
    }
  }
}

inline std::vector<report::ResponseResult> ReadRun(const std::string& path) {
  std::vector<report::ResponseResult> out;
  for (const auto& r : io::DecodeAll<io::RewardRecord>(io::ReadJsonlFile(path), "reward", io::RewardFromJson)) {
    out.push_back({r.dataset.empty() ? std::string("all") : r.dataset, r.reward.accuracy == 1, r.stats.n_token,
                   r.stats.n_reflect});
  }
  return out;
}

inline void RunReport(const std::string& method, const std::string& baseline, const std::string& format,
                      const std::string& out_path, std::ostream& out) {
  const auto rep = report::BuildReport(ReadRun(method), ReadRun(baseline));
  if (format == "csv") {
    detail::Emit(out_path, report::ReportCsv(rep), out);
  } else if (format == "table") {
    detail::Emit(out_path, report::ReportTable(rep), out);
  } else {
    throw UsageError("unknown report format: " + format);
  }
}

// ---------------------------------------------------------------------------
// Dispatch

inline void PrintError(std::ostream& err, const char* code, const std::string& message) {
  err << io::Json{{"error", code}, {"message", message}}.dump() << "\n";
}

inline int Dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Reflection-aware reasoning trace tools"};
  app.name("rea");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value settings file");
  app.allow_config_extras(false);

  GlobalOptions g;
  app.add_option("--jobs", g.jobs, "worker threads (default: CPUs for local stages, 8 for network stages)");
  app.add_option("--tokenizer", g.tokenizer, "unicode-word | chars-div-4 | vocab:<file>")->envname("REA_TOKENIZER");
  app.add_option("--cache-dir", g.cache_dir, "response cache directory")->envname("REA_CACHE_DIR");
  app.add_option("--api-key-env", g.api_key_env, "environment variable holding the API key");
  app.add_option("--judge-url", g.judge_url, "judge base URL (OpenAI-compatible)")->envname("REA_JUDGE_URL");
  app.add_option("--judge-model", g.judge_model, "judge model name")->envname("REA_JUDGE_MODEL");
  app.add_option("--policy-url", g.policy_url, "policy base URL")->envname("REA_POLICY_URL");
  app.add_option("--policy-model", g.policy_model, "policy model name")->envname("REA_POLICY_MODEL");
  app.add_option("--mock", g.mock, "scripted judge/policy fixture instead of HTTP")->check(CLI::ExistingFile);
  app.add_flag("--logprobs", g.logprobs, "request label log-probabilities from the judge");
  app.add_option("--length-variant", g.length_variant, "kimi | refined")
      ->check(CLI::IsMember({"kimi", "refined"}));
  auto* dq_opt = app.add_option("--dq", g.dq, "reflection density threshold")->check(CLI::PositiveNumber);
  app.add_option("--quantile", g.quantile, "density quantile for `quantile` and `simulate`")
      ->check(CLI::Bound(0.0, 1.0));
  app.add_option("--window", g.window, "reflective cluster window in tokens")->check(CLI::PositiveNumber);
  app.add_option("--keywords", g.keywords, "comma-separated reflective keywords");
  app.add_option("--weights", g.weights, "accuracy,length,reflection weights");
  app.add_flag("--reflect-think-only", g.reflect_think_only, "count keywords in the think part only");
  app.add_option("--max-chunk-tokens", g.max_chunk_tokens, "chunk size bound")->check(CLI::PositiveNumber);
  app.add_option("--max-batch-tokens", g.max_batch_tokens, "judge batch size bound")->check(CLI::PositiveNumber);

  std::string in;
  std::string out_path = "-";
  auto add_io = [&](CLI::App* sub, const char* in_help) {
    sub->add_option("--in", in, in_help)->required();
    sub->add_option("--out", out_path, "output path, - for stdout");
  };

  auto* segment = app.add_subcommand("segment", "trace JSONL -> chunk JSONL");
  add_io(segment, "trace JSONL");

  std::string chunks_path;
  bool use_gold = false;
  auto* detect = app.add_subcommand("detect", "traces (+ chunks) -> detection JSONL");
  add_io(detect, "trace JSONL");
  detect->add_option("--chunks", chunks_path, "chunk JSONL from `segment`");
  detect->add_flag("--use-gold", use_gold, "show the gold answer to the judge");

  ReviseArgs rev;
  auto* revise = app.add_subcommand("revise", "traces + detections -> revised traces");
  revise->add_option("--in", rev.in, "trace JSONL")->required();
  revise->add_option("--detections", rev.detections, "detection JSONL")->required();
  revise->add_option("--strategy", rev.strategy, "normal | weak | strong")
      ->check(CLI::IsMember({"normal", "weak", "strong"}));
  revise->add_option("--threshold", rev.threshold, "strong-strategy probability threshold");
  revise->add_option("--budget", rev.budget, "continuation token budget")->check(CLI::PositiveNumber);
  revise->add_flag("--training", rev.training, "training setting: 256-token budget and the 50% cap");
  revise->add_flag("--passthrough", rev.passthrough, "emit unrevisable traces unchanged");
  revise->add_option("--out", rev.out, "output path, - for stdout");

  std::string detections_path;
  auto* sft = app.add_subcommand("sft-data", "traces + detections -> reflection-model SFT JSONL");
  add_io(sft, "trace JSONL");
  sft->add_option("--detections", detections_path, "detection JSONL")->required();

  auto* reward = app.add_subcommand("reward", "traces -> reward JSONL");
  add_io(reward, "trace JSONL");

  bool originals_only = false;
  auto* quantile = app.add_subcommand("quantile", "reward JSONL -> density quantile");
  add_io(quantile, "reward JSONL");
  quantile->add_flag("--originals-only", originals_only, "ignore revision records");

  std::string rewards_path;
  bool include_dropped = false;
  auto* advantage = app.add_subcommand("advantage", "traces + rewards -> training batch JSONL");
  add_io(advantage, "trace JSONL");
  advantage->add_option("--rewards", rewards_path, "reward JSONL")->required();
  advantage->add_flag("--include-dropped", include_dropped, "also emit filtered revisions");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "synthetic training run -> trajectory CSV");
  simulate->add_option("--variant", sim_args.variants, "reward set, e.g. acc, len, rlen+reflect, rlen+reflect+rev")
      ->required();
  simulate->add_option("--seed", sim_args.seeds, "RNG seed (repeatable)")->required();
  simulate->add_option("--steps", sim_args.steps, "training steps")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_args.out, "trajectory CSV, - for stdout");
  simulate->add_option("--svg-dir", sim_args.svg_dir, "write one SVG chart per run here");
  simulate->add_option("--summary", sim_args.summary, "final-evaluation summary file");

  std::string method_path;
  std::string baseline_path;
  std::string format = "table";
  auto* rep = app.add_subcommand("report", "method + baseline reward JSONL -> evaluation report");
  rep->add_option("--method", method_path, "reward JSONL of the method run")->required();
  rep->add_option("--baseline", baseline_path, "reward JSONL of the baseline run")->required();
  rep->add_option("--format", format, "table | csv")->check(CLI::IsMember({"table", "csv"}));
  rep->add_option("--out", out_path, "output path, - for stdout");

  // CLI11 lets the config file win over the environment, so environment
  // values enter as leading arguments unless the flag itself was given.
  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  for (const CLI::Option* opt : app.get_options()) {
    const std::string& env = opt->get_envname();
    const char* value = env.empty() ? nullptr : std::getenv(env.c_str());
    if (value == nullptr || *value == '\0') continue;
    const std::string flag = "--" + opt->get_single_name();
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.starts_with(flag + "=");
    });
    if (!given) args.push_back(flag + "=" + value);
  }

  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    PrintError(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*segment) {
      RunSegment(g, in, out_path, out);
    } else if (*detect) {
      RunDetect(g, in, chunks_path, use_gold, out_path, out, err);
    } else if (*revise) {
      RunRevise(g, rev, out, err);
    } else if (*sft) {
      RunSftData(in, detections_path, out_path, out, err);
    } else if (*reward) {
      RunReward(g, in, out_path, out);
    } else if (*quantile) {
      RunQuantile(g, in, originals_only, out_path, out);
    } else if (*advantage) {
      RunAdvantage(in, rewards_path, include_dropped, out_path, out, err);
    } else if (*simulate) {
      if (dq_opt->count() > 0) sim_args.dq = g.dq;
      RunSimulate(g, sim_args, out, err);
    } else if (*rep) {
      RunReport(method_path, baseline_path, format, out_path, out);
    }
  } catch (const Error& e) {
    PrintError(err, ErrorCodeName(e.code()), e.what());
    const bool usage = e.code() == ErrorCode::kUsage || e.code() == ErrorCode::kConfiguration;
    return usage ? kExitUsage : kExitPipeline;
  } catch (const std::exception& e) {
    PrintError(err, "internal", e.what());
    return kExitPipeline;
  }
  return kExitOk;
}

}  // namespace rea::cli

#endif  // REA_CLI_HPP_
