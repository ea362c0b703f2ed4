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

// Synthetic policy-gradient harness.
//
// A three-parameter "policy" writes reasoning traces: a body of reasoning
// sentences of about `mean_reason_tokens` tokens, reflective sentences
// inserted with probability `reflect_rate`, an answer statement, and an
// overthinking tail of `overthink_factor` times the body length. Whether the
// first answer is right is drawn from a synthetic accuracy model in which
// reflection helps on hard tasks; reflective tail sentences occasionally
// correct a wrong answer.
//
// Training is parameter-space policy gradient: every sample perturbs the
// parameters with Gaussian noise, the traces go through the real reward and
// group-advantage code, and the parameters move along the advantage-weighted
// mean perturbation. Sequential revision cuts a sample right after its first
// correct answer statement and is credited to the perturbation that would
// have produced that tail length.
//
// All numbers here are synthetic and only meant to expose directional effects
// of the reward design.

#ifndef REA_SIM_HPP_
#define REA_SIM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rea/error.hpp"
#include "rea/grpo.hpp"
#include "rea/rewards.hpp"
#include "rea/tokens.hpp"
#include "rea/trace.hpp"

namespace rea::sim {

// Deterministic across platforms: mt19937_64 output is fully specified and
// the float transforms below avoid the implementation-defined std
// distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::size_t Below(std::size_t n) { return static_cast<std::size_t>(Uniform() * static_cast<double>(n)); }
  bool Bernoulli(double p) { return Uniform() < p; }
  std::uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Tasks

enum class Difficulty { kEasy, kHard };

struct SynthTask {
  std::uint64_t id = 0;
  Difficulty kind = Difficulty::kEasy;
  double difficulty = 0.0;  // easy in [0, 0.3], hard in [0.7, 1]
  long gold_answer = 0;
};

inline long TaskGold(std::uint64_t id) { return static_cast<long>((id * 7919u + 13u) % 1000u); }

inline std::string TaskQuestion(const SynthTask& t) {
  return "Compute (" + std::to_string(t.id) + " * 7919 + 13) mod 1000.";
}

// Largest-remainder apportionment of n among the given proportions.
inline std::vector<std::size_t> Apportion(std::size_t n, const std::vector<double>& proportions) {
  double total = 0.0;
  for (double p : proportions) {
    if (p < 0.0 || !std::isfinite(p)) throw ConfigurationError("mix proportions must be >= 0");
    total += p;
  }
  if (!(total > 0.0)) throw ConfigurationError("mix proportions must not all be zero");
  std::vector<std::size_t> counts(proportions.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < proportions.size(); ++i) {
    const double exact = static_cast<double>(n) * proportions[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.push_back({exact - std::floor(exact), i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

struct DifficultyMix {
  double easy = 0.5;
  double hard = 0.5;
};

inline std::vector<SynthTask> GenerateTasks(std::uint64_t seed, std::size_t n, DifficultyMix mix = {}) {
  if (n == 0) throw DomainError("generate_tasks needs n >= 1");
  const auto counts = Apportion(n, {mix.easy, mix.hard});
  Rng rng(seed ^ 0x7a5c0ffee1234567ULL);
  std::vector<SynthTask> tasks;
  tasks.reserve(n);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < counts[k]; ++i) {
      SynthTask t;
      t.id = rng.Next() % 1000000007ULL;
      t.kind = k == 0 ? Difficulty::kEasy : Difficulty::kHard;
      t.difficulty = k == 0 ? 0.3 * rng.Uniform() : 0.7 + 0.3 * rng.Uniform();
      t.gold_answer = TaskGold(t.id);
      tasks.push_back(t);
    }
  }
  for (std::size_t i = tasks.size(); i > 1; --i) std::swap(tasks[i - 1], tasks[rng.Below(i)]);
  return tasks;
}

// ---------------------------------------------------------------------------
// Policy and accuracy model

struct SimPolicyParams {
  double mean_reason_tokens = 600.0;
  double reflect_rate = 0.15;
  double overthink_factor = 0.6;

  void Normalize() {
    mean_reason_tokens = std::clamp(mean_reason_tokens, 30.0, 8000.0);
    reflect_rate = std::clamp(reflect_rate, 0.0, 1.0);
    overthink_factor = std::clamp(overthink_factor, 0.0, 5.0);
  }
  bool Finite() const {
    return std::isfinite(mean_reason_tokens) && std::isfinite(reflect_rate) &&
           std::isfinite(overthink_factor);
  }
};

struct AccuracyModel {
  double base = 0.35;
  double gain_per_reflection_hard = 0.08;
  double gain_per_reflection_easy = 0.01;
  double reflection_saturation = 4.0;  // reflections beyond ~this add little
  double gain_per_log_token = 0.12;    // per natural-log unit of reasoning tokens over 100
  double difficulty_penalty = 0.55;
  double tail_fix_probability_hard = 0.01;  // per reflective tail sentence
  double tail_fix_probability_easy = 0.02;

  double Probability(const SynthTask& task, std::size_t reflections, double body_tokens) const {
    const double gain = task.kind == Difficulty::kHard ? gain_per_reflection_hard
                                                      : gain_per_reflection_easy;
    const double sat = reflection_saturation *
                       (1.0 - std::exp(-static_cast<double>(reflections) / reflection_saturation));
    const double p = base + gain * sat +
                     gain_per_log_token * std::log(std::max(body_tokens, 1.0) / 100.0) -
                     difficulty_penalty * task.difficulty;
    return std::clamp(p, 0.01, 0.99);
  }
};

struct SimConfig {
  AccuracyModel accuracy;
  int token_budget = 2048;  // generations longer than this lose their answer
  double length_noise = 0.3;  // log-normal spread of body length
};

// Everything the harness knows about one synthetic generation.
struct SimSample {
  ReasoningTrace trace;
  bool correct = false;
  bool truncated = false;
  std::size_t body_reflections = 0;
  std::size_t body_tokens = 0;
  // End offset in `think` of the first correct answer statement, if any, and
  // how many tail tokens precede it (0 when the first answer was correct).
  std::optional<std::size_t> first_correct_end;
  std::size_t tail_tokens_before_correct = 0;
  std::size_t tail_tokens = 0;
};

namespace detail {

inline constexpr std::array<std::string_view, 28> kFiller{
    "the",   "value",  "of",     "term",   "we",     "compute", "sum",
    "so",    "then",   "next",   "step",   "gives",  "equals",  "number",
    "product", "times", "plus",  "minus",  "result", "first",   "second",
    "carry", "digit",  "factor", "apply",  "rule",   "modulo",  "remainder"};

inline constexpr std::array<std::string_view, 4> kReflective{
    "Wait, let me verify this step once more.",
    "But I should recompute the previous product.",
    "Alternatively, the remainder can be found directly.",
    "Let me check the carry in that digit."};

inline constexpr std::array<std::string_view, 3> kTailNeutral{
    "Recomputing the remainder gives the same value.",
    "The product modulo one thousand is unchanged.",
    "So the earlier value stands."};

inline std::string Sentence(Rng& rng, const TokenCounter& counter, std::size_t& tokens) {
  const std::size_t words = 10 + rng.Below(9);
  std::string s;
  for (std::size_t w = 0; w < words; ++w) {
    std::string_view word = kFiller[rng.Below(kFiller.size())];
    if (w == 0) {
      s.push_back(static_cast<char>(word[0] - 'a' + 'A'));
      s.append(word.substr(1));
    } else {
      s.push_back(' ');
      s.append(word);
    }
  }
  s.push_back('.');
  tokens += counter.Count(s);
  return s;
}

// Appends `sentence` to `out`, starting a new paragraph every few sentences.
inline void Append(std::string& out, std::string_view sentence, std::size_t& in_paragraph, Rng& rng) {
  if (!out.empty()) {
    if (in_paragraph >= 3 + rng.Below(3)) {
      out += "\n\n";
      in_paragraph = 0;
    } else {
      out += " ";
    }
  }
  out += sentence;
  ++in_paragraph;
}

inline long WrongAnswer(long gold, Rng& rng) { return (gold + 1 + static_cast<long>(rng.Below(9))) % 1000; }

// Cuts `think` after its first `budget` tokens.
inline std::string TruncateTokens(const std::string& think, std::size_t budget, const TokenCounter& counter) {
  const auto spans = counter.Spans(think);
  if (spans.size() <= budget) return think;
  return think.substr(0, spans[budget - 1].end);
}

}  // namespace detail

inline SimSample SampleTrace(const SimPolicyParams& params, const SynthTask& task, Rng& rng,
                             const SimConfig& config = {}, const TokenCounter& counter = {}) {
  SimSample out;
  const double target = std::max(
      20.0, params.mean_reason_tokens *
                std::exp(config.length_noise * rng.Normal() - 0.5 * config.length_noise * config.length_noise));
  std::string think = "\n";
  std::string body;
  std::size_t in_paragraph = 0;
  std::size_t tokens = 0;
  bool first = true;
  // `target` counts plain reasoning sentences only; each reflection round
  // (a reflective sentence plus a re-derivation) comes on top of it.
  std::size_t reasoning = 0;
  while (static_cast<double>(reasoning) < target) {
    if (!first && rng.Bernoulli(params.reflect_rate)) {
      const std::string_view r = detail::kReflective[rng.Below(detail::kReflective.size())];
      tokens += counter.Count(r);
      detail::Append(body, r, in_paragraph, rng);
      detail::Append(body, detail::Sentence(rng, counter, tokens), in_paragraph, rng);
      ++out.body_reflections;
    }
    const std::size_t before = tokens;
    detail::Append(body, detail::Sentence(rng, counter, tokens), in_paragraph, rng);
    reasoning += tokens - before;
    first = false;
  }
  out.body_tokens = tokens;

  const double p = config.accuracy.Probability(task, out.body_reflections, static_cast<double>(reasoning));
  bool answer_correct = rng.Bernoulli(p);
  long answer = answer_correct ? task.gold_answer : detail::WrongAnswer(task.gold_answer, rng);
  think += body;
  think += "\n\nSo the answer is " + std::to_string(answer) + ".";
  if (answer_correct) out.first_correct_end = think.size();

  // Overthinking tail.
  const double tail_target = params.overthink_factor * static_cast<double>(tokens);
  std::size_t tail = 0;
  in_paragraph = 99;
  std::string tail_text;
  const double fix_p = task.kind == Difficulty::kHard ? config.accuracy.tail_fix_probability_hard
                                                      : config.accuracy.tail_fix_probability_easy;
  while (static_cast<double>(tail) < tail_target) {
    std::string_view s;
    const bool reflective = rng.Bernoulli(params.reflect_rate);
    if (reflective) {
      s = detail::kReflective[rng.Below(detail::kReflective.size())];
    } else {
      s = detail::kTailNeutral[rng.Below(detail::kTailNeutral.size())];
    }
    tail += counter.Count(s);
    detail::Append(tail_text, s, in_paragraph, rng);
    if (reflective && !answer_correct && rng.Bernoulli(fix_p)) {
      answer_correct = true;
      answer = task.gold_answer;
      const std::string fix = "So the answer is actually " + std::to_string(answer) + ".";
      tail += counter.Count(fix);
      detail::Append(tail_text, fix, in_paragraph, rng);
      out.first_correct_end = think.size() + 2 + tail_text.size();
      out.tail_tokens_before_correct = tail;
    }
  }
  if (!tail_text.empty()) think += "\n\n" + tail_text;
  think += "\n";
  out.tail_tokens = tail;

  ReasoningTrace& t = out.trace;
  t.question = TaskQuestion(task);
  t.gold_answer = std::to_string(task.gold_answer);
  t.answer = "\n\n**Final Answer:** \\boxed{" + std::to_string(answer) + "}";
  const auto budget = static_cast<std::size_t>(config.token_budget);
  if (counter.Count(think) + counter.Count(t.answer) > budget) {
    think = detail::TruncateTokens(think, budget, counter);
    t.answer.clear();
    out.truncated = true;
    if (out.first_correct_end && *out.first_correct_end > think.size()) out.first_correct_end.reset();
  }
  t.think = std::move(think);
  out.correct = !out.truncated && answer_correct;
  return out;
}

// Cuts the sample after its first correct answer statement and forces the
// final answer. Returns nullopt when no correct statement exists.
inline std::optional<SimSample> ReviseSample(const SimSample& s) {
  if (!s.first_correct_end) return std::nullopt;
  SimSample r = s;
  r.trace.think = s.trace.think.substr(0, *s.first_correct_end);
  r.trace.answer = " **Final Answer:** \\boxed{" + *s.trace.gold_answer + "}";
  r.correct = true;
  r.truncated = false;
  r.tail_tokens = s.tail_tokens_before_correct;
  return r;
}

// ---------------------------------------------------------------------------
// Policy update

// Per-coordinate perturbation scales: log(mean tokens), reflect rate, overthink.
struct PerturbationScale {
  double log_mean_tokens = 0.10;
  double reflect_rate = 0.04;
  double overthink = 0.10;
};

using Noise = std::array<double, 3>;

struct PerturbedSample {
  Noise noise{};
  double advantage = 0.0;
};

inline SimPolicyParams Perturb(const SimPolicyParams& p, const Noise& eps, const PerturbationScale& s) {
  SimPolicyParams q;
  q.mean_reason_tokens = p.mean_reason_tokens * std::exp(s.log_mean_tokens * eps[0]);
  q.reflect_rate = p.reflect_rate + s.reflect_rate * eps[1];
  q.overthink_factor = p.overthink_factor + s.overthink * eps[2];
  q.Normalize();
  return q;
}

// theta_k += lr * scale_k * mean_i(advantage_i * noise_ik).
inline SimPolicyParams PolicyUpdate(const SimPolicyParams& params, const std::vector<PerturbedSample>& batch,
                                    double learning_rate, const PerturbationScale& scale = {},
                                    Warnings* warnings = nullptr) {
  if (batch.empty()) throw DomainError("policy update needs a non-empty batch");
  Noise g{0.0, 0.0, 0.0};
  for (const auto& s : batch) {
    for (std::size_t k = 0; k < 3; ++k) g[k] += s.advantage * s.noise[k];
  }
  for (double& v : g) v /= static_cast<double>(batch.size());
  SimPolicyParams next = params;
  next.mean_reason_tokens = params.mean_reason_tokens * std::exp(learning_rate * scale.log_mean_tokens * g[0]);
  next.reflect_rate = params.reflect_rate + learning_rate * scale.reflect_rate * g[1];
  next.overthink_factor = params.overthink_factor + learning_rate * scale.overthink * g[2];
  if (!next.Finite()) {
    Warn(warnings, "non-finite policy update rejected");
    return params;
  }
  next.Normalize();
  return next;
}

// ---------------------------------------------------------------------------
// Experiments

struct Variant {
  bool length = false;
  LengthVariant length_kind = LengthVariant::kKimi;
  bool reflect = false;
  bool revision = false;

  // "acc", "len", "rlen", "rlen+reflect", "len+reflect", "reflect", each
  // optionally with "+rev".
  static Variant Parse(std::string_view s) {
    Variant v;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t plus = s.find('+', start);
      const std::string_view part = s.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
      if (part == "acc") {
      } else if (part == "len") {
        v.length = true;
        v.length_kind = LengthVariant::kKimi;
      } else if (part == "rlen") {
        v.length = true;
        v.length_kind = LengthVariant::kRefined;
      } else if (part == "reflect") {
        v.reflect = true;
      } else if (part == "rev") {
        v.revision = true;
      } else {
        throw ConfigurationError("unknown simulator variant component: '" + std::string(part) + "'");
      }
      if (plus == std::string_view::npos) break;
      start = plus + 1;
    }
    return v;
  }

  std::string Name() const {
    std::string n = "acc";
    if (length) n += length_kind == LengthVariant::kKimi ? "+len" : "+rlen";
    if (reflect) n += "+reflect";
    if (revision) n += "+rev";
    return n;
  }
};

struct ExperimentConfig {
  Variant variant;
  int steps = 200;
  std::uint64_t seed = 0;
  std::size_t tasks_per_step = 8;
  std::size_t group_size = 4;
  std::size_t train_pool = 256;
  std::size_t eval_tasks = 200;
  double learning_rate = 0.6;
  PerturbationScale scale;
  SimPolicyParams initial;
  SimConfig sim;
  RewardConfig rewards;       // length variant and weights are set from the variant
  std::optional<double> dq;   // default: 0.2 quantile of initial-policy densities
  double dq_quantile = 0.2;
  std::size_t calibration_samples = 256;
};

struct StepMetrics {
  int step = 0;
  double accuracy_easy = 0.0;
  double accuracy_hard = 0.0;
  double mean_tokens = 0.0;
  double reflect_density = 0.0;
  double frac_below_dq = 0.0;
  SimPolicyParams params;
};

struct TrainingTrajectory {
  std::string variant;
  std::uint64_t seed = 0;
  double dq = 0.0;
  std::vector<StepMetrics> steps;
  StepMetrics final_eval;  // unperturbed final policy on held-out tasks
  SimPolicyParams final_params;
};

namespace detail {

struct Tally {
  std::size_t easy_n = 0, easy_ok = 0, hard_n = 0, hard_ok = 0, below = 0;
  double tokens = 0.0, density = 0.0;
  std::size_t n = 0;

  void Add(const SynthTask& task, const SimSample& s, const ReflectionStats& stats, double dq) {
    if (task.kind == Difficulty::kEasy) {
      ++easy_n;
      easy_ok += s.correct ? 1 : 0;
    } else {
      ++hard_n;
      hard_ok += s.correct ? 1 : 0;
    }
    tokens += static_cast<double>(stats.n_token);
    density += stats.density;
    below += stats.density < dq ? 1 : 0;
    ++n;
  }

  StepMetrics Metrics(int step, const SimPolicyParams& params) const {
    StepMetrics m;
    m.step = step;
    m.accuracy_easy = easy_n ? static_cast<double>(easy_ok) / static_cast<double>(easy_n) : 0.0;
    m.accuracy_hard = hard_n ? static_cast<double>(hard_ok) / static_cast<double>(hard_n) : 0.0;
    m.mean_tokens = n ? tokens / static_cast<double>(n) : 0.0;
    m.reflect_density = n ? density / static_cast<double>(n) : 0.0;
    m.frac_below_dq = n ? static_cast<double>(below) / static_cast<double>(n) : 0.0;
    m.params = params;
    return m;
  }
};

}  // namespace detail

inline RewardConfig VariantRewards(const ExperimentConfig& cfg, double dq) {
  RewardConfig r = cfg.rewards;
  r.length_variant = cfg.variant.length_kind;
  r.weights = {1.0, cfg.variant.length ? 1.0 : 0.0, cfg.variant.reflect ? 1.0 : 0.0};
  r.density_threshold = dq;
  return r;
}

inline TrainingTrajectory RunExperiment(const ExperimentConfig& cfg, Warnings* warnings = nullptr) {
  if (cfg.steps < 1) throw DomainError("run_experiment needs steps >= 1");
  if (cfg.group_size < 2) throw DomainError("group size must be at least 2");
  const TokenCounter counter;
  TrainingTrajectory traj;
  traj.variant = cfg.variant.Name();
  traj.seed = cfg.seed;

  const auto pool = GenerateTasks(cfg.seed, cfg.train_pool);
  const auto eval = GenerateTasks(cfg.seed ^ 0x9e3779b97f4a7c15ULL, cfg.eval_tasks);
  Rng rng(cfg.seed * 0x2545F4914F6CDD1DULL + 1);

  // Density threshold from the initial policy, as a corpus quantile.
  double dq = 0.0;
  if (cfg.dq) {
    dq = *cfg.dq;
  } else {
    Rng cal(cfg.seed + 0xC0FFEEULL);
    std::vector<double> densities;
    for (std::size_t i = 0; i < cfg.calibration_samples; ++i) {
      const auto s = SampleTrace(cfg.initial, pool[i % pool.size()], cal, cfg.sim, counter);
      densities.push_back(MeasureReflection(s.trace, cfg.rewards, counter).density);
    }
    dq = CorpusDensityQuantile(densities, cfg.dq_quantile);
    if (!(dq > 0.0)) dq = kDensityQuantile20;
  }
  traj.dq = dq;
  const RewardConfig rewards = VariantRewards(cfg, dq);

  SimPolicyParams theta = cfg.initial;
  theta.Normalize();
  for (int step = 0; step < cfg.steps; ++step) {
    detail::Tally tally;
    std::vector<PerturbedSample> batch;
    for (std::size_t q = 0; q < cfg.tasks_per_step; ++q) {
      const SynthTask& task = pool[rng.Below(pool.size())];
      SampleGroup group;
      group.question_id = std::to_string(task.id);
      std::vector<Noise> noises;
      std::vector<SimSample> samples;
      for (std::size_t g = 0; g < cfg.group_size; ++g) {
        Noise eps{rng.Normal(), rng.Normal(), rng.Normal()};
        const SimPolicyParams local = Perturb(theta, eps, cfg.scale);
        SimSample s = SampleTrace(local, task, rng, cfg.sim, counter);
        s.trace.id = "s" + std::to_string(g);
        samples.push_back(std::move(s));
        noises.push_back(eps);
      }
      if (cfg.variant.revision) {
        const std::size_t g_count = samples.size();
        for (std::size_t g = 0; g < g_count; ++g) {
          auto rev = ReviseSample(samples[g]);
          if (!rev) continue;
          rev->trace.id = samples[g].trace.id + "r";
          // Credit the revision to the overthink factor that yields its
          // shortened tail.
          Noise eps = noises[g];
          const double body = std::max<double>(1.0, static_cast<double>(samples[g].body_tokens));
          const double omega_eff = static_cast<double>(rev->tail_tokens) / body;
          eps[2] = std::clamp((omega_eff - theta.overthink_factor) / cfg.scale.overthink, -3.0, 3.0);
          samples.push_back(std::move(*rev));
          noises.push_back(eps);
        }
      }
      std::vector<const ReasoningTrace*> traces;
      for (const auto& s : samples) traces.push_back(&s.trace);
      const auto scored = ScoreGroup(traces, rewards, counter);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        GroupSample gs;
        gs.response = samples[i].trace;
        gs.reward = scored[i].reward;
        if (i >= cfg.group_size) {
          gs.origin = Origin::kRevision;
          gs.parent_id = samples[i].trace.id.substr(0, samples[i].trace.id.size() - 1);
        }
        group.samples.push_back(std::move(gs));
        if (i < cfg.group_size) tally.Add(task, samples[i], scored[i].stats, dq);
      }
      group = ProcessGroup(std::move(group), nullptr);
      if (group.skipped) continue;
      for (std::size_t i = 0; i < group.samples.size(); ++i) {
        const auto& gs = group.samples[i];
        if (gs.surviving() && gs.advantage) batch.push_back({noises[i], *gs.advantage});
      }
    }
    traj.steps.push_back(tally.Metrics(step, theta));
    if (!batch.empty()) theta = PolicyUpdate(theta, batch, cfg.learning_rate, cfg.scale, warnings);
  }

  traj.final_params = theta;
  Rng eval_rng(cfg.seed ^ 0xE7A1ULL);
  detail::Tally tally;
  for (const auto& task : eval) {
    const auto s = SampleTrace(theta, task, eval_rng, cfg.sim, counter);
    tally.Add(task, s, MeasureReflection(s.trace, rewards, counter), dq);
  }
  traj.final_eval = tally.Metrics(cfg.steps, theta);
  return traj;
}

// ---------------------------------------------------------------------------
// Output

inline std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string TrajectoryCsvHeader() {
  return "step,variant,seed,accuracy_easy,accuracy_hard,mean_tokens,reflect_density,frac_below_dq\n";
}

inline std::string TrajectoryCsv(const TrainingTrajectory& t, bool header = true) {
  std::string out = header ? TrajectoryCsvHeader() : std::string();
  auto row = [&](const std::string& step, const StepMetrics& m) {
    out += step + "," + t.variant + "," + std::to_string(t.seed) + "," + Num(m.accuracy_easy) + "," +
           Num(m.accuracy_hard) + "," + Num(m.mean_tokens) + "," + Num(m.reflect_density) + "," +
           Num(m.frac_below_dq) + "\n";
  };
  for (const auto& m : t.steps) row(std::to_string(m.step), m);
  return out;
}

inline std::string SummaryLine(const TrainingTrajectory& t) {
  const auto& f = t.final_eval;
  return "variant=" + t.variant + " seed=" + std::to_string(t.seed) + " dq=" + Num(t.dq) +
         " final: accuracy_easy=" + Num(f.accuracy_easy) + " accuracy_hard=" + Num(f.accuracy_hard) +
         " mean_tokens=" + Num(f.mean_tokens) + " reflect_density=" + Num(f.reflect_density) +
         " frac_below_dq=" + Num(f.frac_below_dq) + " params=(" + Num(t.final_params.mean_reason_tokens) +
         "," + Num(t.final_params.reflect_rate) + "," + Num(t.final_params.overthink_factor) + ")\n";
}

// Two-panel line chart: mean tokens (top) and easy/hard accuracy (bottom).
inline std::string TrajectorySvg(const TrainingTrajectory& t) {
  const double w = 640, h = 420, pad = 40, panel = (h - 3 * pad) / 2;
  const auto n = t.steps.size();
  double max_tok = 1.0;
  for (const auto& m : t.steps) max_tok = std::max(max_tok, m.mean_tokens);
  auto x = [&](std::size_t i) { return pad + (w - 2 * pad) * (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0); };
  auto line = [&](auto value, double top, double scale, const char* color) {
    std::string pts;
    for (std::size_t i = 0; i < n; ++i) {
      pts += Num(x(i)) + "," + Num(top + panel - panel * value(t.steps[i]) / scale) + " ";
    }
    return std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
  };
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(w) + "\" height=\"" + Num(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + Num(pad) + "\" y=\"20\" font-size=\"13\">" + t.variant + " seed " + std::to_string(t.seed) +
         ": mean tokens (max " + Num(max_tok) + ")</text>\n";
  svg += "<rect x=\"" + Num(pad) + "\" y=\"" + Num(pad) + "\" width=\"" + Num(w - 2 * pad) + "\" height=\"" + Num(panel) +
         "\" fill=\"none\" stroke=\"#999\"/>\n";
  svg += line([](const StepMetrics& m) { return m.mean_tokens; }, pad, max_tok, "#1f77b4");
  const double top2 = 2 * pad + panel;
  svg += "<text x=\"" + Num(pad) + "\" y=\"" + Num(top2 - 8) + "\" font-size=\"13\">accuracy easy (green) / hard (red)</text>\n";
  svg += "<rect x=\"" + Num(pad) + "\" y=\"" + Num(top2) + "\" width=\"" + Num(w - 2 * pad) + "\" height=\"" + Num(panel) +
         "\" fill=\"none\" stroke=\"#999\"/>\n";
  svg += line([](const StepMetrics& m) { return m.accuracy_easy; }, top2, 1.0, "#2ca02c");
  svg += line([](const StepMetrics& m) { return m.accuracy_hard; }, top2, 1.0, "#d62728");
  svg += "</svg>\n";
  return svg;
}

}  // namespace rea::sim

#endif  // REA_SIM_HPP_
