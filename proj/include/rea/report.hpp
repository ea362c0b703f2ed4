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

// Evaluation metrics: accuracy, token ratio against a baseline run, and the
// average gap between reflective instances, per dataset plus a macro average.

#ifndef REA_REPORT_HPP_
#define REA_REPORT_HPP_

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rea/error.hpp"
#include "rea/rewards.hpp"

namespace rea::report {

inline double Mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// 100 * mean(method) / mean(baseline).
inline double TokenRatio(const std::vector<double>& method_lengths,
                         const std::vector<double>& baseline_lengths) {
  if (method_lengths.empty() || baseline_lengths.empty()) {
    throw DomainError("token ratio needs non-empty length lists");
  }
  const double base = Mean(baseline_lengths);
  if (base == 0.0) throw DomainError("token ratio against a zero-length baseline");
  return 100.0 * Mean(method_lengths) / base;
}

struct ReflectGap {
  double tokens_per_reflection = 0.0;
  bool zero_reflections = false;
};

inline ReflectGap ReflectGapFromCounts(std::size_t n_token, std::size_t n_reflect) {
  return {static_cast<double>(n_token) / static_cast<double>(std::max<std::size_t>(1, n_reflect)),
          n_reflect == 0};
}

inline ReflectGap ReflectGapOf(std::string_view response, const RewardConfig& config,
                               const TokenCounter& counter) {
  const std::size_t n_token = counter.Count(response);
  if (n_token == 0) throw DomainError("reflect gap of an empty response");
  return ReflectGapFromCounts(n_token, CountReflective(response, config, counter).instances);
}

// One evaluated response.
struct ResponseResult {
  std::string dataset;
  bool correct = false;
  std::size_t tokens = 0;
  std::size_t n_reflect = 0;
};

struct ReportRow {
  std::string name;
  double accuracy_percent = 0.0;
  double mean_tokens = 0.0;
  double token_ratio_percent = 0.0;
  double reflect_gap_tokens = 0.0;
  double baseline_accuracy_percent = 0.0;
  double accuracy_delta = 0.0;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  ReportRow macro_average;
};

// Benchmark names in increasing difficulty.
inline const std::array<std::string_view, 6>& DifficultyOrder() {
  static const std::array<std::string_view, 6> order{"gsm8k", "math500", "gaokao23",
                                                     "amc23", "olympiad", "aime24"};
  return order;
}

namespace detail {

inline std::vector<std::string> DatasetOrder(const std::vector<ResponseResult>& run) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& r : run) {
    if (seen.insert(r.dataset).second) order.push_back(r.dataset);
  }
  return order;
}

inline int DifficultyRank(const std::string& name) {
  const std::string lower = text::AsciiLower(name);
  const auto& order = DifficultyOrder();
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == lower) return static_cast<int>(i);
  }
  return -1;
}

struct DatasetStats {
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t tokens = 0;
  std::size_t reflect = 0;
  std::vector<double> lengths;
};

inline std::map<std::string, DatasetStats> Aggregate(const std::vector<ResponseResult>& run) {
  std::map<std::string, DatasetStats> out;
  for (const auto& r : run) {
    auto& s = out[r.dataset];
    ++s.n;
    s.correct += r.correct ? 1 : 0;
    s.tokens += r.tokens;
    s.reflect += r.n_reflect;
    s.lengths.push_back(static_cast<double>(r.tokens));
  }
  return out;
}

}  // namespace detail

inline EvalReport BuildReport(const std::vector<ResponseResult>& method_run,
                              const std::vector<ResponseResult>& baseline_run) {
  const auto method = detail::Aggregate(method_run);
  const auto baseline = detail::Aggregate(baseline_run);
  std::vector<std::string> only_method;
  std::vector<std::string> only_baseline;
  for (const auto& [name, _] : method) {
    if (!baseline.count(name)) only_method.push_back(name);
  }
  for (const auto& [name, _] : baseline) {
    if (!method.count(name)) only_baseline.push_back(name);
  }
  if (!only_method.empty() || !only_baseline.empty()) {
    std::string msg = "dataset mismatch between method and baseline runs;";
    for (const auto& n : only_baseline) msg += " missing in method run: " + n + ";";
    for (const auto& n : only_method) msg += " missing in baseline run: " + n + ";";
    throw StructuralError(msg);
  }
  if (method.empty()) throw DomainError("report over empty runs");

  std::vector<std::string> order = detail::DatasetOrder(method_run);
  const bool all_known = std::all_of(order.begin(), order.end(), [](const std::string& n) {
    return detail::DifficultyRank(n) >= 0;
  });
  if (all_known) {
    std::stable_sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
      return detail::DifficultyRank(a) < detail::DifficultyRank(b);
    });
  }

  EvalReport report;
  for (const auto& name : order) {
    const auto& m = method.at(name);
    const auto& b = baseline.at(name);
    ReportRow row;
    row.name = name;
    row.accuracy_percent = 100.0 * static_cast<double>(m.correct) / static_cast<double>(m.n);
    row.mean_tokens = Mean(m.lengths);
    row.token_ratio_percent = TokenRatio(m.lengths, b.lengths);
    row.reflect_gap_tokens = ReflectGapFromCounts(m.tokens, m.reflect).tokens_per_reflection;
    row.baseline_accuracy_percent = 100.0 * static_cast<double>(b.correct) / static_cast<double>(b.n);
    row.accuracy_delta = row.accuracy_percent - row.baseline_accuracy_percent;
    report.rows.push_back(row);
  }
  ReportRow& avg = report.macro_average;
  avg.name = "Average";
  const auto k = static_cast<double>(report.rows.size());
  for (const auto& r : report.rows) {
    avg.accuracy_percent += r.accuracy_percent / k;
    avg.mean_tokens += r.mean_tokens / k;
    avg.token_ratio_percent += r.token_ratio_percent / k;
    avg.reflect_gap_tokens += r.reflect_gap_tokens / k;
    avg.baseline_accuracy_percent += r.baseline_accuracy_percent / k;
    avg.accuracy_delta += r.accuracy_delta / k;
  }
  return report;
}

namespace detail {

inline std::string Fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::string ReportCsv(const EvalReport& r) {
  std::string out = "dataset,accuracy_percent,mean_tokens,token_ratio_percent,reflect_gap_tokens,"
                    "baseline_accuracy_percent,accuracy_delta\n";
  auto line = [&](const ReportRow& row) {
    out += row.name + "," + detail::Fixed(row.accuracy_percent, 4) + "," +
           detail::Fixed(row.mean_tokens, 4) + "," + detail::Fixed(row.token_ratio_percent, 4) +
           "," + detail::Fixed(row.reflect_gap_tokens, 4) + "," +
           detail::Fixed(row.baseline_accuracy_percent, 4) + "," +
           detail::Fixed(row.accuracy_delta, 4) + "\n";
  };
  for (const auto& row : r.rows) line(row);
  line(r.macro_average);
  return out;
}

// Aligned text table. The TR column carries the mean token count as a
// subscript-style suffix, e.g. "100.00 (1344)".
inline std::string ReportTable(const EvalReport& r) {
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back({"Dataset", "Acc", "dAcc", "TR (tokens)", "Gap"});
  auto add = [&](const ReportRow& row) {
    cells.push_back({row.name, detail::Fixed(row.accuracy_percent),
                     (row.accuracy_delta >= 0 ? "+" : "") + detail::Fixed(row.accuracy_delta),
                     detail::Fixed(row.token_ratio_percent) + " (" + detail::Fixed(row.mean_tokens, 0) + ")",
                     detail::Fixed(row.reflect_gap_tokens, 1)});
  };
  for (const auto& row : r.rows) add(row);
  add(r.macro_average);
  std::array<std::size_t, 5> width{};
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < 5; ++i) width[i] = std::max(width[i], c[i].size());
  }
  std::string out;
  for (std::size_t row = 0; row < cells.size(); ++row) {
    if (row == cells.size() - 1 || row == 1) {
      for (std::size_t i = 0; i < 5; ++i) out += std::string(width[i] + (i ? 2 : 0), '-');
      out += "\n";
    }
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& c = cells[row][i];
      if (i == 0) {
        out += c + std::string(width[i] - c.size(), ' ');
      } else {
        out += "  " + std::string(width[i] - c.size(), ' ') + c;
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace rea::report

#endif  // REA_REPORT_HPP_
