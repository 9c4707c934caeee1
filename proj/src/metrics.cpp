#include "smoothrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <fmt/format.h>

#include "smoothrank/error.hpp"

namespace smoothrank {

PairCounts auc_counts(std::span<const double> scores, std::span<const int> labels,
                      int positive) {
  if (scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("auc: missing score");
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t n_pos = 0;
  std::uint64_t n_neg = 0;
  std::uint64_t halves = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == positive ? pos : neg) += 1;
      ++j;
    }
    // Positives in this tie group beat every negative below it and tie with the ones inside.
    halves += pos * (2 * n_neg + neg);
    n_pos += pos;
    n_neg += neg;
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");
  return {halves, n_pos * n_neg};
}

double auc(std::span<const double> scores, std::span<const int> labels, int positive) {
  return auc_counts(scores, labels, positive).value();
}

EvalReport aggregate(std::span<const double> values, std::span<const std::size_t> features_used,
                     std::string metric_name) {
  if (values.empty()) throw DataError("aggregate: no values");
  if (features_used.size() != values.size()) {
    throw DataError("aggregate: values and feature counts differ in length");
  }
  EvalReport r;
  r.metric_name = std::move(metric_name);
  const auto n = static_cast<double>(values.size());
  double features = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    r.per_split.push_back({i, values[i], features_used[i]});
    features += static_cast<double>(features_used[i]);
  }
  const bool constant =
      std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
  r.mean = constant ? values.front() : std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1 && !constant) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / (n - 1.0));
  }
  r.mean_features = features / n;
  return r;
}

std::string render_table(std::span<const ReportRow> rows) {
  std::size_t name_w = 7;
  for (const auto& row : rows) name_w = std::max(name_w, row.dataset.size());
  const std::string metric = rows.empty() ? "metric" : rows.front().report.metric_name;

  std::string out = fmt::format("{:<{}}  {:>11}  {:>18}  {:>6}  {:>6}\n", "dataset", name_w,
                                "dimensions", fmt::format("mean {} (feat.)", metric), "sd",
                                "splits");
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += fmt::format("{:<{}}  {:>11}  {:>18}  {:>6.3f}  {:>6}\n", row.dataset, name_w,
                       fmt::format("{} X {}", row.n_rows, row.n_cols),
                       fmt::format("{:.2f} ({:.1f})", r.mean, r.mean_features), r.sd,
                       r.per_split.size());
  }
  return out;
}

std::string render_csv(std::span<const ReportRow> rows) {
  std::string out = "dataset,n_rows,n_cols,metric,mean,sd,mean_features,n_splits\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += fmt::format("{},{},{},{},{:.17g},{:.17g},{:.17g},{}\n", row.dataset, row.n_rows,
                       row.n_cols, r.metric_name, r.mean, r.sd, r.mean_features,
                       r.per_split.size());
  }
  return out;
}

std::string render_splits_csv(const EvalReport& report) {
  std::string out = "split,value,features_used\n";
  for (const auto& s : report.per_split) {
    out += fmt::format("{},{:.17g},{}\n", s.split, s.value, s.features_used);
  }
  return out;
}

}  // namespace smoothrank
