#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace smoothrank {

/// Mann-Whitney pair counts. `concordant_halves` counts a won pair as 2 and a tie as 1.
struct PairCounts {
  std::uint64_t concordant_halves = 0;
  std::uint64_t pairs = 0;

  double value() const {
    return static_cast<double>(concordant_halves) / (2.0 * static_cast<double>(pairs));
  }
};

/// Exact AUC counts via rank sums, O(n log n). Labels other than `positive` are negatives.
/// Throws DataError if either class is absent.
PairCounts auc_counts(std::span<const double> scores, std::span<const int> labels,
                      int positive = 1);

double auc(std::span<const double> scores, std::span<const int> labels, int positive = 1);

struct SplitResult {
  std::size_t split = 0;
  double value = 0.0;
  std::size_t features_used = 0;
};

struct EvalReport {
  std::string metric_name;
  std::vector<SplitResult> per_split;
  double mean = 0.0;
  double sd = 0.0;
  double mean_features = 0.0;
};

/// Mean, sample sd (0 for a single value) and mean feature count. Throws DataError when empty.
EvalReport aggregate(std::span<const double> values, std::span<const std::size_t> features_used,
                     std::string metric_name = "AUC");

struct ReportRow {
  std::string dataset;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  EvalReport report;
};

/// Aligned text table: dataset, dimensions, mean metric (mean features used), sd.
std::string render_table(std::span<const ReportRow> rows);
std::string render_csv(std::span<const ReportRow> rows);
/// split,value,features_used
std::string render_splits_csv(const EvalReport& report);

}  // namespace smoothrank
