#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smoothrank/parallel.hpp"

namespace smoothrank {

struct SurvivalRecord {
  double time = 0.0;  ///< > 0
  int event = 0;      ///< 1 failure observed, 0 right-censored
};

struct ThresholdResult {
  double threshold = 0.0;
  std::size_t early = 0;     ///< L: events at or before the threshold
  std::size_t late = 0;      ///< H: times beyond the threshold
  std::size_t imbalance = 0; ///< |L - H|
  std::vector<std::size_t> excluded;  ///< censored at or before the threshold
};

/// Event time minimising |L - H|, smallest time on ties. Throws DataError without events.
ThresholdResult select_threshold(std::span<const SurvivalRecord> records);

enum class DerivedClass { early_failure, no_early_failure, excluded };

struct DerivedClasses {
  std::vector<DerivedClass> assignment;

  std::vector<std::size_t> kept_rows() const;
  /// Labels of kept rows: early failure = 1, no early failure = 2.
  std::vector<int> labels() const;
};

/// Throws DataError ("degenerate threshold") if either class is empty.
DerivedClasses derive_classes(std::span<const SurvivalRecord> records, double threshold);

struct ConcordanceResult {
  std::uint64_t concordant_halves = 0;
  std::uint64_t comparable = 0;
  std::size_t dropped_missing = 0;

  double value() const {
    return static_cast<double>(concordant_halves) / (2.0 * static_cast<double>(comparable));
  }
};

/// Harrell's C. Comparable pairs have t_i < t_j with an event at t_i. NaN scores are dropped
/// and counted. Throws DataError when no pair is comparable.
ConcordanceResult harrell_counts(std::span<const SurvivalRecord> records,
                                 std::span<const double> scores,
                                 bool higher_score_means_earlier_failure = true,
                                 Execution exec = Execution::parallel);

double harrell_cindex(std::span<const SurvivalRecord> records, std::span<const double> scores,
                      bool higher_score_means_earlier_failure = true,
                      Execution exec = Execution::parallel);

}  // namespace smoothrank
