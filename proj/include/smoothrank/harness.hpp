#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smoothrank/dataset.hpp"
#include "smoothrank/metrics.hpp"
#include "smoothrank/ranker.hpp"
#include "smoothrank/survival.hpp"

namespace smoothrank {

/// Repeated random-split evaluation protocol.
struct BenchConfig {
  SplitSpec split;
  double missing_filter = 0.2;
  bool impute = true;
  /// Impute each fold from training rows only instead of the full table before splitting.
  bool impute_train_only = false;
  ImputationConfig imputation;
  TrainConfig train;
  /// Failed draws (no events, degenerate threshold, no predictive feature) are redrawn.
  std::size_t max_attempts = 50;
  Execution exec = Execution::parallel;
};

struct BenchOutcome {
  EvalReport report;
  std::size_t resampled = 0;
  std::size_t dropped_missing_scores = 0;
  std::size_t n_features = 0;  ///< after the sparse-feature filter
};

/// Model trained on a survival table reduced to early / no-early failure classes.
struct SurvivalFit {
  SmoothRankModel model;
  ThresholdResult threshold;
};

SurvivalFit train_survival(const FeatureMatrix& m, std::span<const SurvivalRecord> records,
                           const TrainConfig& cfg = {}, Execution exec = Execution::parallel);

/// Filter + imputation step shared by the benchmarks and the `impute` command.
FeatureMatrix prepare_features(const FeatureMatrix& m, double missing_filter, bool impute,
                               const ImputationConfig& imputation, Execution exec);

/// Test-fold AUC of the model trained on each training fold.
BenchOutcome bench_rank(const FeatureMatrix& m, const BinaryLabels& y, const BenchConfig& cfg);

/// Test-fold Harrell C of the model trained on each reduced training fold.
BenchOutcome bench_surv(const FeatureMatrix& m, std::span<const SurvivalRecord> records,
                        const BenchConfig& cfg);

}  // namespace smoothrank
