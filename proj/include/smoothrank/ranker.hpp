#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothrank/dataset.hpp"
#include "smoothrank/marginal.hpp"
#include "smoothrank/parallel.hpp"

namespace smoothrank {

struct TrainConfig {
  MarginalConfig marginal;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string source;
};

struct SmoothRankModel {
  std::vector<MarginalPredictor> predictors;
  std::vector<double> raw_weights;  ///< AUC - 0.5 clamped at 0, before post-filtering
  std::vector<double> weights;
  ClassPriors priors;
  std::vector<std::string> feature_names;
  std::optional<LabelMapping> label_mapping;
  std::vector<CategoricalCoding> codings;
  TrainConfig config;
  Provenance provenance;

  std::size_t n_features() const { return predictors.size(); }
  std::size_t features_used() const;
};

/// max(AUC(q(x), y) - 0.5, 0) over rows where the predictor is defined; 0 for dead predictors
/// or when a class has no evaluated row.
double compute_weight(const MarginalPredictor& p, std::span<const double> col,
                      const BinaryLabels& labels);

/// Zeroes every weight not strictly above max/3. Throws DataError("no predictive features")
/// when all weights are 0.
std::vector<double> post_filter(std::span<const double> weights);

/// Short digest of the training configuration, stored in model provenance.
std::string config_digest(const TrainConfig& cfg);

/// Fits one predictor per column, in parallel across columns when `exec` is parallel.
SmoothRankModel train(const FeatureMatrix& m, const BinaryLabels& y, const TrainConfig& cfg = {},
                      Execution exec = Execution::parallel);

/// Weighted mean of the defined predictor values; NaN when nothing contributes.
/// Throws DataError on a column-count mismatch.
double score(const SmoothRankModel& model, std::span<const double> row);

std::vector<double> score_rows(const SmoothRankModel& model, const FeatureMatrix& m,
                               Execution exec = Execution::parallel);

}  // namespace smoothrank
