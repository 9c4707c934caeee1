#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smoothrank/parallel.hpp"
#include "smoothrank/smoothing.hpp"

namespace smoothrank {

class BinaryLabels;

/// Class frequencies; pi1 + pi2 == 1.
struct ClassPriors {
  double pi1 = 0.5;
  double pi2 = 0.5;

  /// Throws DataError unless both counts are positive.
  static ClassPriors from_counts(std::size_t n1, std::size_t n2);
};

struct MarginalConfig {
  LoessConfig loess;
  /// Grid points whose mixture density pi1*g1 + pi2*g2 falls below this are masked.
  double mask_threshold = 0.1;
  /// Fit on z-scored values (training mean and sd of the column) instead of raw units, so the
  /// absolute mask level means the same thing for every feature.
  bool standardize = true;
};

/// Smoothed class-conditional densities of one feature on a shared grid.
struct ClassDensities {
  Grid grid;
  std::vector<double> g1;
  std::vector<double> g2;
  ClassPriors priors;
  double bandwidth = 0.0;
  std::size_t n_used = 0;
  bool dead = false;
};

/// `col` holds one value per row, NaN for missing. A class with fewer than two observed
/// values, or a column with a single distinct value, yields a dead result.
ClassDensities class_densities(std::span<const double> col, const BinaryLabels& labels,
                               const LoessConfig& loess = {},
                               Execution exec = Execution::parallel);

/// (g1 - g2) / (pi1 g1 + pi2 g2), or nullopt where the mixture density is below `threshold`.
std::optional<double> raw_q(double g1, double g2, const ClassPriors& priors,
                            double threshold = 0.1);

/// One feature's fitted curve. Masked grid points hold NaN in raw_q and q_smooth.
struct MarginalPredictor {
  Grid grid;
  std::vector<double> raw_q;
  std::vector<double> q_smooth;
  std::vector<std::uint8_t> mask;  ///< 1 = unusable
  ClassPriors priors;
  std::size_t n_train_used = 0;
  bool dead = true;
  /// Input transform x -> (x - center) / scale applied before grid lookup.
  double center = 0.0;
  double scale = 1.0;

  std::size_t unmasked_count() const;
};

/// A dead predictor with an all-masked grid on [0, 1].
MarginalPredictor dead_predictor(std::size_t n_used = 0);

MarginalPredictor fit_marginal(std::span<const double> col, const BinaryLabels& labels,
                               const MarginalConfig& cfg = {},
                               Execution exec = Execution::parallel);

/// Linear interpolation on the grid; NaN when `x` is NaN, when a bracketing point is masked,
/// or when the predictor is dead. Outside the grid the nearest endpoint is used.
double evaluate(const MarginalPredictor& p, double x);

}  // namespace smoothrank
