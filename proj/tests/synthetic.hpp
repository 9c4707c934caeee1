#pragma once

// Seeded synthetic data shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "smoothrank/dataset.hpp"
#include "smoothrank/survival.hpp"

namespace synthetic {

struct Classified {
  smoothrank::FeatureMatrix x;
  smoothrank::BinaryLabels y;
};

/// Column 0 separates the classes (class 1 in [0,1], class 2 in [10,11]); the other columns
/// are standard normal noise.
inline Classified separable(std::size_t n, std::size_t noise_cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t cols = 1 + noise_cols;
  std::vector<double> cells;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : 2;
    labels.push_back(label);
    cells.push_back((label == 1 ? 0.0 : 10.0) + unit(rng));
    for (std::size_t c = 0; c < noise_cols; ++c) cells.push_back(normal(rng));
  }
  return {smoothrank::FeatureMatrix(n, cols, std::move(cells)),
          smoothrank::BinaryLabels(std::move(labels))};
}

/// Features and labels drawn independently.
inline Classified null_data(std::size_t n, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> cells;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(coin(rng) ? 1 : 2);
    for (std::size_t c = 0; c < cols; ++c) cells.push_back(normal(rng));
  }
  return {smoothrank::FeatureMatrix(n, cols, std::move(cells)),
          smoothrank::BinaryLabels(std::move(labels))};
}

/// Class 1 ~ N(shift, 1), class 2 ~ N(0, 1) in every column.
inline Classified shifted(std::size_t n, std::size_t cols, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> cells;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : 2;
    labels.push_back(label);
    for (std::size_t c = 0; c < cols; ++c) cells.push_back(normal(rng) + (label == 1 ? shift : 0.0));
  }
  return {smoothrank::FeatureMatrix(n, cols, std::move(cells)),
          smoothrank::BinaryLabels(std::move(labels))};
}

/// Random survival records with ties on a coarse time grid and ~30% censoring.
inline std::vector<smoothrank::SurvivalRecord> survival_records(std::size_t n, std::mt19937_64& rng,
                                                                int time_levels = 40) {
  std::uniform_int_distribution<int> t(1, time_levels);
  std::bernoulli_distribution event(0.7);
  std::vector<smoothrank::SurvivalRecord> out(n);
  for (auto& r : out) r = {static_cast<double>(t(rng)), event(rng) ? 1 : 0};
  return out;
}

/// Exponential survival times whose hazard grows with column 0; independent censoring.
struct Survival {
  smoothrank::FeatureMatrix x;
  std::vector<smoothrank::SurvivalRecord> records;
};

inline Survival exponential_survival(std::size_t n, std::size_t cols, double effect,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> unit_exp(1.0);
  std::vector<double> cells;
  std::vector<smoothrank::SurvivalRecord> recs;
  for (std::size_t i = 0; i < n; ++i) {
    double lp = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = normal(rng);
      if (c == 0) lp = effect * v;
      cells.push_back(v);
    }
    const double t = unit_exp(rng) / std::exp(lp);
    const double cens = 2.0 * unit_exp(rng);
    recs.push_back({std::min(t, cens) + 1e-9, t <= cens ? 1 : 0});
  }
  return {smoothrank::FeatureMatrix(n, cols, std::move(cells)), std::move(recs)};
}

}  // namespace synthetic
