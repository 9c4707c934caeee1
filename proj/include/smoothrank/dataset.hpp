#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothrank/parallel.hpp"
#include "smoothrank/survival.hpp"

namespace smoothrank {

/// Marker stored in FeatureMatrix cells that have no value.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Row-major numeric table whose cells are finite reals or missing.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Throws DataError on shape mismatch or infinite cells. NaN cells are read as missing.
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> cells,
                std::vector<std::string> names = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  std::optional<double> at(std::size_t r, std::size_t c) const;

  std::span<const double> row(std::size_t r) const {
    return {cells_.data() + r * cols_, cols_};
  }
  std::vector<double> column(std::size_t c) const;
  std::size_t missing_count(std::size_t c) const;
  std::size_t missing_count() const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& cells() const { return cells_; }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_cols(std::span<const std::size_t> cols) const;

  bool operator==(const FeatureMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cells_;
  std::vector<std::string> names_;
};

/// Class labels, each 1 or 2.
class BinaryLabels {
 public:
  BinaryLabels() = default;
  explicit BinaryLabels(std::vector<int> values);

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  const std::vector<int>& values() const { return values_; }
  std::size_t count(int label) const;
  BinaryLabels select(std::span<const std::size_t> rows) const;
  /// 1 <-> 2.
  BinaryLabels swapped() const;

 private:
  std::vector<int> values_;
};

/// Raw label text for class 1 and class 2.
struct LabelMapping {
  std::string class1;
  std::string class2;
};

/// Integer codes given to a text-valued feature column, in first-appearance order.
struct CategoricalCoding {
  std::string column;
  std::vector<std::string> levels;  ///< levels[k] is coded as k
};

struct CsvOptions {
  std::optional<std::string> label_col;
  std::optional<std::string> time_col;
  std::optional<std::string> event_col;
  std::vector<std::string> missing_tokens{"NA", ""};
  /// Codings to reuse for text columns of the same name (e.g. those a model was trained with).
  /// Levels not in the coding become missing.
  std::vector<CategoricalCoding> codings;
};

struct LoadedData {
  FeatureMatrix features;
  std::optional<BinaryLabels> labels;
  std::optional<LabelMapping> label_mapping;
  std::optional<std::vector<SurvivalRecord>> survival;
  std::vector<CategoricalCoding> codings;
  std::vector<std::string> warnings;
};

/// Reads a headered CSV. Label, time and event columns are split off from the features.
LoadedData load_csv(const std::string& path, const CsvOptions& options = {});
LoadedData parse_csv(const std::string& text, const CsvOptions& options = {});

/// Keeps the columns whose missing fraction is at most max_missing_frac.
FeatureMatrix filter_sparse_features(const FeatureMatrix& m, double max_missing_frac = 0.2);
/// Indices of the columns filter_sparse_features keeps.
std::vector<std::size_t> usable_columns(const FeatureMatrix& m, double max_missing_frac = 0.2);

struct ImputationConfig {
  std::size_t k = 5;
  bool standardize = true;
};

/// Replaces each missing cell with the mean over its k nearest rows that observe the column.
/// Distance is Euclidean over the columns both rows observe, divided by the shared count.
FeatureMatrix knn_impute(const FeatureMatrix& m, const ImputationConfig& cfg = {},
                         Execution exec = Execution::parallel);

/// Imputes `target` using only rows of `donors` as neighbours; standardization uses donor statistics.
FeatureMatrix knn_impute_from(const FeatureMatrix& target, const FeatureMatrix& donors,
                              const ImputationConfig& cfg = {},
                              Execution exec = Execution::parallel);

struct SplitSpec {
  double train_fraction = 2.0 / 3.0;
  std::size_t n_repeats = 100;
  std::uint64_t seed = 1;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seed of repeat `repeat`; repeats can be generated independently of each other.
std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat, std::size_t attempt = 0);

/// One train/test partition drawn from `seed`. With labels the draw is stratified by class.
Split draw_split(std::size_t n_rows, double train_fraction, std::uint64_t seed,
                 const BinaryLabels* strata = nullptr);

std::vector<Split> random_split(std::size_t n_rows, const SplitSpec& spec,
                                const BinaryLabels* strata = nullptr);

/// CSV with columns repeat,row_index,role.
std::string split_manifest_csv(const std::vector<Split>& splits);

}  // namespace smoothrank
