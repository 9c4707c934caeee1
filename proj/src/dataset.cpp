#include "smoothrank/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "smoothrank/error.hpp"

namespace smoothrank {

// ---------------------------------------------------------------------------
// FeatureMatrix / BinaryLabels

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> cells,
                             std::vector<std::string> names)
    : rows_(rows), cols_(cols), cells_(std::move(cells)), names_(std::move(names)) {
  if (rows_ == 0 || cols_ == 0) throw DataError("feature matrix must have rows and columns");
  if (cells_.size() != rows_ * cols_) throw DataError("feature matrix cell count mismatch");
  for (double v : cells_) {
    if (std::isinf(v)) throw DataError("feature matrix holds a non-finite value");
  }
  if (names_.empty()) {
    for (std::size_t c = 0; c < cols_; ++c) names_.push_back(fmt::format("x{}", c + 1));
  }
  if (names_.size() != cols_) throw DataError("feature matrix name count mismatch");
}

std::optional<double> FeatureMatrix::at(std::size_t r, std::size_t c) const {
  const double v = (*this)(r, c);
  if (is_missing(v)) return std::nullopt;
  return v;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::size_t FeatureMatrix::missing_count(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_; ++r) n += is_missing((*this)(r, c)) ? 1 : 0;
  return n;
}

std::size_t FeatureMatrix::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](double v) { return is_missing(v); }));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<double> cells;
  cells.reserve(rows.size() * cols_);
  for (std::size_t r : rows) {
    const auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
  }
  return {rows.size(), cols_, std::move(cells), names_};
}

FeatureMatrix FeatureMatrix::select_cols(std::span<const std::size_t> cols) const {
  std::vector<double> cells;
  cells.reserve(rows_ * cols.size());
  std::vector<std::string> names;
  for (std::size_t c : cols) names.push_back(names_.at(c));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c : cols) cells.push_back((*this)(r, c));
  }
  return {rows_, cols.size(), std::move(cells), std::move(names)};
}

bool FeatureMatrix::operator==(const FeatureMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || names_ != other.names_) return false;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const double a = cells_[i];
    const double b = other.cells_[i];
    if (is_missing(a) != is_missing(b)) return false;
    if (!is_missing(a) && a != b) return false;
  }
  return true;
}

BinaryLabels::BinaryLabels(std::vector<int> values) : values_(std::move(values)) {
  for (int v : values_) {
    if (v != 1 && v != 2) throw DataError("labels must be 1 or 2");
  }
}

std::size_t BinaryLabels::count(int label) const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), label));
}

BinaryLabels BinaryLabels::select(std::span<const std::size_t> rows) const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(values_.at(r));
  return BinaryLabels(std::move(out));
}

BinaryLabels BinaryLabels::swapped() const {
  std::vector<int> out(values_);
  for (int& v : out) v = 3 - v;
  return BinaryLabels(std::move(out));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError(fmt::format("column '{}' not found", name));
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

LoadedData parse_csv(const std::string& text, const CsvOptions& options) {
  const auto records = split_records(text);
  if (records.empty()) throw DataError("csv: empty file");
  const std::vector<std::string>& header = records.front();
  const std::size_t width = header.size();
  const std::size_t n = records.size() - 1;
  if (n == 0) throw DataError("csv: no data rows");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != width) {
      throw DataError(fmt::format("csv: row {} has {} fields, header has {}", i + 1,
                                  records[i].size(), width));
    }
  }
  auto is_missing_token = [&](const std::string& s) {
    return std::find(options.missing_tokens.begin(), options.missing_tokens.end(), s) !=
           options.missing_tokens.end();
  };

  std::set<std::size_t> reserved;
  LoadedData out;

  if (options.label_col) {
    const std::size_t c = find_column(header, *options.label_col);
    reserved.insert(c);
    std::set<std::string> distinct;
    for (std::size_t i = 1; i <= n; ++i) {
      if (is_missing_token(records[i][c])) {
        throw DataError(fmt::format("label column '{}' has a missing value on row {}",
                                    *options.label_col, i + 1));
      }
      distinct.insert(records[i][c]);
    }
    if (distinct.size() != 2) {
      throw DataError(fmt::format("label column '{}' has {} distinct values, expected 2",
                                  *options.label_col, distinct.size()));
    }
    LabelMapping mapping{*distinct.begin(), *std::next(distinct.begin())};
    std::vector<int> labels(n);
    for (std::size_t i = 1; i <= n; ++i) labels[i - 1] = records[i][c] == mapping.class1 ? 1 : 2;
    out.labels = BinaryLabels(std::move(labels));
    out.label_mapping = mapping;
  }

  if (options.time_col || options.event_col) {
    if (!options.time_col || !options.event_col) {
      throw DataError("survival data needs both a time and an event column");
    }
    const std::size_t tc = find_column(header, *options.time_col);
    const std::size_t ec = find_column(header, *options.event_col);
    reserved.insert(tc);
    reserved.insert(ec);
    std::vector<SurvivalRecord> surv(n);
    for (std::size_t i = 1; i <= n; ++i) {
      const auto t = parse_number(records[i][tc]);
      if (!t || !std::isfinite(*t) || *t <= 0.0) {
        throw DataError(fmt::format("row {}: time must be a positive number, got '{}'", i + 1,
                                    records[i][tc]));
      }
      const auto e = parse_number(records[i][ec]);
      if (!e || (*e != 0.0 && *e != 1.0)) {
        throw DataError(fmt::format("row {}: event must be 0 or 1, got '{}'", i + 1,
                                    records[i][ec]));
      }
      surv[i - 1] = {*t, static_cast<int>(*e)};
    }
    out.survival = std::move(surv);
  }

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (!reserved.count(c)) feature_cols.push_back(c);
  }
  if (feature_cols.empty()) throw DataError("csv: no feature columns");

  std::vector<double> cells(n * feature_cols.size());
  std::vector<std::string> names;
  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    const std::size_t c = feature_cols[j];
    names.push_back(header[c]);
    const auto fixed = std::find_if(options.codings.begin(), options.codings.end(),
                                    [&](const CategoricalCoding& cc) { return cc.column == header[c]; });
    if (fixed != options.codings.end()) {
      std::size_t unknown = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        const std::string& s = records[i][c];
        double v = kMissing;
        if (!is_missing_token(s)) {
          const auto it = std::find(fixed->levels.begin(), fixed->levels.end(), s);
          if (it == fixed->levels.end()) {
            ++unknown;
          } else {
            v = static_cast<double>(it - fixed->levels.begin());
          }
        }
        cells[(i - 1) * feature_cols.size() + j] = v;
      }
      if (unknown > 0) {
        out.warnings.push_back(fmt::format("column '{}': {} value(s) outside the known levels read as missing",
                                           header[c], unknown));
      }
      out.codings.push_back(*fixed);
      continue;
    }
    bool numeric = true;
    for (std::size_t i = 1; i <= n && numeric; ++i) {
      if (!is_missing_token(records[i][c]) && !parse_number(records[i][c])) numeric = false;
    }
    if (numeric) {
      for (std::size_t i = 1; i <= n; ++i) {
        const std::string& s = records[i][c];
        double v = kMissing;
        if (!is_missing_token(s)) {
          v = *parse_number(s);
          if (!std::isfinite(v)) {
            throw DataError(fmt::format("row {}: non-finite value in column '{}'", i + 1,
                                        header[c]));
          }
        }
        cells[(i - 1) * feature_cols.size() + j] = v;
      }
      continue;
    }
    CategoricalCoding coding{header[c], {}};
    std::map<std::string, std::size_t> codes;
    for (std::size_t i = 1; i <= n; ++i) {
      const std::string& s = records[i][c];
      double v = kMissing;
      if (!is_missing_token(s)) {
        auto [it, inserted] = codes.emplace(s, coding.levels.size());
        if (inserted) coding.levels.push_back(s);
        v = static_cast<double>(it->second);
      }
      cells[(i - 1) * feature_cols.size() + j] = v;
    }
    out.warnings.push_back(fmt::format(
        "column '{}' is text; coded as integers 0..{} in order of first appearance (treated "
        "as ordinal)",
        header[c], coding.levels.size() - 1));
    out.codings.push_back(std::move(coding));
  }
  out.features = FeatureMatrix(n, feature_cols.size(), std::move(cells), std::move(names));
  return out;
}

LoadedData load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), options);
}

// ---------------------------------------------------------------------------
// Sparse-feature filter

std::vector<std::size_t> usable_columns(const FeatureMatrix& m, double max_missing_frac) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double frac = static_cast<double>(m.missing_count(c)) / static_cast<double>(m.rows());
    if (!(frac > max_missing_frac)) keep.push_back(c);
  }
  return keep;
}

FeatureMatrix filter_sparse_features(const FeatureMatrix& m, double max_missing_frac) {
  const auto keep = usable_columns(m, max_missing_frac);
  if (keep.empty()) throw DataError("no usable features");
  if (keep.size() == m.cols()) return m;
  return m.select_cols(keep);
}

// ---------------------------------------------------------------------------
// k-NN imputation

namespace {

struct ColumnScale {
  std::vector<double> center;
  std::vector<double> scale;
};

ColumnScale column_scale(const FeatureMatrix& m, bool standardize) {
  ColumnScale s{std::vector<double>(m.cols(), 0.0), std::vector<double>(m.cols(), 1.0)};
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (auto v = m.at(r, c)) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) {
      throw DataError(fmt::format("imputation: column '{}' has no observed values",
                                  m.names()[c]));
    }
    if (!standardize) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (auto v = m.at(r, c)) ss += (*v - mean) * (*v - mean);
    }
    s.center[c] = mean;
    if (n > 1 && ss > 0.0) s.scale[c] = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

// Imputes target rows from donor rows. When `same` is set the donors are the target rows
// and a row is never its own neighbour.
FeatureMatrix impute_core(const FeatureMatrix& target, const FeatureMatrix& donors,
                          const ImputationConfig& cfg, bool same, Execution exec) {
  if (cfg.k < 1) throw DataError("imputation: k must be at least 1");
  if (target.cols() != donors.cols()) throw DataError("imputation: column count mismatch");
  const ColumnScale scale = column_scale(donors, cfg.standardize);
  FeatureMatrix out = target;
  const std::size_t cols = target.cols();

  std::vector<std::size_t> todo;
  for (std::size_t r = 0; r < target.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (is_missing(target(r, c))) {
        todo.push_back(r);
        break;
      }
    }
  }
  if (todo.empty()) return out;

  std::vector<std::string> errors(todo.size());
  auto impute_row = [&](std::size_t t) {
    const std::size_t r = todo[t];
    // distance to every donor; NaN when no column is shared
    std::vector<double> dist(donors.rows(), kMissing);
    for (std::size_t d = 0; d < donors.rows(); ++d) {
      if (same && d == r) continue;
      double ss = 0.0;
      std::size_t shared = 0;
      for (std::size_t c = 0; c < cols; ++c) {
        const double a = target(r, c);
        const double b = donors(d, c);
        if (is_missing(a) || is_missing(b)) continue;
        const double diff = (a - b) / scale.scale[c];
        ss += diff * diff;
        ++shared;
      }
      if (shared > 0) dist[d] = std::sqrt(ss) / static_cast<double>(shared);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!is_missing(target(r, c))) continue;
      std::vector<std::pair<double, std::size_t>> cand;
      for (std::size_t d = 0; d < donors.rows(); ++d) {
        if (!is_missing(dist[d]) && !is_missing(donors(d, c))) cand.emplace_back(dist[d], d);
      }
      if (cand.empty()) {
        errors[t] = fmt::format(
            "imputation: row {} shares no observed column with any row observing '{}'", r + 1,
            target.names()[c]);
        return;
      }
      const std::size_t k = std::min(cfg.k, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += donors(cand[i].second, c);
      out(r, c) = sum / static_cast<double>(k);
    }
  };

  const auto n = static_cast<std::ptrdiff_t>(todo.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t t = 0; t < n; ++t) impute_row(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < n; ++t) impute_row(static_cast<std::size_t>(t));
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError(e);
  }
  return out;
}

}  // namespace

FeatureMatrix knn_impute(const FeatureMatrix& m, const ImputationConfig& cfg, Execution exec) {
  return impute_core(m, m, cfg, true, exec);
}

FeatureMatrix knn_impute_from(const FeatureMatrix& target, const FeatureMatrix& donors,
                              const ImputationConfig& cfg, Execution exec) {
  return impute_core(target, donors, cfg, false, exec);
}

// ---------------------------------------------------------------------------
// Random splits

std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat, std::size_t attempt) {
  // splitmix64 finaliser over the (seed, repeat, attempt) triple
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (repeat + 1) + 0xbf58476d1ce4e5b9ULL * attempt;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Split draw_split(std::size_t n_rows, double train_fraction, std::uint64_t seed,
                 const BinaryLabels* strata) {
  if (n_rows < 3) throw DataError("split: need at least 3 rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("split: train fraction must be in (0, 1)");
  }
  if (strata && strata->size() != n_rows) throw DataError("split: label count mismatch");
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_rows)));
  std::mt19937_64 rng(seed);
  Split s;

  std::vector<std::vector<std::size_t>> groups;
  if (strata) {
    groups.resize(2);
    for (std::size_t i = 0; i < n_rows; ++i) groups[(*strata)[i] - 1].push_back(i);
  } else {
    groups.emplace_back(n_rows);
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }

  // Per-group quotas by largest remainder so they add up to n_train.
  std::vector<std::size_t> quota(groups.size());
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double exact = train_fraction * static_cast<double>(groups[g].size());
    quota[g] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[g];
    remainder.emplace_back(-(exact - std::floor(exact)), g);
  }
  std::sort(remainder.begin(), remainder.end());
  for (std::size_t i = 0; assigned < n_train && i < remainder.size(); ++i, ++assigned) {
    ++quota[remainder[i].second];
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    shuffle(groups[g], rng);
    s.train.insert(s.train.end(), groups[g].begin(),
                   groups[g].begin() + static_cast<std::ptrdiff_t>(quota[g]));
    s.test.insert(s.test.end(), groups[g].begin() + static_cast<std::ptrdiff_t>(quota[g]),
                  groups[g].end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<Split> random_split(std::size_t n_rows, const SplitSpec& spec,
                                const BinaryLabels* strata) {
  std::vector<Split> out;
  out.reserve(spec.n_repeats);
  for (std::size_t r = 0; r < spec.n_repeats; ++r) {
    out.push_back(draw_split(n_rows, spec.train_fraction, repeat_seed(spec.seed, r), strata));
  }
  return out;
}

std::string split_manifest_csv(const std::vector<Split>& splits) {
  std::string out = "repeat,row_index,role\n";
  for (std::size_t r = 0; r < splits.size(); ++r) {
    // row order within a repeat, each row once
    std::vector<std::pair<std::size_t, const char*>> rows;
    for (std::size_t i : splits[r].train) rows.emplace_back(i, "train");
    for (std::size_t i : splits[r].test) rows.emplace_back(i, "test");
    std::sort(rows.begin(), rows.end());
    for (const auto& [i, role] : rows) out += fmt::format("{},{},{}\n", r, i, role);
  }
  return out;
}

}  // namespace smoothrank
