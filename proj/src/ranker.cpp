#include "smoothrank/ranker.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>

#include <fmt/format.h>

#include "smoothrank/error.hpp"
#include "smoothrank/metrics.hpp"

namespace smoothrank {

std::size_t SmoothRankModel::features_used() const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

double compute_weight(const MarginalPredictor& p, std::span<const double> col,
                      const BinaryLabels& labels) {
  if (p.dead) return 0.0;
  if (col.size() != labels.size()) throw DataError("weight: column and labels differ in length");
  std::vector<double> scores;
  std::vector<int> ys;
  for (std::size_t i = 0; i < col.size(); ++i) {
    const double q = evaluate(p, col[i]);
    if (is_missing(q)) continue;
    scores.push_back(q);
    ys.push_back(labels[i]);
  }
  const bool both = std::find(ys.begin(), ys.end(), 1) != ys.end() &&
                    std::find(ys.begin(), ys.end(), 2) != ys.end();
  if (!both) return 0.0;
  return std::max(auc(scores, ys, 1) - 0.5, 0.0);
}

std::vector<double> post_filter(std::span<const double> weights) {
  double max_w = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DataError("post-filter: negative weight");
    max_w = std::max(max_w, w);
  }
  if (!(max_w > 0.0)) throw DataError("no predictive features");
  // Weights within rounding of max/3 count as equal to it and are dropped, so that e.g.
  // {0.3, 0.1} keeps only 0.3 even though 0.3 / 3 rounds below 0.1.
  const double cut = max_w / 3.0;
  const double slack = 1e-12 * max_w;
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) {
    if (!(w - cut > slack)) w = 0.0;
  }
  return out;
}

std::string config_digest(const TrainConfig& cfg) {
  const std::string text =
      fmt::format("grid={};span={:.17g};degree={};mask={:.17g};standardize={}", kGridSize,
                  cfg.marginal.loess.span, LoessConfig::degree, cfg.marginal.mask_threshold,
                  cfg.marginal.standardize ? 1 : 0);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

SmoothRankModel train(const FeatureMatrix& m, const BinaryLabels& y, const TrainConfig& cfg,
                      Execution exec) {
  if (m.rows() != y.size()) throw DataError("train: feature rows and labels differ in length");
  const std::size_t n1 = y.count(1);
  const std::size_t n2 = y.count(2);
  if (n1 < 2 || n2 < 2) throw DataError("train: need at least 2 rows of each class");

  SmoothRankModel model;
  model.config = cfg;
  model.feature_names = m.names();
  model.priors = ClassPriors::from_counts(n1, n2);
  model.provenance.config_digest = config_digest(cfg);
  model.predictors.resize(m.cols());
  model.raw_weights.resize(m.cols());

  std::vector<std::exception_ptr> failures(m.cols());
  auto fit = [&](std::size_t c) {
    try {
      const std::vector<double> col = m.column(c);
      model.predictors[c] = fit_marginal(col, y, cfg.marginal, Execution::serial);
      model.raw_weights[c] = compute_weight(model.predictors[c], col, y);
    } catch (...) {
      failures[c] = std::current_exception();
    }
  };
  const auto cols = static_cast<std::ptrdiff_t>(m.cols());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < cols; ++c) fit(static_cast<std::size_t>(c));
  } else {
    for (std::ptrdiff_t c = 0; c < cols; ++c) fit(static_cast<std::size_t>(c));
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  model.weights = post_filter(model.raw_weights);
  return model;
}

double score(const SmoothRankModel& model, std::span<const double> row) {
  if (row.size() != model.n_features()) {
    throw DataError(fmt::format("score: row has {} values, model expects {}", row.size(),
                                model.n_features()));
  }
  std::vector<std::pair<double, double>> terms;  // (weight, q)
  terms.reserve(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!(model.weights[i] > 0.0)) continue;
    const double q = evaluate(model.predictors[i], row[i]);
    if (!is_missing(q)) terms.emplace_back(model.weights[i], q);
  }
  if (terms.empty()) return kMissing;
  // Canonical summation order, so the score does not depend on column order.
  std::sort(terms.begin(), terms.end());
  double num = 0.0;
  double den = 0.0;
  for (const auto& [w, q] : terms) {
    num += w * q;
    den += w;
  }
  return num / den;
}

std::vector<double> score_rows(const SmoothRankModel& model, const FeatureMatrix& m,
                               Execution exec) {
  if (m.cols() != model.n_features()) {
    throw DataError(fmt::format("score: data has {} columns, model expects {}", m.cols(),
                                model.n_features()));
  }
  std::vector<double> out(m.rows());
  const auto n = static_cast<std::ptrdiff_t>(m.rows());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) out[r] = score(model, m.row(r));
  } else {
    for (std::ptrdiff_t r = 0; r < n; ++r) out[r] = score(model, m.row(r));
  }
  return out;
}

}  // namespace smoothrank
