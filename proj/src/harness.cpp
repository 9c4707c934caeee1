#include "smoothrank/harness.hpp"

#include <exception>
#include <optional>

#include <fmt/format.h>

#include "smoothrank/error.hpp"

namespace smoothrank {

SurvivalFit train_survival(const FeatureMatrix& m, std::span<const SurvivalRecord> records,
                           const TrainConfig& cfg, Execution exec) {
  if (m.rows() != records.size()) throw DataError("survival: rows and records differ in length");
  SurvivalFit fit;
  fit.threshold = select_threshold(records);
  const DerivedClasses classes = derive_classes(records, fit.threshold.threshold);
  const std::vector<std::size_t> kept = classes.kept_rows();
  fit.model = train(m.select_rows(kept), BinaryLabels(classes.labels()), cfg, exec);
  fit.model.label_mapping = LabelMapping{"early_failure", "no_early_failure"};
  return fit;
}

FeatureMatrix prepare_features(const FeatureMatrix& m, double missing_filter, bool impute,
                               const ImputationConfig& imputation, Execution exec) {
  FeatureMatrix out = filter_sparse_features(m, missing_filter);
  if (impute && out.missing_count() > 0) out = knn_impute(out, imputation, exec);
  return out;
}

namespace {

struct RepeatResult {
  double value = 0.0;
  std::size_t features_used = 0;
  std::size_t resampled = 0;
  std::size_t dropped = 0;
};

struct Folds {
  FeatureMatrix train;
  FeatureMatrix test;
};

Folds make_folds(const FeatureMatrix& x, const Split& split, const BenchConfig& cfg) {
  Folds f{x.select_rows(split.train), x.select_rows(split.test)};
  if (cfg.impute && cfg.impute_train_only) {
    if (f.train.missing_count() > 0) f.train = knn_impute(f.train, cfg.imputation, Execution::serial);
    if (f.test.missing_count() > 0) {
      f.test = knn_impute_from(f.test, f.train, cfg.imputation, Execution::serial);
    }
  }
  return f;
}

// Runs `one(repeat, attempt)` for every repeat, redrawing on DataError, in parallel over
// repeats when requested. Each repeat's outcome depends only on its own seeds.
template <typename Fn>
std::vector<RepeatResult> run_repeats(const BenchConfig& cfg, Fn one) {
  const std::size_t n = cfg.split.n_repeats;
  std::vector<RepeatResult> results(n);
  std::vector<std::exception_ptr> failures(n);
  auto repeat = [&](std::size_t r) {
    std::string last_error;
    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      try {
        std::optional<RepeatResult> res = one(r, attempt);
        if (res) {
          res->resampled = attempt;
          results[r] = *res;
          return;
        }
        last_error = "unusable split";
      } catch (const DataError& e) {
        last_error = e.what();
      } catch (...) {
        failures[r] = std::current_exception();
        return;
      }
    }
    failures[r] = std::make_exception_ptr(DataError(fmt::format(
        "repeat {}: no usable split after {} draws ({})", r, cfg.max_attempts, last_error)));
  };
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (cfg.exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t r = 0; r < count; ++r) repeat(static_cast<std::size_t>(r));
  } else {
    for (std::ptrdiff_t r = 0; r < count; ++r) repeat(static_cast<std::size_t>(r));
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return results;
}

BenchOutcome summarise(const std::vector<RepeatResult>& results, std::string metric,
                       std::size_t n_features) {
  std::vector<double> values;
  std::vector<std::size_t> used;
  BenchOutcome out;
  for (const auto& r : results) {
    values.push_back(r.value);
    used.push_back(r.features_used);
    out.resampled += r.resampled;
    out.dropped_missing_scores += r.dropped;
  }
  out.report = aggregate(values, used, std::move(metric));
  out.n_features = n_features;
  return out;
}

}  // namespace

BenchOutcome bench_rank(const FeatureMatrix& m, const BinaryLabels& y, const BenchConfig& cfg) {
  if (m.rows() != y.size()) throw DataError("bench: rows and labels differ in length");
  const FeatureMatrix x =
      prepare_features(m, cfg.missing_filter, cfg.impute && !cfg.impute_train_only,
                       cfg.imputation, cfg.exec);

  auto one = [&](std::size_t r, std::size_t attempt) -> std::optional<RepeatResult> {
    const std::uint64_t seed = repeat_seed(cfg.split.seed, r, attempt);
    const Split split = draw_split(x.rows(), cfg.split.train_fraction, seed, &y);
    Folds folds = make_folds(x, split, cfg);
    const BinaryLabels y_train = y.select(split.train);
    const BinaryLabels y_test = y.select(split.test);
    SmoothRankModel model = train(folds.train, y_train, cfg.train, Execution::serial);
    model.provenance.seed = seed;
    const std::vector<double> scores = score_rows(model, folds.test, Execution::serial);

    RepeatResult res;
    std::vector<double> kept_scores;
    std::vector<int> kept_labels;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (is_missing(scores[i])) {
        ++res.dropped;
        continue;
      }
      kept_scores.push_back(scores[i]);
      kept_labels.push_back(y_test[i]);
    }
    res.value = auc(kept_scores, kept_labels, 1);
    res.features_used = model.features_used();
    return res;
  };
  return summarise(run_repeats(cfg, one), "AUC", x.cols());
}

BenchOutcome bench_surv(const FeatureMatrix& m, std::span<const SurvivalRecord> records,
                        const BenchConfig& cfg) {
  if (m.rows() != records.size()) throw DataError("bench: rows and records differ in length");
  const FeatureMatrix x =
      prepare_features(m, cfg.missing_filter, cfg.impute && !cfg.impute_train_only,
                       cfg.imputation, cfg.exec);

  auto one = [&](std::size_t r, std::size_t attempt) -> std::optional<RepeatResult> {
    const std::uint64_t seed = repeat_seed(cfg.split.seed, r, attempt);
    const Split split = draw_split(x.rows(), cfg.split.train_fraction, seed, nullptr);
    std::vector<SurvivalRecord> train_recs;
    std::vector<SurvivalRecord> test_recs;
    for (std::size_t i : split.train) train_recs.push_back(records[i]);
    for (std::size_t i : split.test) test_recs.push_back(records[i]);

    Folds folds = make_folds(x, split, cfg);
    SurvivalFit fit = train_survival(folds.train, train_recs, cfg.train, Execution::serial);
    fit.model.provenance.seed = seed;
    const std::vector<double> scores = score_rows(fit.model, folds.test, Execution::serial);
    const ConcordanceResult c = harrell_counts(test_recs, scores, true, Execution::serial);

    RepeatResult res;
    res.value = c.value();
    res.dropped = c.dropped_missing;
    res.features_used = fit.model.features_used();
    return res;
  };
  return summarise(run_repeats(cfg, one), "CI", x.cols());
}

}  // namespace smoothrank
