// smoothrank: train, score and benchmark Smooth Rank models from CSV files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "smoothrank/dataset.hpp"
#include "smoothrank/error.hpp"
#include "smoothrank/harness.hpp"
#include "smoothrank/metrics.hpp"
#include "smoothrank/model_io.hpp"
#include "smoothrank/ranker.hpp"

namespace sr = smoothrank;

namespace {

constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct RunConfig {
  std::string input;
  std::string model;
  std::string label_col;
  std::string time_col = "time";
  std::string event_col = "event";
  std::string out;
  std::string splits_out;
  std::string name;
  std::uint64_t seed = 1;
  std::size_t repeats = 100;
  double train_frac = 2.0 / 3.0;
  bool impute = true;
  bool impute_train_only = false;
  double missing_filter = 0.2;
  std::size_t knn_k = 5;
  double span = 0.75;
  double mask_threshold = 0.1;
  bool standardize = true;
  int threads = 0;
  bool serial = false;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sr::DataError(fmt::format("cannot write '{}'", path));
  out << text;
}

std::string fmt_value(double v) { return sr::is_missing(v) ? "NA" : fmt::format("{:.17g}", v); }

sr::Execution execution(const RunConfig& cfg) {
  if (cfg.threads > 0) sr::set_threads(cfg.threads);
  return cfg.serial ? sr::Execution::serial : sr::Execution::parallel;
}

sr::TrainConfig train_config(const RunConfig& cfg) {
  sr::TrainConfig t;
  t.marginal.loess.span = cfg.span;
  t.marginal.mask_threshold = cfg.mask_threshold;
  t.marginal.standardize = cfg.standardize;
  return t;
}

sr::BenchConfig bench_config(const RunConfig& cfg) {
  sr::BenchConfig b;
  b.split.seed = cfg.seed;
  b.split.n_repeats = cfg.repeats;
  b.split.train_fraction = cfg.train_frac;
  b.missing_filter = cfg.missing_filter;
  b.impute = cfg.impute;
  b.impute_train_only = cfg.impute_train_only;
  b.imputation.k = cfg.knn_k;
  b.train = train_config(cfg);
  b.exec = execution(cfg);
  return b;
}

sr::LoadedData load(const RunConfig& cfg, bool survival) {
  sr::CsvOptions opt;
  if (survival) {
    opt.time_col = cfg.time_col;
    opt.event_col = cfg.event_col;
  } else {
    if (cfg.label_col.empty()) throw sr::DataError("--label-col is required");
    opt.label_col = cfg.label_col;
  }
  sr::LoadedData data = sr::load_csv(cfg.input, opt);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  return data;
}

std::string dataset_name(const RunConfig& cfg) {
  return cfg.name.empty() ? std::filesystem::path(cfg.input).stem().string() : cfg.name;
}

int cmd_train(const RunConfig& cfg) {
  const bool survival = cfg.label_col.empty();
  sr::LoadedData data = load(cfg, survival);
  const sr::Execution exec = execution(cfg);
  const sr::FeatureMatrix x = sr::prepare_features(data.features, cfg.missing_filter, cfg.impute,
                                                   {cfg.knn_k, true}, exec);
  sr::SmoothRankModel model;
  if (survival) {
    sr::SurvivalFit fit = sr::train_survival(x, *data.survival, train_config(cfg), exec);
    const auto& t = fit.threshold;
    std::cout << fmt::format("threshold T={:g} L={} H={} excluded={}\n", t.threshold, t.early,
                             t.late, t.excluded.size());
    model = std::move(fit.model);
  } else {
    model = sr::train(x, *data.labels, train_config(cfg), exec);
    model.label_mapping = data.label_mapping;
  }
  model.provenance.seed = cfg.seed;
  model.provenance.source = std::filesystem::path(cfg.input).filename().string();
  for (const auto& c : data.codings) {
    for (const auto& name : model.feature_names) {
      if (name == c.column) model.codings.push_back(c);
    }
  }
  const std::string out = cfg.out.empty() ? "model.json" : cfg.out;
  sr::save_model(model, out);
  std::cout << fmt::format("features used: {} of {} ({} columns in input)\n",
                           model.features_used(), model.n_features(), data.features.cols());
  for (std::size_t i = 0; i < model.n_features(); ++i) {
    if (model.weights[i] > 0.0) {
      std::cout << fmt::format("  {:<20} weight {:.4f}\n", model.feature_names[i],
                               model.weights[i]);
    }
  }
  std::cout << "model written to " << out << "\n";
  return 0;
}

int cmd_score(const RunConfig& cfg) {
  if (cfg.model.empty()) throw sr::DataError("--model is required");
  const sr::SmoothRankModel model = sr::load_model(cfg.model);
  sr::CsvOptions opt;
  opt.codings = model.codings;
  const sr::LoadedData data = sr::load_csv(cfg.input, opt);
  std::vector<std::size_t> cols;
  for (const auto& name : model.feature_names) {
    const auto& names = data.features.names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw sr::DataError(fmt::format("column '{}' not found", name));
    cols.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  const std::vector<double> scores =
      sr::score_rows(model, data.features.select_cols(cols), execution(cfg));
  std::string text = "row_index,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    text += fmt::format("{},{}\n", i, fmt_value(scores[i]));
  }
  write_output(cfg.out, text);
  return 0;
}

int report(const RunConfig& cfg, const sr::LoadedData& data, const sr::BenchOutcome& outcome) {
  sr::ReportRow row{dataset_name(cfg), data.features.rows(), outcome.n_features, outcome.report};
  std::cout << sr::render_table(std::span(&row, 1));
  std::cout << fmt::format("resampled splits: {}, test rows without a score: {}\n",
                           outcome.resampled, outcome.dropped_missing_scores);
  if (!cfg.out.empty()) write_output(cfg.out, sr::render_csv(std::span(&row, 1)));
  if (!cfg.splits_out.empty()) write_output(cfg.splits_out, sr::render_splits_csv(outcome.report));
  return 0;
}

int cmd_bench_rank(const RunConfig& cfg) {
  const sr::LoadedData data = load(cfg, false);
  return report(cfg, data, sr::bench_rank(data.features, *data.labels, bench_config(cfg)));
}

int cmd_bench_surv(const RunConfig& cfg) {
  const sr::LoadedData data = load(cfg, true);
  return report(cfg, data, sr::bench_surv(data.features, *data.survival, bench_config(cfg)));
}

int cmd_inspect(const RunConfig& cfg) {
  if (cfg.model.empty()) throw sr::DataError("--model is required");
  const sr::SmoothRankModel model = sr::load_model(cfg.model);
  std::string text = "feature,grid,raw_q,q_smooth,masked,weight\n";
  for (std::size_t i = 0; i < model.n_features(); ++i) {
    const auto& p = model.predictors[i];
    for (std::size_t k = 0; k < sr::kGridSize; ++k) {
      text += fmt::format("{},{:.17g},{},{},{},{:.17g}\n", model.feature_names[i], p.grid[k],
                          fmt_value(p.raw_q[k]), fmt_value(p.q_smooth[k]), p.mask[k] ? 1 : 0,
                          model.weights[i]);
    }
  }
  write_output(cfg.out, text);
  return 0;
}

int cmd_impute(const RunConfig& cfg) {
  sr::CsvOptions opt;
  if (!cfg.label_col.empty()) opt.label_col = cfg.label_col;
  const sr::LoadedData data = sr::load_csv(cfg.input, opt);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  const sr::FeatureMatrix x = sr::prepare_features(data.features, cfg.missing_filter, true,
                                                   {cfg.knn_k, true}, execution(cfg));
  std::string text;
  for (std::size_t c = 0; c < x.cols(); ++c) text += (c ? "," : "") + x.names()[c];
  if (data.labels) text += "," + cfg.label_col;
  text += "\n";
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) text += (c ? "," : "") + fmt_value(x(r, c));
    if (data.labels) {
      text += "," + ((*data.labels)[r] == 1 ? data.label_mapping->class1
                                             : data.label_mapping->class2);
    }
    text += "\n";
  }
  write_output(cfg.out, text);
  return 0;
}

// Turns a JSON config object into command-line flags placed ahead of the user's own,
// so explicit flags win.
std::vector<std::string> config_flags(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sr::DataError(fmt::format("cannot read config '{}'", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw sr::DataError(fmt::format("config '{}': {}", path, e.what()));
  }
  if (!j.is_object()) throw sr::DataError("config must be a JSON object");
  std::vector<std::string> flags;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (key == "impute" || key == "standardize") {
        flags.push_back(value.get<bool>() ? "--" + key : "--no-" + key);
      } else if (value.get<bool>()) {
        flags.push_back("--" + key);
      }
    } else if (value.is_string()) {
      flags.push_back("--" + key);
      flags.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      flags.push_back("--" + key);
      flags.push_back(value.dump());
    } else {
      throw sr::DataError(fmt::format("config key '{}' must be a scalar", key));
    }
  }
  return flags;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        const std::string path = args[i + 1];
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                   args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        auto flags = config_flags(path);
        const std::size_t at = args.empty() ? 0 : 1;  // after the subcommand
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), flags.begin(), flags.end());
        break;
      }
    }
  } catch (const sr::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  CLI::App app{"Smooth Rank: bipartite ranking by aggregated univariate density-ratio predictors",
               "smoothrank"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", "JSON file of option values; flags override it");
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "CSV file")->required();
    sub->add_option("--out", cfg.out, "output path");
    sub->add_option("--threads", cfg.threads, "OpenMP threads (0 = runtime default)");
    sub->add_flag("--serial", cfg.serial, "use the serial reference kernels");
  };
  auto training = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_flag("--impute,!--no-impute", cfg.impute, "k-NN impute missing values (default on)");
    sub->add_option("--missing-filter", cfg.missing_filter,
                    "drop features with a larger missing fraction")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--knn-k", cfg.knn_k, "neighbours used for imputation")
        ->check(CLI::PositiveNumber);
    sub->add_option("--span", cfg.span, "LOESS span")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--mask-threshold", cfg.mask_threshold, "low-density mask level");
    sub->add_flag("--standardize,!--no-standardize", cfg.standardize,
                  "fit predictors on z-scored features (default on)");
  };
  auto bench = [&](CLI::App* sub) {
    sub->add_option("--repeats", cfg.repeats, "number of random splits")
        ->check(CLI::PositiveNumber);
    sub->add_option("--train-frac", cfg.train_frac, "training fraction")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--impute-train-only", cfg.impute_train_only,
                  "impute each fold from its training rows");
    sub->add_option("--splits-out", cfg.splits_out, "per-split CSV");
    sub->add_option("--name", cfg.name, "dataset name in the report");
  };

  auto* train = app.add_subcommand("train", "fit a model (classification or survival)");
  common(train);
  training(train);
  train->add_option("--label-col", cfg.label_col, "two-valued class column");
  train->add_option("--time-col", cfg.time_col, "survival time column (without --label-col)");
  train->add_option("--event-col", cfg.event_col, "event indicator column");

  auto* score = app.add_subcommand("score", "score rows with a saved model");
  common(score);
  score->add_option("--model", cfg.model, "model file")->required();
  score->add_option("--label-col", cfg.label_col, "ignored; accepted for symmetry");

  auto* bench_rank = app.add_subcommand("bench-rank", "repeated-split AUC benchmark");
  common(bench_rank);
  training(bench_rank);
  bench(bench_rank);
  bench_rank->add_option("--label-col", cfg.label_col, "two-valued class column")->required();

  auto* bench_surv = app.add_subcommand("bench-surv", "repeated-split concordance benchmark");
  common(bench_surv);
  training(bench_surv);
  bench(bench_surv);
  bench_surv->add_option("--time-col", cfg.time_col, "survival time column");
  bench_surv->add_option("--event-col", cfg.event_col, "event indicator column");

  auto* inspect = app.add_subcommand("inspect", "dump fitted predictor curves as CSV");
  inspect->add_option("--model", cfg.model, "model file")->required();
  inspect->add_option("--out", cfg.out, "output path");

  auto* impute = app.add_subcommand("impute", "filter sparse features and k-NN impute a CSV");
  common(impute);
  impute->add_option("--label-col", cfg.label_col, "column passed through untouched");
  impute->add_option("--missing-filter", cfg.missing_filter,
                     "drop features with a larger missing fraction");
  impute->add_option("--knn-k", cfg.knn_k, "neighbours")->check(CLI::PositiveNumber);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitData;
  }

  try {
    if (*train) return cmd_train(cfg);
    if (*score) return cmd_score(cfg);
    if (*bench_rank) return cmd_bench_rank(cfg);
    if (*bench_surv) return cmd_bench_surv(cfg);
    if (*inspect) return cmd_inspect(cfg);
    if (*impute) return cmd_impute(cfg);
  } catch (const sr::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
