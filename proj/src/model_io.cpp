#include "smoothrank/model_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace smoothrank {

using nlohmann::json;

namespace {

json nullable_array(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) {
    if (is_missing(v)) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(v);
    }
  }
  return arr;
}

std::vector<double> read_nullable_array(const json& arr) {
  if (!arr.is_array() || arr.size() != kGridSize) {
    throw ModelFormatError(fmt::format("model: curve must have {} entries", kGridSize));
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(v.is_null() ? kMissing : v.get<double>());
  return out;
}

json priors_json(const ClassPriors& p) { return {{"pi1", p.pi1}, {"pi2", p.pi2}}; }

ClassPriors read_priors(const json& j) {
  ClassPriors p;
  p.pi1 = j.at("pi1").get<double>();
  p.pi2 = j.at("pi2").get<double>();
  return p;
}

void check_version(const json& j) {
  const std::string format = j.at("format").get<std::string>();
  const std::string prefix = "smoothrank-model/";
  if (format.rfind(prefix, 0) != 0) {
    throw ModelFormatError(fmt::format("model: unknown format '{}'", format));
  }
  if (format != kModelFormat) {
    throw ModelFormatError(fmt::format("model: unsupported format version '{}' (this build reads '{}')",
                                       format.substr(prefix.size()), kModelFormat));
  }
}

}  // namespace

std::string model_to_json(const SmoothRankModel& model) {
  json j;
  j["format"] = kModelFormat;
  j["feature_names"] = model.feature_names;
  if (model.label_mapping) {
    j["label_mapping"] = {{"class1", model.label_mapping->class1},
                          {"class2", model.label_mapping->class2}};
  } else {
    j["label_mapping"] = nullptr;
  }
  json codings = json::array();
  for (const auto& c : model.codings) codings.push_back({{"column", c.column}, {"levels", c.levels}});
  j["codings"] = codings;
  j["priors"] = priors_json(model.priors);
  j["config"] = {{"grid_size", kGridSize},
                 {"loess_degree", LoessConfig::degree},
                 {"loess_span", model.config.marginal.loess.span},
                 {"mask_threshold", model.config.marginal.mask_threshold},
                 {"standardize", model.config.marginal.standardize}};
  j["provenance"] = {{"seed", model.provenance.seed},
                     {"config_digest", model.provenance.config_digest},
                     {"source", model.provenance.source}};
  json preds = json::array();
  for (std::size_t i = 0; i < model.predictors.size(); ++i) {
    const auto& p = model.predictors[i];
    json mask = json::array();
    for (auto m : p.mask) mask.push_back(m ? 1 : 0);
    preds.push_back({{"name", model.feature_names.at(i)},
                     {"dead", p.dead},
                     {"grid", {{"lo", p.grid.lo()}, {"hi", p.grid.hi()}}},
                     {"center", p.center},
                     {"scale", p.scale},
                     {"priors", priors_json(p.priors)},
                     {"n_train_used", p.n_train_used},
                     {"raw_weight", model.raw_weights.at(i)},
                     {"weight", model.weights.at(i)},
                     {"mask", mask},
                     {"raw_q", nullable_array(p.raw_q)},
                     {"q_smooth", nullable_array(p.q_smooth)}});
  }
  j["predictors"] = preds;
  return j.dump(1) + "\n";
}

SmoothRankModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(fmt::format("model: corrupted file ({})", e.what()));
  }
  try {
    check_version(j);
    SmoothRankModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!j.at("label_mapping").is_null()) {
      model.label_mapping = LabelMapping{j["label_mapping"].at("class1").get<std::string>(),
                                         j["label_mapping"].at("class2").get<std::string>()};
    }
    for (const auto& c : j.at("codings")) {
      model.codings.push_back(
          {c.at("column").get<std::string>(), c.at("levels").get<std::vector<std::string>>()});
    }
    model.priors = read_priors(j.at("priors"));
    const json& cfg = j.at("config");
    if (cfg.at("grid_size").get<std::size_t>() != kGridSize ||
        cfg.at("loess_degree").get<int>() != LoessConfig::degree) {
      throw ModelFormatError("model: grid size or LOESS degree not supported");
    }
    model.config.marginal.loess.span = cfg.at("loess_span").get<double>();
    model.config.marginal.mask_threshold = cfg.at("mask_threshold").get<double>();
    model.config.marginal.standardize = cfg.at("standardize").get<bool>();
    const json& prov = j.at("provenance");
    model.provenance.seed = prov.at("seed").get<std::uint64_t>();
    model.provenance.config_digest = prov.at("config_digest").get<std::string>();
    model.provenance.source = prov.at("source").get<std::string>();

    const json& preds = j.at("predictors");
    if (!preds.is_array() || preds.size() != model.feature_names.size()) {
      throw ModelFormatError("model: predictor count does not match feature names");
    }
    for (const auto& pj : preds) {
      MarginalPredictor p;
      p.dead = pj.at("dead").get<bool>();
      p.grid = Grid(pj.at("grid").at("lo").get<double>(), pj.at("grid").at("hi").get<double>());
      p.center = pj.at("center").get<double>();
      p.scale = pj.at("scale").get<double>();
      p.priors = read_priors(pj.at("priors"));
      p.n_train_used = pj.at("n_train_used").get<std::size_t>();
      const auto mask = pj.at("mask").get<std::vector<int>>();
      if (mask.size() != kGridSize) throw ModelFormatError("model: mask has the wrong length");
      for (int m : mask) p.mask.push_back(m ? 1 : 0);
      p.raw_q = read_nullable_array(pj.at("raw_q"));
      p.q_smooth = read_nullable_array(pj.at("q_smooth"));
      for (std::size_t k = 0; k < kGridSize; ++k) {
        if (!p.mask[k] && is_missing(p.q_smooth[k])) {
          throw ModelFormatError("model: unmasked grid point without a value");
        }
      }
      const double raw = pj.at("raw_weight").get<double>();
      const double w = pj.at("weight").get<double>();
      if (raw < 0.0 || w < 0.0) throw ModelFormatError("model: negative weight");
      model.predictors.push_back(std::move(p));
      model.raw_weights.push_back(raw);
      model.weights.push_back(w);
    }
    if (model.features_used() == 0) throw ModelFormatError("model: all weights are zero");
    return model;
  } catch (const json::exception& e) {
    throw ModelFormatError(fmt::format("model: malformed file ({})", e.what()));
  } catch (const NumericError& e) {
    throw ModelFormatError(fmt::format("model: malformed file ({})", e.what()));
  }
}

void save_model(const SmoothRankModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  out << model_to_json(model);
  if (!out) throw DataError(fmt::format("failed writing '{}'", path));
}

SmoothRankModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError(fmt::format("cannot read model '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace smoothrank
