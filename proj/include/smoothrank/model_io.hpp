#pragma once

#include <string>

#include "smoothrank/error.hpp"
#include "smoothrank/ranker.hpp"

namespace smoothrank {

inline constexpr const char* kModelFormat = "smoothrank-model/1";

/// Unreadable, truncated or wrong-version model file.
class ModelFormatError : public DataError {
 public:
  using DataError::DataError;
};

std::string model_to_json(const SmoothRankModel& model);
SmoothRankModel model_from_json(const std::string& text);

void save_model(const SmoothRankModel& model, const std::string& path);
SmoothRankModel load_model(const std::string& path);

}  // namespace smoothrank
