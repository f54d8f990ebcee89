#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "classifieds/feature_matrix.hpp"
#include "classifieds/record.hpp"
#include "classifieds/regressor.hpp"
#include "classifieds/structured.hpp"
#include "classifieds/text.hpp"

namespace classifieds {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "classifieds-two-stage-model";

/// Where the stage-2 residual target comes from.
enum class ResidualMode {
  InSample,   // stage-1 fitted on all training records, applied back to them
  OutOfFold,  // each record's stage-1 prediction comes from a model that never saw it
};

struct TwoStageOptions {
  ResidualMode residual_mode = ResidualMode::InSample;
  std::size_t residual_folds = 5;
  LinearParams stage2;
};

/// Stage 1 predicts price from structured features with any regressor kind;
/// stage 2 is a linear model over TF-IDF terms fitted to the stage-1 residual.
struct TwoStageModel {
  LocationEncoder location_encoder;
  TextConfig text_config;
  TextVocabulary vocabulary;
  std::vector<std::string> kept_text_columns;  // after the correlation filter
  FittedRegressor stage1;
  FittedRegressor stage2;  // always linear

  // Provenance carried into the model file.
  CleaningConfig cleaning_config;
  std::optional<ListingCategory> category;
  nlohmann::json run_config;  // null unless set by the caller

  bool fitted() const noexcept { return stage1.fitted() && stage2.fitted(); }
};

/// Expects cleaned records (at least two). Throws TooFewRecords.
TwoStageModel fit_two_stage(std::span<const ClassifiedRecord> records,
                            const RegressorSpec& stage1_spec, const TextConfig& text_config,
                            const TwoStageOptions& options = {});

FeatureMatrix structured_features(const TwoStageModel& model,
                                  std::span<const ClassifiedRecord> records);
/// TF-IDF over the model vocabulary, restricted to the kept columns.
FeatureMatrix text_features(const TwoStageModel& model,
                            std::span<const ClassifiedRecord> records);

std::vector<double> predict_stage1_only(const TwoStageModel& model,
                                        std::span<const ClassifiedRecord> records);
std::vector<double> stage2_component(const TwoStageModel& model,
                                     std::span<const ClassifiedRecord> records);
/// stage1 + stage2, summed in that order for every record.
std::vector<double> predict_two_stage(const TwoStageModel& model,
                                      std::span<const ClassifiedRecord> records);

nlohmann::json to_json(const TextConfig& config);
TextConfig text_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CleaningConfig& config);
CleaningConfig cleaning_config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const TwoStageModel& model);
/// Throws FormatVersionMismatch on a foreign or corrupt document.
TwoStageModel model_from_json(const nlohmann::json& j);

/// Byte-deterministic for a given model. Throws IoError.
void save_model(const TwoStageModel& model, const std::filesystem::path& path);
/// Throws IoError or FormatVersionMismatch.
TwoStageModel load_model(const std::filesystem::path& path);

}  // namespace classifieds
