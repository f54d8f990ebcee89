#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "classifieds/pipeline.hpp"
#include "classifieds/record.hpp"
#include "classifieds/regressor.hpp"
#include "classifieds/text.hpp"

namespace classifieds {

/// sqrt(mean((p - a)^2)). Throws LengthMismatch or EmptyVectors.
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Pearson correlation; nullopt when either side has zero variance.
/// Throws LengthMismatch, or InvalidArgument for fewer than two points.
std::optional<double> pearson(std::span<const double> predicted, std::span<const double> actual);

enum class Variant { OneStage, TwoStage };
std::string_view to_string(Variant variant) noexcept;

/// How the "±" spread across folds is reported.
enum class Spread { StdDev, StdError };

struct FoldResult {
  std::size_t fold = 0;
  Variant variant = Variant::OneStage;
  std::size_t test_size = 0;
  double rmse = 0.0;
  std::optional<double> correlation;
};

struct VariantSummary {
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  std::optional<double> corr_mean;  // over folds with a defined correlation
  std::optional<double> corr_std;
  std::size_t undefined_correlations = 0;
};

struct EvaluationReport {
  std::string dataset;
  std::string category;
  std::string stage1_kind;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  Spread spread = Spread::StdDev;
  std::vector<FoldResult> per_fold;
  VariantSummary one_stage;
  VariantSummary two_stage;

  const VariantSummary& summary(Variant v) const {
    return v == Variant::OneStage ? one_stage : two_stage;
  }
};

struct CrossValidationOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  Spread spread = Spread::StdDev;
  TwoStageOptions two_stage;
  std::string dataset;
  std::size_t threads = 0;  // folds evaluated concurrently; 0 = hardware concurrency
};

/// Seeded shuffle split into `folds` parts whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t count, std::size_t folds,
                                                 std::uint64_t seed);

/// Mean and spread; the spread uses the sample (n - 1) standard deviation.
std::pair<double, double> mean_and_spread(std::span<const double> values, Spread spread);

/// k-fold comparison of the stage-1-only model against the two-stage model.
/// Both variants share the stage-1 fit of each fold. Throws TooFewRecords.
EvaluationReport cross_validate(std::span<const ClassifiedRecord> records,
                                ListingCategory category, const RegressorSpec& stage1_spec,
                                const TextConfig& text_config,
                                const CrossValidationOptions& options = {});

nlohmann::json to_json(const EvaluationReport& report);
/// Two-column "w/o text-mining | with text mining" table.
std::string format_report_table(const EvaluationReport& report);

}  // namespace classifieds
