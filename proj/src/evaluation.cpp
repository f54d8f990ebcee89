#include "classifieds/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "classifieds/error.hpp"

namespace classifieds {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(a.size()) + " predictions for " + std::to_string(b.size()) +
                    " actual values");
  }
}

struct FoldOutcome {
  FoldResult one_stage;
  FoldResult two_stage;
};

FoldOutcome evaluate_fold(std::span<const ClassifiedRecord> records,
                          const std::vector<std::size_t>& test_rows, std::size_t fold,
                          const RegressorSpec& stage1_spec, const TextConfig& text_config,
                          const TwoStageOptions& options) {
  std::vector<bool> is_test(records.size(), false);
  for (const auto r : test_rows) is_test[r] = true;
  std::vector<ClassifiedRecord> train;
  std::vector<ClassifiedRecord> test;
  train.reserve(records.size() - test_rows.size());
  test.reserve(test_rows.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!is_test[i]) train.push_back(records[i]);
  }
  for (const auto r : test_rows) test.push_back(records[r]);

  const auto model = fit_two_stage(train, stage1_spec, text_config, options);
  std::vector<double> actual;
  actual.reserve(test.size());
  for (const auto& r : test) actual.push_back(static_cast<double>(r.price));

  const auto one = predict_stage1_only(model, test);
  const auto two = predict_two_stage(model, test);

  const auto result = [&](Variant v, const std::vector<double>& predicted) {
    FoldResult out;
    out.fold = fold;
    out.variant = v;
    out.test_size = test.size();
    out.rmse = rmse(predicted, actual);
    if (test.size() >= 2) out.correlation = pearson(predicted, actual);
    return out;
  };
  return {result(Variant::OneStage, one), result(Variant::TwoStage, two)};
}

VariantSummary summarise(const std::vector<FoldResult>& folds, Variant variant, Spread spread) {
  std::vector<double> errors;
  std::vector<double> correlations;
  VariantSummary summary;
  for (const auto& f : folds) {
    if (f.variant != variant) continue;
    errors.push_back(f.rmse);
    if (f.correlation) {
      correlations.push_back(*f.correlation);
    } else {
      ++summary.undefined_correlations;
    }
  }
  std::tie(summary.rmse_mean, summary.rmse_std) = mean_and_spread(errors, spread);
  if (!correlations.empty()) {
    const auto [mean, sd] = mean_and_spread(correlations, spread);
    summary.corr_mean = mean;
    summary.corr_std = sd;
  }
  return summary;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

std::string plus_minus(double mean, double spread, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << mean << " +/- " << spread;
  return out.str();
}

}  // namespace

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  check_lengths(predicted, actual);
  if (predicted.empty()) throw Error(ErrorKind::EmptyVectors, "rmse of empty vectors");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

std::optional<double> pearson(std::span<const double> predicted, std::span<const double> actual) {
  check_lengths(predicted, actual);
  if (predicted.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "pearson needs at least two points");
  }
  const auto n = static_cast<double>(predicted.size());
  const double mp = std::accumulate(predicted.begin(), predicted.end(), 0.0) / n;
  const double ma = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
  double spp = 0.0;
  double saa = 0.0;
  double spa = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double dp = predicted[i] - mp;
    const double da = actual[i] - ma;
    spp += dp * dp;
    saa += da * da;
    spa += dp * da;
  }
  if (spp == 0.0 || saa == 0.0) return std::nullopt;
  return std::clamp(spa / std::sqrt(spp * saa), -1.0, 1.0);
}

std::string_view to_string(Variant variant) noexcept {
  return variant == Variant::OneStage ? "one_stage" : "two_stage";
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t count, std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "need at least two folds");
  if (count < folds) {
    throw Error(ErrorKind::TooFewRecords, std::to_string(count) + " records cannot fill " +
                                              std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<std::size_t>> out(folds);
  const std::size_t base = count / folds;
  const std::size_t extra = count % folds;
  std::size_t next = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(next),
                  order.begin() + static_cast<std::ptrdiff_t>(next + size));
    next += size;
  }
  return out;
}

std::pair<double, double> mean_and_spread(std::span<const double> values, Spread spread) {
  if (values.empty()) return {0.0, 0.0};
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / (n - 1.0));
  if (spread == Spread::StdError) sd /= std::sqrt(n);
  return {mean, sd};
}

EvaluationReport cross_validate(std::span<const ClassifiedRecord> records,
                                ListingCategory category, const RegressorSpec& stage1_spec,
                                const TextConfig& text_config,
                                const CrossValidationOptions& options) {
  if (options.folds < 2) throw Error(ErrorKind::InvalidArgument, "need at least two folds");
  if (records.size() < options.folds) {
    throw Error(ErrorKind::TooFewRecords, std::to_string(records.size()) +
                                              " records cannot fill " +
                                              std::to_string(options.folds) + " folds");
  }
  const auto folds = make_folds(records.size(), options.folds, options.seed);

  // Folds are independent; results are collected in fold order so the report
  // matches a sequential run exactly.
  std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::max<std::size_t>(threads, 1);
  std::vector<FoldOutcome> outcomes;
  outcomes.reserve(folds.size());
  for (std::size_t first = 0; first < folds.size(); first += threads) {
    const std::size_t last = std::min(folds.size(), first + threads);
    std::vector<std::future<FoldOutcome>> pending;
    for (std::size_t f = first; f < last; ++f) {
      pending.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, [&, f] {
        return evaluate_fold(records, folds[f], f, stage1_spec, text_config, options.two_stage);
      }));
    }
    for (auto& p : pending) outcomes.push_back(p.get());
  }

  EvaluationReport report;
  report.dataset = options.dataset;
  report.category = to_string(category);
  report.stage1_kind = std::string(to_string(stage1_spec.kind));
  report.folds = options.folds;
  report.seed = options.seed;
  report.spread = options.spread;
  for (const auto& outcome : outcomes) {
    report.per_fold.push_back(outcome.one_stage);
    report.per_fold.push_back(outcome.two_stage);
  }
  report.one_stage = summarise(report.per_fold, Variant::OneStage, options.spread);
  report.two_stage = summarise(report.per_fold, Variant::TwoStage, options.spread);
  return report;
}

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.per_fold) {
    folds.push_back({{"fold", f.fold},
                     {"variant", std::string(to_string(f.variant))},
                     {"test_size", f.test_size},
                     {"rmse", f.rmse},
                     {"correlation", optional_json(f.correlation)}});
  }
  const auto summary = [](const VariantSummary& s) {
    return nlohmann::json{{"rmse_mean", s.rmse_mean},
                          {"rmse_std", s.rmse_std},
                          {"corr_mean", optional_json(s.corr_mean)},
                          {"corr_std", optional_json(s.corr_std)},
                          {"undefined_correlations", s.undefined_correlations}};
  };
  return {{"dataset", report.dataset},
          {"category", report.category},
          {"stage1_kind", report.stage1_kind},
          {"folds", report.folds},
          {"seed", report.seed},
          {"spread", report.spread == Spread::StdDev ? "std_dev" : "std_error"},
          {"per_fold", folds},
          {"one_stage", summary(report.one_stage)},
          {"two_stage", summary(report.two_stage)}};
}

std::string format_report_table(const EvaluationReport& report) {
  const auto corr = [](const VariantSummary& s) {
    return s.corr_mean ? plus_minus(*s.corr_mean, *s.corr_std, 3) : std::string("undefined");
  };
  const std::string rows[3][3] = {
      {"", "w/o text-mining", "with text mining"},
      {"RMSE", plus_minus(report.one_stage.rmse_mean, report.one_stage.rmse_std, 3),
       plus_minus(report.two_stage.rmse_mean, report.two_stage.rmse_std, 3)},
      {"Corr.", corr(report.one_stage), corr(report.two_stage)},
  };
  std::size_t width[3] = {0, 0, 0};
  for (const auto& row : rows) {
    for (int c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());
  }

  std::ostringstream out;
  out << "dataset: " << (report.dataset.empty() ? "-" : report.dataset) << " ("
      << report.category << "), stage 1: " << report.stage1_kind << ", " << report.folds
      << " folds, seed " << report.seed << "\n";
  for (const auto& row : rows) {
    out << "| " << std::left << std::setw(static_cast<int>(width[0])) << row[0] << " | "
        << std::setw(static_cast<int>(width[1])) << row[1] << " | "
        << std::setw(static_cast<int>(width[2])) << row[2] << " |\n";
  }
  const auto undefined = report.one_stage.undefined_correlations +
                         report.two_stage.undefined_correlations;
  if (undefined > 0) out << "undefined correlations excluded: " << undefined << "\n";
  return out.str();
}

}  // namespace classifieds
