#include "classifieds/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "classifieds/error.hpp"

namespace classifieds {

namespace {

Eigen::VectorXd prices_of(std::span<const ClassifiedRecord> records) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = static_cast<double>(records[i].price);
  }
  return y;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

// Stage-1 predictions for each record from a model fitted without that record.
Eigen::VectorXd out_of_fold_predictions(const RegressorSpec& spec, const FeatureMatrix& x,
                                        const Eigen::VectorXd& y, std::size_t folds) {
  const std::size_t n = x.rows();
  folds = std::clamp<std::size_t>(folds, 2, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t k = 0; k < n; ++k) (k % folds == f ? test : train).push_back(order[k]);
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train.size()));
    for (std::size_t k = 0; k < train.size(); ++k) {
      y_train(static_cast<Eigen::Index>(k)) = y(static_cast<Eigen::Index>(train[k]));
    }
    const auto model = fit(spec, x.select_rows(train), y_train);
    const auto predicted = model.predict(x.select_rows(test));
    for (std::size_t k = 0; k < test.size(); ++k) {
      out(static_cast<Eigen::Index>(test[k])) = predicted(static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorKind::FormatVersionMismatch, what);
}

}  // namespace

TwoStageModel fit_two_stage(std::span<const ClassifiedRecord> records,
                            const RegressorSpec& stage1_spec, const TextConfig& text_config,
                            const TwoStageOptions& options) {
  if (records.size() < 2) {
    throw Error(ErrorKind::TooFewRecords, "two-stage fitting needs at least two records");
  }
  text_config.validate();

  TwoStageModel model;
  model.text_config = text_config;

  // Stage 1: structured features against price.
  model.location_encoder = fit_location_encoder(records);
  const FeatureMatrix structured = encode_structured(records, model.location_encoder);
  const Eigen::VectorXd price = prices_of(records);
  model.stage1 = fit(stage1_spec, structured, price);

  // Residual target for stage 2.
  const Eigen::VectorXd stage1_prediction =
      options.residual_mode == ResidualMode::InSample
          ? model.stage1.predict(structured)
          : out_of_fold_predictions(stage1_spec, structured, price, options.residual_folds);
  const Eigen::VectorXd residual = price - stage1_prediction;

  // Stage 2: TF-IDF text features against the residual.
  const auto docs = documents_of(records);
  model.vocabulary = fit_vocabulary(docs, text_config);
  const FeatureMatrix tfidf = tfidf_encode(docs, model.vocabulary, text_config);
  auto filtered = correlation_filter(tfidf, text_config.correlation_threshold);
  model.kept_text_columns = filtered.matrix.column_names();

  RegressorSpec stage2_spec;
  stage2_spec.kind = RegressorKind::Linear;
  stage2_spec.linear = options.stage2;
  stage2_spec.seed = stage1_spec.seed;
  model.stage2 = fit(stage2_spec, filtered.matrix, residual);
  return model;
}

FeatureMatrix structured_features(const TwoStageModel& model,
                                  std::span<const ClassifiedRecord> records) {
  return encode_structured(records, model.location_encoder);
}

FeatureMatrix text_features(const TwoStageModel& model,
                            std::span<const ClassifiedRecord> records) {
  const auto docs = documents_of(records);
  const FeatureMatrix all = tfidf_encode(docs, model.vocabulary, model.text_config);
  std::vector<std::size_t> columns;
  columns.reserve(model.kept_text_columns.size());
  for (const auto& term : model.kept_text_columns) {
    const auto index = model.vocabulary.index_of(term);
    if (index >= model.vocabulary.size()) {
      throw Error(ErrorKind::ColumnMismatch, "kept column '" + term + "' missing from vocabulary");
    }
    columns.push_back(index);
  }
  return all.select_columns(columns);
}

std::vector<double> predict_stage1_only(const TwoStageModel& model,
                                        std::span<const ClassifiedRecord> records) {
  if (!model.fitted()) throw Error(ErrorKind::NotFitted, "two-stage model is not fitted");
  return to_std(model.stage1.predict(structured_features(model, records)));
}

std::vector<double> stage2_component(const TwoStageModel& model,
                                     std::span<const ClassifiedRecord> records) {
  if (!model.fitted()) throw Error(ErrorKind::NotFitted, "two-stage model is not fitted");
  return to_std(model.stage2.predict(text_features(model, records)));
}

std::vector<double> predict_two_stage(const TwoStageModel& model,
                                      std::span<const ClassifiedRecord> records) {
  auto total = predict_stage1_only(model, records);
  const auto text = stage2_component(model, records);
  for (std::size_t i = 0; i < total.size(); ++i) total[i] = total[i] + text[i];
  return total;
}

nlohmann::json to_json(const TextConfig& config) {
  return {{"min_token_length", config.min_token_length},
          {"ngram_max", config.ngram_max},
          {"df_min_fraction", config.df_min_fraction},
          {"df_max_fraction", config.df_max_fraction},
          {"correlation_threshold", config.correlation_threshold},
          {"tf_norm", std::string(to_string(config.tf_norm))},
          {"stopwords", std::vector<std::string>(config.stopwords.begin(), config.stopwords.end())}};
}

TextConfig text_config_from_json(const nlohmann::json& j) {
  TextConfig config;
  config.min_token_length = j.at("min_token_length").get<std::size_t>();
  config.ngram_max = j.at("ngram_max").get<std::size_t>();
  config.df_min_fraction = j.at("df_min_fraction").get<double>();
  config.df_max_fraction = j.at("df_max_fraction").get<double>();
  config.correlation_threshold = j.at("correlation_threshold").get<double>();
  config.tf_norm = parse_tf_norm(j.at("tf_norm").get<std::string>());
  const auto words = j.at("stopwords").get<std::vector<std::string>>();
  config.stopwords = std::set<std::string>(words.begin(), words.end());
  return config;
}

nlohmann::json to_json(const CleaningConfig& config) {
  return {{"rent_avg_min", config.rent_avg_min},
          {"rent_avg_max", config.rent_avg_max},
          {"sale_avg_min", config.sale_avg_min},
          {"sale_avg_max", config.sale_avg_max}};
}

CleaningConfig cleaning_config_from_json(const nlohmann::json& j) {
  CleaningConfig config;
  config.rent_avg_min = j.at("rent_avg_min").get<double>();
  config.rent_avg_max = j.at("rent_avg_max").get<double>();
  config.sale_avg_min = j.at("sale_avg_min").get<double>();
  config.sale_avg_max = j.at("sale_avg_max").get<double>();
  return config;
}

nlohmann::json model_to_json(const TwoStageModel& model) {
  if (!model.fitted()) throw Error(ErrorKind::NotFitted, "two-stage model is not fitted");
  const auto weights = model.stage2.linear_weights();

  nlohmann::json stage2_weights = nlohmann::json::array();
  for (const auto& [term, w] : weights.weights) stage2_weights.push_back({term, w});

  nlohmann::json j;
  j["format"] = kModelFormatName;
  j["format_version"] = kModelFormatVersion;
  j["stage1"] = model.stage1.to_json();
  j["stage2"] = {{"weights", stage2_weights},
                 {"intercept", weights.intercept},
                 {"spec", to_json(model.stage2.spec())}};
  j["vocabulary"] = {{"terms", model.vocabulary.terms()},
                     {"doc_frequency", model.vocabulary.doc_frequency()},
                     {"corpus_size", model.vocabulary.corpus_size()}};
  j["location_encoder"] = {{"locations", model.location_encoder.locations()}};
  j["text_config"] = to_json(model.text_config);
  j["cleaning_config"] = to_json(model.cleaning_config);
  j["category"] = model.category ? nlohmann::json(to_string(*model.category)) : nlohmann::json();
  j["run_config"] = model.run_config;
  return j;
}

TwoStageModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format") || j["format"] != kModelFormatName) {
    corrupt("not a two-stage model document");
  }
  if (!j.contains("format_version") || j["format_version"] != kModelFormatVersion) {
    corrupt("unsupported model format version (expected " + std::to_string(kModelFormatVersion) +
            ")");
  }
  try {
    TwoStageModel model;
    model.text_config = text_config_from_json(j.at("text_config"));
    model.cleaning_config = cleaning_config_from_json(j.at("cleaning_config"));
    if (!j.at("category").is_null()) {
      model.category = parse_category(j.at("category").get<std::string>());
    }
    model.run_config = j.value("run_config", nlohmann::json());

    const auto& vocab = j.at("vocabulary");
    model.vocabulary = TextVocabulary(vocab.at("terms").get<std::vector<std::string>>(),
                                      vocab.at("doc_frequency").get<std::vector<std::size_t>>(),
                                      vocab.at("corpus_size").get<std::size_t>());
    model.location_encoder =
        LocationEncoder(j.at("location_encoder").at("locations").get<std::vector<std::string>>());
    model.stage1 = FittedRegressor::from_json(j.at("stage1"));

    const auto& stage2 = j.at("stage2");
    const auto spec = regressor_spec_from_json(stage2.at("spec"));
    if (spec.kind != RegressorKind::Linear) corrupt("stage 2 must be linear");
    std::vector<std::string> terms;
    LinearModel linear;
    const auto& weights = stage2.at("weights");
    linear.weights.resize(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t k = 0; k < weights.size(); ++k) {
      terms.push_back(weights[k].at(0).get<std::string>());
      linear.weights(static_cast<Eigen::Index>(k)) = weights[k].at(1).get<double>();
      if (model.vocabulary.index_of(terms.back()) >= model.vocabulary.size()) {
        corrupt("stage-2 term '" + terms.back() + "' is not in the vocabulary");
      }
    }
    linear.intercept = stage2.at("intercept").get<double>();
    model.kept_text_columns = terms;
    model.stage2 = FittedRegressor(spec, std::move(terms), std::move(linear));
    return model;
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("malformed model document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatVersionMismatch) throw;
    corrupt(std::string("invalid model document: ") + e.what());
  }
}

void save_model(const TwoStageModel& model, const std::filesystem::path& path) {
  const std::string text = model_to_json(model).dump(2) + "\n";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

TwoStageModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open model file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace classifieds
