#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "classifieds/error.hpp"
#include "classifieds/ingest.hpp"
#include "classifieds/keywords.hpp"
#include "classifieds/synthetic.hpp"

namespace classifieds::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Config values may arrive as JSON scalars or as the raw text of a
// "key = value" line.
std::string as_text(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

double as_double(const std::string& key, const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string text = as_text(v);
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "' expects a number, got '" + text + "'");
}

std::uint64_t as_unsigned(const std::string& key, const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::string text = as_text(v);
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("config key '" + key + "' expects a non-negative integer, got '" + text + "'");
}

bool as_bool(const std::string& key, const nlohmann::json& v) {
  if (v.is_boolean()) return v.get<bool>();
  const std::string text = as_text(v);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("config key '" + key + "' expects true or false, got '" + text + "'");
}

std::vector<std::string> as_list(const nlohmann::json& v) {
  if (v.is_array()) return v.get<std::vector<std::string>>();
  std::vector<std::string> out;
  std::stringstream in(as_text(v));
  for (std::string item; std::getline(in, item, ',');) {
    if (auto t = trim(item); !t.empty()) out.push_back(std::move(t));
  }
  return out;
}

template <typename Fn>
auto translate(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError("config key '" + key + "': " + e.what());
  }
}

std::string residual_name(ResidualMode mode) {
  return mode == ResidualMode::InSample ? "in_sample" : "out_of_fold";
}

std::string spread_name(Spread spread) {
  return spread == Spread::StdDev ? "std_dev" : "std_error";
}

std::vector<ClassifiedRecord> read_inputs(const RunConfig& config, std::ostream& err) {
  if (config.inputs.empty()) throw UsageError("no --input given");
  std::vector<ClassifiedRecord> records;
  for (const auto& path : config.inputs) {
    auto result = read_records(path);
    if (result.report.rejected > 0) {
      err << "warning: " << path << ": " << result.report.rejected << " row(s) rejected\n";
      for (const auto& r : result.report.rejections) {
        err << "  line " << r.line << ": " << r.reason << "\n";
      }
    }
    records.insert(records.end(), result.records.begin(), result.records.end());
  }
  return records;
}

bool blank_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return trim(content).empty();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

void finish(RunConfig& config) {
  config.stage1.seed = config.seed;
  if (!config.stopwords_file.empty()) {
    config.text.stopwords = load_stopwords(config.stopwords_file);
  }
  config.text.validate();
  config.cleaning.validate();
}

std::vector<double> prices(std::span<const ClassifiedRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<double>(r.price));
  return out;
}

// Options shared by the data-driven subcommands. Flags stay unset unless
// given, so that they override the config file only when present.
struct Flags {
  std::string config_file;
  std::vector<std::string> inputs;
  std::vector<std::string> sets;
  std::optional<std::string> category;
  std::optional<std::string> stage1;
  std::optional<std::size_t> ngram_max;
  std::optional<double> df_min;
  std::optional<double> df_max;
  std::optional<double> corr_threshold;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  void add_input(CLI::App* app) {
    app->add_option("--config", config_file, "flat config file: JSON object or key = value lines");
    app->add_option("--input", inputs, "input records (CSV or JSONL); repeatable");
    app->add_option("--set", sets, "override one config key, key=value; repeatable");
    app->add_option("--category", category, "apartment-rent, apartment-sale, house-rent, house-sale");
    app->add_option("--out", out, "output path");
  }
  void add_model(CLI::App* app) {
    app->add_option("--stage1", stage1, "stage-1 regressor: lr, nn or svr");
    app->add_option("--ngram-max", ngram_max, "longest n-gram");
    app->add_option("--df-min", df_min, "minimum document-frequency fraction");
    app->add_option("--df-max", df_max, "maximum document-frequency fraction");
    app->add_option("--corr-threshold", corr_threshold, "pairwise |correlation| pruning threshold");
    app->add_option("--seed", seed, "random seed");
  }
  void add_folds(CLI::App* app) { app->add_option("--folds", folds, "cross-validation folds"); }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_file.empty()) apply_config_file(config, config_file);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      apply_setting(config, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    if (!inputs.empty()) config.inputs = inputs;
    if (category) apply_setting(config, "category", *category);
    if (stage1) apply_setting(config, "stage1", *stage1);
    if (ngram_max) config.text.ngram_max = *ngram_max;
    if (df_min) config.text.df_min_fraction = *df_min;
    if (df_max) config.text.df_max_fraction = *df_max;
    if (corr_threshold) config.text.correlation_threshold = *corr_threshold;
    if (folds) config.folds = *folds;
    if (seed) config.seed = *seed;
    if (out) config.out = *out;
    finish(config);
    return config;
  }
};

int cmd_clean(const Flags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  if (config.out.empty()) throw UsageError("clean needs --out");
  std::vector<ClassifiedRecord> records;
  bool all_blank = true;
  for (const auto& path : config.inputs) all_blank = all_blank && blank_file(path);
  if (config.inputs.empty()) throw UsageError("no --input given");
  if (all_blank) {
    err << "warning: input is empty; writing an empty record file\n";
  } else {
    records = read_inputs(config, err);
  }

  CleaningStats stats;
  const auto cleaned = clean(records, config.category, config.cleaning, &stats);
  write_csv(std::filesystem::path(config.out), cleaned);
  nlohmann::json summary = {{"input", stats.input},
                            {"after_dedup", stats.after_dedup},
                            {"after_threshold", stats.after_threshold}};
  write_text_file(config.out + ".run.json",
                  nlohmann::json{{"run_config", to_json(config)}, {"counts", summary}}.dump(2) + "\n");
  out << "records: " << stats.input << " -> " << stats.after_dedup << " -> "
      << stats.after_threshold << " (input -> after dedup -> after threshold)\n";
  return kExitOk;
}

int cmd_train(const Flags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  if (config.out.empty()) throw UsageError("train needs --out");
  const auto records = read_inputs(config, err);
  auto model = fit_two_stage(records, config.stage1, config.text, config.two_stage);
  model.cleaning_config = config.cleaning;
  model.category = config.category;
  model.run_config = to_json(config);
  save_model(model, config.out);

  const auto actual = prices(records);
  const auto one = predict_stage1_only(model, records);
  const auto two = predict_two_stage(model, records);
  out << "trained on " << records.size() << " records, stage 1: " << to_string(config.stage1.kind)
      << ", " << model.kept_text_columns.size() << " text terms\n";
  out << "training RMSE, stage 1 only: " << rmse(one, actual) << "\n";
  out << "training RMSE, two-stage:    " << rmse(two, actual) << "\n";
  out << "model written to " << config.out << "\n";
  return kExitOk;
}

int cmd_evaluate(const Flags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  const auto records = read_inputs(config, err);
  CrossValidationOptions options;
  options.folds = config.folds;
  options.seed = config.seed;
  options.spread = config.spread;
  options.two_stage = config.two_stage;
  options.threads = config.threads;
  for (const auto& path : config.inputs) {
    options.dataset += (options.dataset.empty() ? "" : ",") +
                       std::filesystem::path(path).filename().string();
  }
  const auto report = cross_validate(records, config.category, config.stage1, config.text, options);
  out << format_report_table(report);
  if (!config.out.empty()) {
    auto j = to_json(report);
    j["run_config"] = to_json(config);
    write_text_file(config.out, j.dump(2) + "\n");
  }
  return kExitOk;
}

struct ModelFlags {
  std::string model;
  std::size_t top = 10;
  std::optional<std::string> out;
  std::vector<std::string> inputs;
  std::size_t index = 0;
  std::string attribution = "full";
  bool weighted = false;
};

int cmd_keywords(const ModelFlags& flags, std::ostream& out) {
  const auto model = load_model(flags.model);
  const auto table = keyword_table(model, flags.top);
  out << format_keyword_table(table);
  if (flags.out) {
    auto j = to_json(table);
    j["run_config"] = model.run_config;
    write_text_file(*flags.out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_highlight(const ModelFlags& flags, std::ostream& out, std::ostream& err) {
  const auto model = load_model(flags.model);
  RunConfig config;
  config.inputs = flags.inputs;
  const auto records = read_inputs(config, err);
  if (flags.index >= records.size()) {
    throw UsageError("--index " + std::to_string(flags.index) + " is out of range (" +
                     std::to_string(records.size()) + " records)");
  }
  HighlightOptions options;
  if (flags.attribution == "split") {
    options.attribution = Attribution::SplitEvenly;
  } else if (flags.attribution != "full") {
    throw UsageError("--attribution must be full or split");
  }
  if (flags.weighted) options.source = ScoreSource::WeightTimesValue;

  std::string html = render_html(highlight(model, records[flags.index], options));
  nlohmann::json provenance = {{"model_run_config", model.run_config},
                               {"input", flags.inputs},
                               {"index", flags.index},
                               {"attribution", flags.attribution},
                               {"weighted", flags.weighted}};
  std::string embedded = provenance.dump();
  for (std::size_t p = embedded.find("</"); p != std::string::npos; p = embedded.find("</", p + 3)) {
    embedded.replace(p, 2, "<\\/");
  }
  html.insert(html.find("</head>"),
              "<script type=\"application/json\" id=\"run-config\">" + embedded + "</script>\n");
  if (flags.out) {
    write_text_file(*flags.out, html);
  } else {
    out << html;
  }
  return kExitOk;
}

int cmd_synth(const SynthConfig& synth, const std::string& category, const std::string& path,
              std::ostream& out) {
  SynthConfig config = synth;
  config.category = translate("category", [&] { return parse_category(category); });
  const auto corpus = generate_synthetic(config);
  write_csv(std::filesystem::path(path), corpus.records);
  write_text_file(path + ".keywords.json", planted_keywords_json(corpus).dump(2) + "\n");
  out << "wrote " << corpus.records.size() << " records to " << path << " ("
      << corpus.keywords.size() << " planted keywords in " << path << ".keywords.json)\n";
  return kExitOk;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const nlohmann::json& v) {
  if (key == "input") {
    c.inputs = as_list(v);
  } else if (key == "category") {
    c.category = translate(key, [&] { return parse_category(as_text(v)); });
  } else if (key == "rent_avg_min") {
    c.cleaning.rent_avg_min = as_double(key, v);
  } else if (key == "rent_avg_max") {
    c.cleaning.rent_avg_max = as_double(key, v);
  } else if (key == "sale_avg_min") {
    c.cleaning.sale_avg_min = as_double(key, v);
  } else if (key == "sale_avg_max") {
    c.cleaning.sale_avg_max = as_double(key, v);
  } else if (key == "min_token_length") {
    c.text.min_token_length = as_unsigned(key, v);
  } else if (key == "ngram_max") {
    c.text.ngram_max = as_unsigned(key, v);
  } else if (key == "df_min") {
    c.text.df_min_fraction = as_double(key, v);
  } else if (key == "df_max") {
    c.text.df_max_fraction = as_double(key, v);
  } else if (key == "corr_threshold") {
    c.text.correlation_threshold = as_double(key, v);
  } else if (key == "tf_norm") {
    c.text.tf_norm = translate(key, [&] { return parse_tf_norm(as_text(v)); });
  } else if (key == "stopwords_file") {
    c.stopwords_file = as_text(v);
  } else if (key == "stage1") {
    c.stage1.kind = translate(key, [&] { return parse_regressor_kind(as_text(v)); });
  } else if (key == "ridge_lambda") {
    c.stage1.linear.ridge_lambda = as_double(key, v);
  } else if (key == "linear_standardize") {
    c.stage1.linear.standardize = as_bool(key, v);
  } else if (key == "mlp_hidden") {
    c.stage1.mlp.hidden = as_unsigned(key, v);
  } else if (key == "mlp_epochs") {
    c.stage1.mlp.epochs = as_unsigned(key, v);
  } else if (key == "mlp_learning_rate") {
    c.stage1.mlp.learning_rate = as_double(key, v);
  } else if (key == "mlp_lr_growth") {
    c.stage1.mlp.lr_growth = as_double(key, v);
  } else if (key == "svr_c") {
    c.stage1.svr.c = as_double(key, v);
  } else if (key == "svr_epsilon") {
    if (v.is_null() || as_text(v) == "auto") {
      c.stage1.svr.epsilon.reset();
    } else {
      c.stage1.svr.epsilon = as_double(key, v);
    }
  } else if (key == "svr_max_epochs") {
    c.stage1.svr.max_epochs = as_unsigned(key, v);
  } else if (key == "svr_tolerance") {
    c.stage1.svr.tolerance = as_double(key, v);
  } else if (key == "stage2_ridge_lambda") {
    c.two_stage.stage2.ridge_lambda = as_double(key, v);
  } else if (key == "residual_mode") {
    const auto text = as_text(v);
    if (text == "in_sample") {
      c.two_stage.residual_mode = ResidualMode::InSample;
    } else if (text == "out_of_fold") {
      c.two_stage.residual_mode = ResidualMode::OutOfFold;
    } else {
      throw UsageError("residual_mode must be in_sample or out_of_fold");
    }
  } else if (key == "residual_folds") {
    c.two_stage.residual_folds = as_unsigned(key, v);
  } else if (key == "folds") {
    c.folds = as_unsigned(key, v);
  } else if (key == "seed") {
    c.seed = as_unsigned(key, v);
  } else if (key == "spread") {
    const auto text = as_text(v);
    if (text == "std_dev") {
      c.spread = Spread::StdDev;
    } else if (text == "std_error") {
      c.spread = Spread::StdError;
    } else {
      throw UsageError("spread must be std_dev or std_error");
    }
  } else if (key == "threads") {
    c.threads = as_unsigned(key, v);
  } else if (key == "out") {
    c.out = as_text(v);
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  const std::string body = trim(text);
  if (body.starts_with("{")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) apply_setting(config, key, value);
    return;
  }
  std::istringstream in{std::string(text)};
  std::size_t number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(number) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(config, text.str());
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"input", c.inputs},
          {"category", to_string(c.category)},
          {"rent_avg_min", c.cleaning.rent_avg_min},
          {"rent_avg_max", c.cleaning.rent_avg_max},
          {"sale_avg_min", c.cleaning.sale_avg_min},
          {"sale_avg_max", c.cleaning.sale_avg_max},
          {"min_token_length", c.text.min_token_length},
          {"ngram_max", c.text.ngram_max},
          {"df_min", c.text.df_min_fraction},
          {"df_max", c.text.df_max_fraction},
          {"corr_threshold", c.text.correlation_threshold},
          {"tf_norm", std::string(to_string(c.text.tf_norm))},
          {"stopwords_file", c.stopwords_file},
          {"stage1", std::string(to_string(c.stage1.kind))},
          {"ridge_lambda", c.stage1.linear.ridge_lambda},
          {"linear_standardize", c.stage1.linear.standardize},
          {"mlp_hidden", c.stage1.mlp.hidden},
          {"mlp_epochs", c.stage1.mlp.epochs},
          {"mlp_learning_rate", c.stage1.mlp.learning_rate},
          {"mlp_lr_growth", c.stage1.mlp.lr_growth},
          {"svr_c", c.stage1.svr.c},
          {"svr_epsilon", c.stage1.svr.epsilon ? nlohmann::json(*c.stage1.svr.epsilon)
                                               : nlohmann::json("auto")},
          {"svr_max_epochs", c.stage1.svr.max_epochs},
          {"svr_tolerance", c.stage1.svr.tolerance},
          {"stage2_ridge_lambda", c.two_stage.stage2.ridge_lambda},
          {"residual_mode", residual_name(c.two_stage.residual_mode)},
          {"residual_folds", c.two_stage.residual_folds},
          {"folds", c.folds},
          {"seed", c.seed},
          {"spread", spread_name(c.spread)},
          {"threads", c.threads},
          {"out", c.out}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage price regression over real-estate classifieds"};
  app.require_subcommand(1);

  Flags clean_flags;
  auto* clean_cmd = app.add_subcommand("clean", "deduplicate, drop price outliers, lower-case");
  clean_flags.add_input(clean_cmd);

  Flags train_flags;
  auto* train_cmd = app.add_subcommand("train", "fit a two-stage model and save it");
  train_flags.add_input(train_cmd);
  train_flags.add_model(train_cmd);

  Flags eval_flags;
  auto* eval_cmd = app.add_subcommand("evaluate", "k-fold comparison with and without text");
  eval_flags.add_input(eval_cmd);
  eval_flags.add_model(eval_cmd);
  eval_flags.add_folds(eval_cmd);

  ModelFlags kw_flags;
  auto* kw_cmd = app.add_subcommand("keywords", "strongest positive and negative terms");
  kw_cmd->add_option("--model", kw_flags.model, "model file")->required();
  kw_cmd->add_option("--top", kw_flags.top, "rows per sign")->capture_default_str();
  kw_cmd->add_option("--out", kw_flags.out, "also write the table as JSON");

  ModelFlags hl_flags;
  auto* hl_cmd = app.add_subcommand("highlight", "colour a classified by term weights as HTML");
  hl_cmd->add_option("--model", hl_flags.model, "model file")->required();
  hl_cmd->add_option("--input", hl_flags.inputs, "records file")->required();
  hl_cmd->add_option("--index", hl_flags.index, "record index in the input")->capture_default_str();
  hl_cmd->add_option("--out", hl_flags.out, "HTML output path (default stdout)");
  hl_cmd->add_option("--attribution", hl_flags.attribution, "n-gram weight per token: full or split")
      ->capture_default_str();
  hl_cmd->add_flag("--weighted", hl_flags.weighted, "scale weights by the document's TF-IDF values");

  SynthConfig synth;
  std::string synth_category = "apartment-rent";
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with planted keywords");
  synth_cmd->add_option("--out", synth_out, "CSV output path")->required();
  synth_cmd->add_option("--records", synth.records, "number of records")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--sigma", synth.noise_sigma, "Gaussian price noise")->capture_default_str();
  synth_cmd->add_option("--keywords", synth.keyword_count, "planted keywords (max 20)")
      ->capture_default_str();
  synth_cmd->add_option("--keyword-probability", synth.keyword_probability,
                        "chance each keyword appears in a document")
      ->capture_default_str();
  synth_cmd->add_option("--effect-min", synth.effect_min, "smallest |effect|")->capture_default_str();
  synth_cmd->add_option("--effect-max", synth.effect_max, "largest |effect|")->capture_default_str();
  synth_cmd->add_option("--fillers", synth.filler_words, "neutral filler vocabulary size")
      ->capture_default_str();
  synth_cmd->add_option("--category", synth_category, "listing category")->capture_default_str();
  synth_cmd->add_flag("--null-effect", synth.null_effect, "plant keywords with no price effect");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*clean_cmd) return cmd_clean(clean_flags, out, err);
    if (*train_cmd) return cmd_train(train_flags, out, err);
    if (*eval_cmd) return cmd_evaluate(eval_flags, out, err);
    if (*kw_cmd) return cmd_keywords(kw_flags, out);
    if (*hl_cmd) return cmd_highlight(hl_flags, out, err);
    if (*synth_cmd) return cmd_synth(synth, synth_category, synth_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace classifieds::cli
