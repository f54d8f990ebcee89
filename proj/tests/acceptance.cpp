// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "classifieds/evaluation.hpp"
#include "classifieds/ingest.hpp"
#include "classifieds/keywords.hpp"
#include "classifieds/pipeline.hpp"
#include "classifieds/synthetic.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace classifieds;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::filesystem::path scratch() {
  static const auto dir = [] {
    std::random_device rd;
    auto p = std::filesystem::temp_directory_path() /
             ("classifieds_acceptance_" + std::to_string(rd()));
    std::filesystem::create_directories(p);
    return p;
  }();
  return dir;
}

// Generates a corpus through the CLI `synth` subcommand and reads it back.
std::vector<ClassifiedRecord> synth_via_cli(const std::string& name,
                                            const std::vector<std::string>& flags) {
  const auto path = (scratch() / name).string();
  std::vector<std::string> args = {"classifieds", "synth", "--out", path};
  args.insert(args.end(), flags.begin(), flags.end());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
    throw std::runtime_error("synth failed: " + err.str());
  }
  return read_csv(path).records;
}

std::string fmt(double v, int precision = 1) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

Outcome directional() {
  const auto start = std::chrono::steady_clock::now();
  const auto records = synth_via_cli("directional.csv", {"--records", "2000", "--sigma", "5000"});
  bool pass = true;
  std::string detail;
  double lr_gain = 0.0;
  for (const auto kind : {RegressorKind::Linear, RegressorKind::Mlp, RegressorKind::Svr}) {
    RegressorSpec spec;
    spec.kind = kind;
    CrossValidationOptions options;
    options.folds = 10;
    const auto report = cross_validate(records, {}, spec, {}, options);
    const double one = report.one_stage.rmse_mean;
    const double two = report.two_stage.rmse_mean;
    pass = pass && two < one;
    if (kind == RegressorKind::Linear) lr_gain = 1.0 - two / one;
    detail += std::string(to_string(kind)) + " " + fmt(one) + " -> " + fmt(two) + "; ";
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  pass = pass && lr_gain >= 0.25 && seconds < 120.0;
  detail += "lr improvement " + fmt(100 * lr_gain) + "%, " + fmt(seconds) + " s";
  return {pass, detail};
}

Outcome keyword_recovery() {
  SynthConfig cfg;
  cfg.records = 4000;
  cfg.noise_sigma = 0.0;
  const auto corpus = generate_synthetic(cfg);
  const auto model = fit_two_stage(corpus.records, {}, {});
  const auto table = keyword_table(model, 20);
  std::set<std::string> positive, negative;
  for (const auto& e : table.positive) positive.insert(e.term);
  for (const auto& e : table.negative) negative.insert(e.term);

  std::size_t recovered = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < corpus.keywords.size(); ++k) {
    const auto& planted = corpus.keywords[k];
    const bool found = planted.effect > 0 ? positive.contains(planted.term)
                                          : negative.contains(planted.term);
    if (!found) continue;
    ++recovered;
    const auto [with, without] = keyword_minimal_pair(corpus, k);
    const std::vector<ClassifiedRecord> pair = {with, without};
    const auto p = predict_two_stage(model, pair);
    worst = std::max(worst, std::abs((p[0] - p[1]) - planted.effect) / std::abs(planted.effect));
  }
  return {recovered >= 18 && worst <= 0.05,
          std::to_string(recovered) + "/20 planted keywords in the top-20 lists with the right "
              "sign; worst effect error " + fmt(100 * worst, 3) + "%"};
}

Outcome null_effect() {
  const auto records = synth_via_cli("null.csv", {"--records", "2000", "--null-effect"});
  CrossValidationOptions options;
  options.folds = 10;
  const auto report = cross_validate(records, {}, {}, {}, options);
  const double one = report.one_stage.rmse_mean;
  const double two = report.two_stage.rmse_mean;
  const double rel = std::abs(two - one) / one;
  return {rel <= 0.05, "one-stage " + fmt(one) + ", two-stage " + fmt(two) + ", difference " +
                           fmt(100 * rel, 2) + "%"};
}

Outcome formula_oracles() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t bad_rmse = 0, bad_pearson = 0, bad_tfidf = 0, bad_linear = 0;
  const std::size_t instances = 120;

  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> p(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 1000.0 * g(rng);
      p[i] = a[i] + 300.0 * g(rng);
    }
    const double r = rmse(p, a), want_r = oracle::rmse(p, a);
    if (std::abs(r - want_r) > 1e-12 * want_r) ++bad_rmse;
    const double c = *pearson(p, a), want_c = oracle::pearson(p, a);
    if (std::abs(c - want_c) > 1e-12 * std::abs(want_c)) ++bad_pearson;
  }

  const std::vector<std::string> words = {"palm", "villa", "marina", "pool", "view", "luxury",
                                          "garden", "sea", "with", "the", "deal", "burj",
                                          "tower", "studio", "metro", "quiet", "road", "plot"};
  const auto stop = default_stopwords();
  for (std::size_t t = 0; t < instances; ++t) {
    TextConfig cfg;
    cfg.ngram_max = 1 + rng() % 3;
    cfg.df_min_fraction = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
    cfg.df_max_fraction = std::uniform_real_distribution<double>(0.4, 1.0)(rng);
    std::vector<std::string> texts;
    std::vector<Document> docs;
    const std::size_t n = 2 + rng() % 25;
    for (std::size_t d = 0; d < n; ++d) {
      std::string s;
      for (std::size_t k = rng() % 12; k > 0; --k) s += words[rng() % words.size()] + " ";
      texts.push_back(s);
      docs.push_back({s, ""});
    }
    const auto vocab = fit_vocabulary(docs, cfg);
    const auto m = tfidf_encode(docs, vocab, cfg);
    const auto o = oracle::tfidf(texts, cfg.min_token_length, stop, cfg.ngram_max,
                                 cfg.df_min_fraction, cfg.df_max_fraction);
    bool ok = vocab.terms() == o.terms;
    for (std::size_t d = 0; ok && d < n; ++d) {
      for (std::size_t c = 0; c < o.terms.size(); ++c) {
        const double want = o.rows[d][c];
        if (std::abs(m(d, c) - want) > 1e-8 * std::abs(want)) ok = false;
      }
    }
    if (!ok) ++bad_tfidf;
  }

  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t p = 1 + rng() % 6;
    const std::size_t n = p + 2 + rng() % 30;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    std::vector<std::vector<double>> rows(n, std::vector<double>(p));
    for (std::size_t i = 0; i < n; ++i) {
      y(i) = 5.0 + g(rng);
      for (std::size_t j = 0; j < p; ++j) {
        x(i, j) = rows[i][j] = g(rng) * (1.0 + j);
        y(i) += (j % 2 ? -1.5 : 2.5) * x(i, j);
      }
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    const auto w = fit({}, FeatureMatrix(names, x), y).linear_weights();
    const auto want = oracle::ridge(rows, {y.data(), y.data() + n}, 1e-8);
    bool ok = std::abs(w.intercept - want[0]) <= 1e-8 * std::abs(want[0]);
    for (std::size_t j = 0; j < p; ++j) {
      ok = ok && std::abs(w.weights[j].second - want[j + 1]) <= 1e-8 * std::abs(want[j + 1]);
    }
    if (!ok) ++bad_linear;
  }
  return {bad_rmse + bad_pearson + bad_tfidf + bad_linear == 0,
          std::to_string(instances) + " instances each; mismatches rmse " +
              std::to_string(bad_rmse) + ", pearson " + std::to_string(bad_pearson) +
              ", tf-idf " + std::to_string(bad_tfidf) + ", linear " + std::to_string(bad_linear)};
}

Outcome mlp_gradient() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    auto net = MlpNetwork::random(10, 6, 1000 + point);
    Eigen::MatrixXd x(25, 10);
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) {
      for (int j = 0; j < 10; ++j) x(i, j) = g(rng);
      y(i) = g(rng);
    }
    const auto grad = net.loss_and_gradient(x, y).second;
    const Eigen::VectorXd theta = net.parameters();
    Eigen::VectorXd fd(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(theta(k)));
      Eigen::VectorXd t = theta;
      t(k) = theta(k) + h;
      net.set_parameters(t);
      const double up = net.loss(x, y);
      t(k) = theta(k) - h;
      net.set_parameters(t);
      fd(k) = (up - net.loss(x, y)) / (2 * h);
    }
    net.set_parameters(theta);
    worst = std::max(worst, (grad - fd).norm() / std::max(grad.norm(), fd.norm()));
  }
  return {worst < 1e-4, "20 points, worst relative error " + [&] {
            std::ostringstream s;
            s << worst;
            return s.str();
          }()};
}

Outcome svr_contract() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::size_t n = 200;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = u(rng);
    y(i) = 3.0 * x(i, 0) - 2.0 * x(i, 1) + 0.5 * x(i, 2) + 1.0;
  }
  RegressorSpec spec;
  spec.kind = RegressorKind::Svr;
  spec.svr.c = 1e4;
  spec.svr.epsilon = 0.01;
  const auto model = fit(spec, FeatureMatrix({"a", "b", "c"}, x), y);
  const double worst = (model.predict(FeatureMatrix({"a", "b", "c"}, x)) - y).cwiseAbs().maxCoeff();
  return {worst <= 0.011, "max |residual| " + fmt(worst, 5)};
}

Outcome cleaning_fixture() {
  const auto dir = std::filesystem::path(CLASSIFIEDS_TEST_DATA);
  CleaningStats a, b;
  clean(read_csv(dir / "cleaning_fixture.csv").records, {}, {}, &a);
  clean(read_csv(dir / "cleaning_fixture_one_outlier.csv").records, {}, {}, &b);
  const bool pass = a.input == 10 && a.after_dedup == 8 && a.after_threshold == 6 &&
                    b.input == 10 && b.after_dedup == 8 && b.after_threshold == 7;
  return {pass, "two outliers: " + std::to_string(a.input) + " -> " +
                    std::to_string(a.after_dedup) + " -> " + std::to_string(a.after_threshold) +
                    " (pinned 10 -> 8 -> 6); one outlier: " + std::to_string(b.input) + " -> " +
                    std::to_string(b.after_dedup) + " -> " + std::to_string(b.after_threshold) +
                    " (pinned 10 -> 8 -> 7)"};
}

std::vector<ClassifiedRecord> random_records(const SynthCorpus& corpus, std::size_t n,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> extra = {"the", "zzzzqx", "a", "with", "unknownword", "ac"};
  const std::vector<std::string> locations = {"Dubai Marina", "Al Barsha", "Nowhere Town"};
  std::vector<ClassifiedRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ClassifiedRecord r;
    r.beds = static_cast<std::int64_t>(rng() % 7);
    r.baths = 1 + static_cast<std::int64_t>(rng() % 5);
    r.size = 200 + static_cast<std::int64_t>(rng() % 4000);
    r.location = locations[rng() % locations.size()];
    r.price = 1;
    for (std::size_t w = rng() % 20; w > 0; --w) {
      std::string word;
      switch (rng() % 3) {
        case 0: word = corpus.keywords[rng() % corpus.keywords.size()].term; break;
        case 1: word = corpus.fillers[rng() % corpus.fillers.size()]; break;
        default: word = extra[rng() % extra.size()];
      }
      (rng() % 3 == 0 ? r.title : r.description) += word + " ";
    }
    out.push_back(r);
  }
  return out;
}

Outcome decomposition() {
  SynthConfig cfg;
  cfg.records = 2000;
  const auto corpus = generate_synthetic(cfg);
  std::size_t sum_mismatch = 0, diff_mismatch = 0, total = 0;
  for (const auto kind : {RegressorKind::Linear, RegressorKind::Mlp, RegressorKind::Svr}) {
    RegressorSpec spec;
    spec.kind = kind;
    const auto model = fit_two_stage(corpus.records, spec, {});
    const auto records = random_records(corpus, 1000, 99);
    const auto one = predict_stage1_only(model, records);
    const auto comp = stage2_component(model, records);
    const auto two = predict_two_stage(model, records);
    for (std::size_t i = 0; i < records.size(); ++i) {
      ++total;
      if (two[i] != one[i] + comp[i]) ++sum_mismatch;
      if (two[i] - one[i] != comp[i]) ++diff_mismatch;
    }
  }
  return {sum_mismatch == 0,
          std::to_string(total - sum_mismatch) + "/" + std::to_string(total) +
              " predictions equal stage1 + stage2 bit for bit; two - one reproduces the "
              "component exactly in " + std::to_string(total - diff_mismatch) + "/" +
              std::to_string(total)};
}

Outcome persistence() {
  SynthConfig cfg;
  cfg.records = 2000;
  const auto corpus = generate_synthetic(cfg);
  std::size_t mismatches = 0, total = 0;
  for (const auto kind : {RegressorKind::Linear, RegressorKind::Mlp, RegressorKind::Svr}) {
    RegressorSpec spec;
    spec.kind = kind;
    const auto model = fit_two_stage(corpus.records, spec, {});
    const auto path = scratch() / ("model_" + std::string(to_string(kind)) + ".json");
    save_model(model, path);
    const auto loaded = load_model(path);
    const auto a = predict_two_stage(model, corpus.records);
    const auto b = predict_two_stage(loaded, corpus.records);
    const auto c = predict_stage1_only(model, corpus.records);
    const auto d = predict_stage1_only(loaded, corpus.records);
    for (std::size_t i = 0; i < a.size(); ++i) {
      total += 2;
      mismatches += (a[i] != b[i]) + (c[i] != d[i]);
    }
  }
  return {mismatches == 0, std::to_string(total - mismatches) + "/" + std::to_string(total) +
                               " predictions identical after save/load (lr, nn, svr)"};
}

Outcome highlight_invariants() {
  std::mt19937_64 rng(314);
  std::size_t violations = 0, tokens = 0, unknown = 0;
  const TextConfig text;
  for (int trial = 0; trial < 100; ++trial) {
    SynthConfig cfg;
    cfg.records = 200 + rng() % 200;
    cfg.seed = rng();
    cfg.noise_sigma = static_cast<double>(rng() % 8000);
    const auto corpus = generate_synthetic(cfg);
    const auto model = fit_two_stage(corpus.records, {}, {});

    std::set<std::string> known;  // words that appear inside some kept term
    for (const auto& [term, w] : model.stage2.linear_weights().weights) {
      std::stringstream parts(term);
      for (std::string part; std::getline(parts, part, '_');) known.insert(part);
    }
    auto record = random_records(corpus, 1, rng())[0];
    record.title = "Amazing ROAD " + record.title;  // mixed case must still match
    const auto doc = highlight(model, record);
    double max_abs = 0.0;
    for (const auto& t : doc.tokens) max_abs = std::max(max_abs, std::abs(t.score));
    bool saturated = max_abs == 0.0;
    for (const auto& t : doc.tokens) {
      ++tokens;
      const auto& c = t.color;
      bool ok = c.g == 0.0;
      if (t.score > 0) ok = ok && c.r == 0.0 && c.b > 0.0 && c.b <= 1.0;
      if (t.score < 0) ok = ok && c.b == 0.0 && c.r > 0.0 && c.r <= 1.0;
      if (t.score == 0) ok = ok && c == Rgb{};
      if (max_abs > 0) {
        const double intensity = std::abs(t.score) / max_abs;
        ok = ok && std::max(c.r, c.b) == intensity;
        if (intensity == 1.0) saturated = true;
      }
      if (!known.contains(to_lower_utf8(t.text))) {
        ++unknown;
        ok = ok && c == Rgb{};
      }
      if (!ok) ++violations;
    }
    if (!saturated) ++violations;
  }
  return {violations == 0, "100 models/documents, " + std::to_string(tokens) + " tokens (" +
                               std::to_string(unknown) + " unknown), " +
                               std::to_string(violations) + " violations"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"directional improvement on planted corpus (lr, nn, svr)", directional},
      {"planted keyword recovery", keyword_recovery},
      {"null-effect control", null_effect},
      {"formula oracles", formula_oracles},
      {"MLP gradient check", mlp_gradient},
      {"SVR noiseless contract", svr_contract},
      {"cleaning fixture counts", cleaning_fixture},
      {"decomposition identity", decomposition},
      {"persistence round trip", persistence},
      {"highlight invariants", highlight_invariants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << ": "
              << criteria[i].first << " -- " << o.detail << std::endl;
  }
  std::error_code ec;
  std::filesystem::remove_all(scratch(), ec);
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
