#include <random>
#include <regex>

#include "doctest.h"

#include "classifieds/error.hpp"
#include "classifieds/keywords.hpp"
#include "classifieds/synthetic.hpp"

using namespace classifieds;

namespace {

TwoStageModel planted_model(std::size_t n = 1500) {
  SynthConfig cfg;
  cfg.records = n;
  cfg.noise_sigma = 1000.0;
  return fit_two_stage(generate_synthetic(cfg).records, {}, {});
}

}  // namespace

TEST_SUITE("keywords") {

TEST_CASE("table ordering and truncation") {
  const auto model = planted_model();
  const auto table = keyword_table(model, 4);
  REQUIRE(table.positive.size() == 4);
  REQUIRE(table.negative.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(table.positive[i - 1].weight >= table.positive[i].weight);
    CHECK(table.negative[i - 1].weight <= table.negative[i].weight);
  }
  for (const auto& e : table.positive) CHECK(e.weight > 0);
  for (const auto& e : table.negative) CHECK(e.weight < 0);

  const auto text = format_keyword_table(table);
  CHECK(text.rfind("Positive words", 0) == 0);
  CHECK(text.find("| Negative words") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  CHECK(to_json(table)["positive"].size() == 4);
  CHECK_THROWS_AS(keyword_table(model, 0), Error);
  CHECK_THROWS_AS(keyword_table(TwoStageModel{}, 3), Error);
}

TEST_CASE("planted positive terms head the positive list") {
  SynthConfig cfg;
  cfg.records = 1500;
  cfg.noise_sigma = 2000.0;
  const auto corpus = generate_synthetic(cfg);
  const auto model = fit_two_stage(corpus.records, {}, {});
  const auto table = keyword_table(model, 10);
  std::set<std::string> positive;
  for (const auto& k : corpus.keywords) {
    if (k.effect > 0) positive.insert(k.term);
  }
  for (const auto& e : table.positive) CHECK(positive.contains(e.term));
}

TEST_CASE("highlight invariants") {
  const auto model = planted_model();
  ClassifiedRecord r;
  r.title = "Palm Deal zzzzunknown";
  r.description = "the burj on a road";
  r.location = "Al Barsha";
  const auto doc = highlight(model, r);
  REQUIRE(doc.tokens.size() == 8);
  CHECK(doc.tokens[0].text == "Palm");  // original casing kept
  double max_abs = 0;
  for (const auto& t : doc.tokens) max_abs = std::max(max_abs, std::abs(t.score));
  bool saturated = false;
  for (const auto& t : doc.tokens) {
    CHECK(t.color.g == 0.0);
    if (t.score > 0) {
      CHECK(t.color.r == 0.0);
      CHECK(t.color.b == doctest::Approx(std::abs(t.score) / max_abs));
    } else if (t.score < 0) {
      CHECK(t.color.b == 0.0);
      CHECK(t.color.r == doctest::Approx(std::abs(t.score) / max_abs));
    } else {
      CHECK(t.color == Rgb{});
    }
    saturated = saturated || t.color.r == 1.0 || t.color.b == 1.0;
  }
  CHECK(saturated);
  CHECK(doc.tokens[2].color == Rgb{});  // unknown word
  CHECK(doc.tokens[3].color == Rgb{});  // stop word
  CHECK(doc.tokens[0].score > 0);
  CHECK(doc.tokens[1].score < 0);
}

TEST_CASE("n-gram weight reaches every covered token") {
  TwoStageModel model = planted_model();
  // Rebuild stage 2 by hand with a single bigram term.
  LinearModel lm;
  lm.weights = Eigen::VectorXd::Constant(1, -3.0);
  RegressorSpec spec;
  const std::vector<std::string> terms = {"cozy_flat"};
  model.vocabulary = TextVocabulary({"cozy_flat"}, {1}, 2);
  model.kept_text_columns = terms;
  model.stage2 = FittedRegressor(spec, terms, lm);
  ClassifiedRecord r{"cozy flat", "near cozy", 1, 1, 500, "x", 1};
  const auto full = highlight(model, r);
  CHECK(full.tokens[0].score == -3.0);
  CHECK(full.tokens[1].score == -3.0);
  CHECK(full.tokens[2].score == 0.0);
  CHECK(full.tokens[3].score == 0.0);
  HighlightOptions split;
  split.attribution = Attribution::SplitEvenly;
  CHECK(highlight(model, r, split).tokens[0].score == -1.5);
}

TEST_CASE("html rendering") {
  HighlightedDocument doc;
  doc.tokens = {{"Palm", {0, 0, 1}, 2.0}, {"<b>", {}, 0.0}, {"deal", {0.5, 0, 0}, -1.0}};
  const auto html = render_html(doc);
  CHECK(html == render_html(doc));
  CHECK(html.find("rgb(0,0,255)\">Palm<") != std::string::npos);
  CHECK(html.find("rgb(128,0,0)\">deal<") != std::string::npos);
  CHECK(html.find("&lt;b&gt;") != std::string::npos);
  CHECK(render_html(HighlightedDocument{}).find("<span") == std::string::npos);
}

TEST_CASE("zero-score document renders all black") {
  const auto model = planted_model();
  ClassifiedRecord r{"zzzz qqqq", "wwww", 1, 1, 500, "x", 1};
  const auto html = render_html(highlight(model, r));
  std::regex colour("rgb\\((\\d+),(\\d+),(\\d+)\\)");
  int spans = 0;
  for (std::sregex_iterator it(html.begin(), html.end(), colour), end; it != end; ++it) {
    CHECK((*it)[0] == "rgb(0,0,0)");
    ++spans;
  }
  CHECK(spans == 3);
}

}  // TEST_SUITE
