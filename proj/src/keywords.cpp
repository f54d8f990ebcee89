#include "classifieds/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "classifieds/error.hpp"
#include "utf8.hpp"

namespace classifieds {

namespace {

void require_fitted(const TwoStageModel& model) {
  if (!model.fitted()) throw Error(ErrorKind::NotFitted, "two-stage model is not fitted");
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  detail::for_each_code_point(s, [&](UChar32, std::string_view) { ++n; });
  return n;
}

int channel_byte(double value) {
  return static_cast<int>(std::floor(std::clamp(value, 0.0, 1.0) * 255.0 + 0.5));
}

std::string escape_html(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

KeywordTable keyword_table(const TwoStageModel& model, std::size_t top_k) {
  require_fitted(model);
  if (top_k == 0) throw Error(ErrorKind::InvalidArgument, "top_k must be at least 1");

  KeywordTable table;
  table.top_k = top_k;
  for (const auto& [term, w] : model.stage2.linear_weights().weights) {
    if (w > 0.0) table.positive.push_back({term, w});
    if (w < 0.0) table.negative.push_back({term, w});
  }
  std::sort(table.positive.begin(), table.positive.end(), [](const auto& a, const auto& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.term < b.term;
  });
  std::sort(table.negative.begin(), table.negative.end(), [](const auto& a, const auto& b) {
    return a.weight != b.weight ? a.weight < b.weight : a.term < b.term;
  });
  if (table.positive.size() > top_k) table.positive.resize(top_k);
  if (table.negative.size() > top_k) table.negative.resize(top_k);
  return table;
}

nlohmann::json to_json(const KeywordTable& table) {
  const auto entries = [](const std::vector<KeywordEntry>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : list) out.push_back({{"term", e.term}, {"weight", e.weight}});
    return out;
  };
  return {{"top_k", table.top_k},
          {"positive", entries(table.positive)},
          {"negative", entries(table.negative)}};
}

std::string format_keyword_table(const KeywordTable& table) {
  const auto cell = [](const std::vector<KeywordEntry>& list, std::size_t i) {
    if (i >= list.size()) return std::string();
    std::ostringstream out;
    out << list[i].term << " (" << std::showpos << std::fixed << std::setprecision(2)
        << list[i].weight << ")";
    return out.str();
  };
  const std::size_t rows = std::max(table.positive.size(), table.negative.size());
  std::size_t width = std::string("Positive words").size();
  for (std::size_t i = 0; i < rows; ++i) width = std::max(width, cell(table.positive, i).size());

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Positive words"
      << " | Negative words\n";
  out << std::string(width, '-') << "-+-" << std::string(width, '-') << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out << std::setw(static_cast<int>(width)) << cell(table.positive, i) << " | "
        << cell(table.negative, i) << "\n";
  }
  return out.str();
}

HighlightedDocument highlight(const TwoStageModel& model, const ClassifiedRecord& record,
                              const HighlightOptions& options) {
  require_fitted(model);
  const auto& config = model.text_config;

  std::unordered_map<std::string, double> weight_of;
  for (const auto& [term, w] : model.stage2.linear_weights().weights) weight_of.emplace(term, w);

  std::unordered_map<std::string, double> value_of;
  if (options.source == ScoreSource::WeightTimesValue) {
    ClassifiedRecord lowered_record = record;
    lowered_record.title = to_lower_utf8(record.title);
    lowered_record.description = to_lower_utf8(record.description);
    const ClassifiedRecord single[] = {lowered_record};
    const auto features = text_features(model, single);
    for (std::size_t c = 0; c < features.cols(); ++c) {
      value_of.emplace(features.column_names()[c], features(0, c));
    }
  }

  HighlightedDocument doc;
  std::vector<std::string> lowered;
  std::vector<std::size_t> kept;  // positions surviving the tokenizer filters
  for (auto& word : split_words(document_text({record.title, record.description}))) {
    auto lower = to_lower_utf8(word);
    if (code_point_count(lower) >= config.min_token_length && !config.stopwords.contains(lower)) {
      kept.push_back(doc.tokens.size());
    }
    lowered.push_back(std::move(lower));
    doc.tokens.push_back({std::move(word), Rgb{}, 0.0});
  }

  for (std::size_t n = 1; n <= config.ngram_max && n <= kept.size(); ++n) {
    for (std::size_t start = 0; start + n <= kept.size(); ++start) {
      std::string term = lowered[kept[start]];
      for (std::size_t k = 1; k < n; ++k) term += "_" + lowered[kept[start + k]];
      const auto it = weight_of.find(term);
      if (it == weight_of.end()) continue;
      double score = it->second;
      if (options.source == ScoreSource::WeightTimesValue) score *= value_of.at(term);
      if (options.attribution == Attribution::SplitEvenly) score /= static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) doc.tokens[kept[start + k]].score += score;
    }
  }

  double max_abs = 0.0;
  for (const auto& t : doc.tokens) max_abs = std::max(max_abs, std::abs(t.score));
  if (max_abs > 0.0) {
    for (auto& t : doc.tokens) {
      const double intensity = std::abs(t.score) / max_abs;
      if (t.score < 0.0) t.color = {intensity, 0.0, 0.0};
      if (t.score > 0.0) t.color = {0.0, 0.0, intensity};
    }
  }
  return doc;
}

std::string render_html(const HighlightedDocument& document) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n"
      << "<html>\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>Highlighted classified</title>\n</head>\n<body>\n";
  if (!document.tokens.empty()) {
    out << "<p>";
    for (std::size_t i = 0; i < document.tokens.size(); ++i) {
      const auto& t = document.tokens[i];
      if (i > 0) out << ' ';
      out << "<span style=\"color: rgb(" << channel_byte(t.color.r) << ','
          << channel_byte(t.color.g) << ',' << channel_byte(t.color.b) << ")\">"
          << escape_html(t.text) << "</span>";
    }
    out << "</p>\n";
  }
  out << "</body>\n</html>\n";
  return out.str();
}

void render_html(const HighlightedDocument& document, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << render_html(document);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace classifieds
