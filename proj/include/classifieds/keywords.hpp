#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "classifieds/pipeline.hpp"
#include "classifieds/record.hpp"

namespace classifieds {

struct KeywordEntry {
  std::string term;
  double weight = 0.0;

  bool operator==(const KeywordEntry&) const = default;
};

/// Strongest stage-2 terms by sign: positive descending, negative ascending,
/// ties broken lexicographically by term.
struct KeywordTable {
  std::vector<KeywordEntry> positive;
  std::vector<KeywordEntry> negative;
  std::size_t top_k = 0;
};

/// Throws NotFitted, or InvalidArgument when top_k is zero.
KeywordTable keyword_table(const TwoStageModel& model, std::size_t top_k);

nlohmann::json to_json(const KeywordTable& table);
/// Two-column "Positive words | Negative words" text table.
std::string format_keyword_table(const KeywordTable& table);

/// How an n-gram's weight reaches the tokens it spans.
enum class Attribution {
  Full,         // every covered token receives the whole weight
  SplitEvenly,  // each of the n tokens receives weight / n
};

enum class ScoreSource {
  RawWeight,         // token colour depends only on which terms cover it
  WeightTimesValue,  // weight scaled by the term's TF-IDF value in this document
};

struct HighlightOptions {
  Attribution attribution = Attribution::Full;
  ScoreSource source = ScoreSource::RawWeight;
};

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  bool operator==(const Rgb&) const = default;
};

/// Negative scores colour the red channel, positive scores the blue one;
/// intensity is |score| relative to the document's largest |score|.
struct HighlightedToken {
  std::string text;
  Rgb color;
  double score = 0.0;
};

struct HighlightedDocument {
  std::vector<HighlightedToken> tokens;
};

/// Every word of title + description is kept, including short words and stop
/// words (which score zero). Throws NotFitted.
HighlightedDocument highlight(const TwoStageModel& model, const ClassifiedRecord& record,
                              const HighlightOptions& options = {});

/// Self-contained HTML page; byte-identical output for identical input.
std::string render_html(const HighlightedDocument& document);
void render_html(const HighlightedDocument& document, const std::filesystem::path& path);

}  // namespace classifieds
