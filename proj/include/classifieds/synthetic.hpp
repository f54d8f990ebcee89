#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "classifieds/record.hpp"

namespace classifieds {

/// Generator settings for the synthetic classifieds corpus. Text is emitted
/// lower-case, so the output is already in cleaned form.
struct SynthConfig {
  std::size_t records = 2000;
  std::uint64_t seed = 42;
  ListingCategory category;
  double noise_sigma = 5000.0;
  std::size_t keyword_count = 20;  // at most kMaxPlantedKeywords
  double keyword_probability = 0.15;
  double effect_min = 5000.0;
  double effect_max = 20000.0;
  bool null_effect = false;  // keywords are planted but do not move the price
  std::size_t filler_words = 80;
  std::size_t content_tokens = 16;  // distinct content words per document

  void validate() const;
};

inline constexpr std::size_t kMaxPlantedKeywords = 20;

struct PlantedKeyword {
  std::string term;
  double effect = 0.0;  // price shift when present; zero under null_effect
};

struct SynthCorpus {
  SynthConfig config;
  std::vector<PlantedKeyword> keywords;
  std::vector<std::string> fillers;
  std::vector<ClassifiedRecord> records;
};

/// Price = base + 20000 beds + 5000 baths + 20 size + location effect
///         + planted effects + N(0, noise_sigma), rounded to whole AED;
/// sale prices are ten times the rent formula. Every document carries exactly
/// `content_tokens` distinct content words, so its TF-IDF norm is constant.
SynthCorpus generate_synthetic(const SynthConfig& config);

/// Two records with identical structured fields whose text differs only by
/// one filler word replaced with planted keyword `keyword`: {with, without}.
std::pair<ClassifiedRecord, ClassifiedRecord> keyword_minimal_pair(const SynthCorpus& corpus,
                                                                   std::size_t keyword);

nlohmann::json to_json(const SynthConfig& config);
nlohmann::json planted_keywords_json(const SynthCorpus& corpus);

}  // namespace classifieds
