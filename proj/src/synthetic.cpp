#include "classifieds/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <string_view>

#include "classifieds/error.hpp"
#include "classifieds/text.hpp"

namespace classifieds {

namespace {

// Interleaved so that any prefix is balanced between signs: even index
// raises the price, odd index lowers it.
constexpr std::array<std::string_view, kMaxPlantedKeywords> kKeywords = {
    "palm",     "deal",     "downtown",  "offer",   "burj",     "road",     "luxurious",
    "partial",  "stunning", "cluster",   "amazing", "plot",     "beachfront", "covered",
    "penthouse", "sports",  "upgraded",  "village", "panoramic", "urgent"};

struct Location {
  std::string_view name;
  double effect;
};

constexpr std::array<Location, 8> kLocations = {{{"Al Barsha", 0.0},
                                                 {"Business Bay", 15000.0},
                                                 {"Dubai Marina", 25000.0},
                                                 {"Jumeirah Lake Towers", 10000.0},
                                                 {"International City", -20000.0},
                                                 {"Arabian Ranches", 5000.0},
                                                 {"Discovery Gardens", -10000.0},
                                                 {"Palm Jumeirah", 40000.0}}};

// Words the tokenizer drops: stop words and tokens under four characters.
constexpr std::array<std::string_view, 14> kNoise = {"the", "with", "and", "in",  "a",  "for", "of",
                                                     "to",  "br",   "ac",  "gym", "spa", "is", "on"};

constexpr double kBase = 50000.0;
constexpr double kPerBed = 20000.0;
constexpr double kPerBath = 5000.0;
constexpr double kPerSqft = 20.0;

std::vector<std::string> make_fillers(std::size_t count) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  const std::size_t syllables = consonants.size() * vowels.size();
  const std::size_t space = syllables * syllables * syllables;

  const auto stop = default_stopwords();
  std::set<std::string> taken(kKeywords.begin(), kKeywords.end());
  std::vector<std::string> out;
  for (std::size_t k = 0; out.size() < count && k < space; ++k) {
    std::size_t code = (k * 7919 + 104729) % space;
    std::string word;
    for (int s = 0; s < 3; ++s) {
      const std::size_t syllable = code % syllables;
      code /= syllables;
      word += consonants[syllable / vowels.size()];
      word += vowels[syllable % vowels.size()];
    }
    if (stop.contains(word) || !taken.insert(word).second) continue;
    out.push_back(std::move(word));
  }
  return out;
}

// Lays the content words out as a title (first four words) and a description,
// with tokenizer-invisible noise words between them.
void write_text(ClassifiedRecord& record, const std::vector<std::string>& words,
                std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> noise_pick(0, kNoise.size() - 1);
  std::bernoulli_distribution add_noise(0.4);
  const std::size_t title_words = std::min<std::size_t>(4, words.size());
  const auto append = [&](std::string& out, const std::string& word) {
    if (!out.empty()) out += ' ';
    if (add_noise(rng)) {
      out += kNoise[noise_pick(rng)];
      out += ' ';
    }
    out += word;
  };
  record.title.clear();
  record.description.clear();
  for (std::size_t i = 0; i < words.size(); ++i) {
    append(i < title_words ? record.title : record.description, words[i]);
  }
  if (!record.description.empty()) record.description += '.';
}

}  // namespace

void SynthConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (records == 0) fail("records must be positive");
  if (keyword_count > kMaxPlantedKeywords) {
    fail("at most " + std::to_string(kMaxPlantedKeywords) + " planted keywords");
  }
  if (!(keyword_probability >= 0.0 && keyword_probability <= 1.0)) {
    fail("keyword_probability must lie in [0, 1]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be >= 0");
  if (!(effect_min >= 0.0 && effect_min <= effect_max) || !std::isfinite(effect_max)) {
    fail("need 0 <= effect_min <= effect_max");
  }
  if (content_tokens == 0) fail("content_tokens must be positive");
  if (filler_words < content_tokens) fail("filler_words must be >= content_tokens");
}

SynthCorpus generate_synthetic(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus;
  corpus.config = config;
  corpus.fillers = make_fillers(config.filler_words);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> effect_size(config.effect_min, config.effect_max);
  for (std::size_t k = 0; k < config.keyword_count; ++k) {
    const double magnitude = std::round(effect_size(rng));
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    corpus.keywords.push_back({std::string(kKeywords[k]), config.null_effect ? 0.0 : sign * magnitude});
  }

  const double scale = config.category.offer == OfferKind::Sale ? 10.0 : 1.0;
  std::uniform_int_distribution<std::int64_t> beds_dist(1, 5);
  std::uniform_int_distribution<std::int64_t> size_jitter(-150, 150);
  std::uniform_int_distribution<std::size_t> location_dist(0, kLocations.size() - 1);
  std::bernoulli_distribution has_keyword(config.keyword_probability);
  std::normal_distribution<double> noise(0.0, 1.0);

  corpus.records.reserve(config.records);
  while (corpus.records.size() < config.records) {
    ClassifiedRecord r;
    r.beds = beds_dist(rng);
    r.baths = std::uniform_int_distribution<std::int64_t>(1, r.beds + 1)(rng);
    r.size = 500 + 400 * r.beds + size_jitter(rng);
    const auto& location = kLocations[location_dist(rng)];
    r.location = std::string(location.name);

    std::vector<std::string> words;
    double text_effect = 0.0;
    for (const auto& k : corpus.keywords) {
      if (has_keyword(rng)) {
        words.push_back(k.term);
        text_effect += k.effect;
      }
    }
    if (words.size() > config.content_tokens) continue;
    std::vector<std::string> pool = corpus.fillers;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(config.content_tokens - words.size());
    words.insert(words.end(), pool.begin(), pool.end());
    std::shuffle(words.begin(), words.end(), rng);
    write_text(r, words, rng);

    const double structured = kBase + kPerBed * static_cast<double>(r.beds) +
                              kPerBath * static_cast<double>(r.baths) +
                              kPerSqft * static_cast<double>(r.size) + location.effect;
    const double price =
        std::round(scale * (structured + text_effect + config.noise_sigma * noise(rng)));
    // Redraw rather than clip, which would bend the price formula.
    if (price <= 0.0) continue;
    r.price = static_cast<std::int64_t>(price);
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

std::pair<ClassifiedRecord, ClassifiedRecord> keyword_minimal_pair(const SynthCorpus& corpus,
                                                                   std::size_t keyword) {
  if (keyword >= corpus.keywords.size()) {
    throw Error(ErrorKind::InvalidArgument, "no planted keyword #" + std::to_string(keyword));
  }
  const std::size_t n = corpus.config.content_tokens;
  if (corpus.fillers.size() < n) {
    throw Error(ErrorKind::InvalidArgument, "corpus has too few filler words");
  }
  ClassifiedRecord without;
  without.beds = 2;
  without.baths = 2;
  without.size = 1300;
  without.location = std::string(kLocations[0].name);
  without.price = 1;

  std::vector<std::string> words(corpus.fillers.begin(),
                                 corpus.fillers.begin() + static_cast<std::ptrdiff_t>(n));
  without.title = words[0];
  for (std::size_t i = 1; i < n; ++i) {
    (i < 4 ? without.title : without.description) += (i == 4 ? "" : " ") + words[i];
  }
  ClassifiedRecord with = without;
  with.title = corpus.keywords[keyword].term + without.title.substr(words[0].size());
  return {with, without};
}

nlohmann::json to_json(const SynthConfig& config) {
  return {{"records", config.records},
          {"seed", config.seed},
          {"category", to_string(config.category)},
          {"noise_sigma", config.noise_sigma},
          {"keyword_count", config.keyword_count},
          {"keyword_probability", config.keyword_probability},
          {"effect_min", config.effect_min},
          {"effect_max", config.effect_max},
          {"null_effect", config.null_effect},
          {"filler_words", config.filler_words},
          {"content_tokens", config.content_tokens}};
}

nlohmann::json planted_keywords_json(const SynthCorpus& corpus) {
  nlohmann::json keywords = nlohmann::json::array();
  for (const auto& k : corpus.keywords) keywords.push_back({{"term", k.term}, {"effect", k.effect}});
  return {{"config", to_json(corpus.config)}, {"keywords", keywords}};
}

}  // namespace classifieds
