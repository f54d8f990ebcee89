#include "classifieds/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "classifieds/error.hpp"
#include "stopwords_data.hpp"
#include "utf8.hpp"

namespace classifieds {

namespace {

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  detail::for_each_code_point(s, [&](UChar32, std::string_view) { ++n; });
  return n;
}

}  // namespace

std::string_view to_string(TfNorm norm) noexcept {
  return norm == TfNorm::L2 ? "l2" : "token_count";
}

TfNorm parse_tf_norm(std::string_view text) {
  if (text == "l2") return TfNorm::L2;
  if (text == "token_count") return TfNorm::TokenCount;
  throw Error(ErrorKind::InvalidArgument, "tf norm must be l2 or token_count, got '" +
                                              std::string(text) + "'");
}

std::set<std::string> parse_stopwords(std::string_view text) {
  std::set<std::string> words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    while (fields >> word) words.insert(to_lower_utf8(word));
  }
  return words;
}

std::set<std::string> default_stopwords() {
  static const std::set<std::string> words = parse_stopwords(detail::kDefaultStopwords);
  return words;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open stop-word list " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_stopwords(buffer.str());
}

void TextConfig::validate() const {
  if (ngram_max < 1) throw Error(ErrorKind::InvalidArgument, "ngram_max must be at least 1");
  if (!(df_min_fraction >= 0.0 && df_min_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "df_min_fraction must lie in [0, 1)");
  }
  if (!(df_max_fraction > 0.0 && df_max_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "df_max_fraction must lie in (0, 1]");
  }
  if (!(df_min_fraction < df_max_fraction)) {
    throw Error(ErrorKind::InvalidArgument, "df_min_fraction must be below df_max_fraction");
  }
  if (!(correlation_threshold > 0.0 && correlation_threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "correlation_threshold must lie in (0, 1]");
  }
}

std::vector<Document> documents_of(std::span<const ClassifiedRecord> records) {
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back({r.title, r.description});
  return docs;
}

std::string document_text(const Document& document) {
  return document.title + " " + document.description;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  detail::for_each_code_point(text, [&](UChar32 c, std::string_view bytes) {
    if (detail::is_alnum(c)) {
      current += bytes;
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  });
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<std::string> tokenize(std::string_view text, const TextConfig& config) {
  auto words = split_words(text);
  std::erase_if(words, [&](const std::string& w) {
    return code_point_count(w) < config.min_token_length || config.stopwords.contains(w);
  });
  return words;
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, std::size_t n_max) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  std::vector<std::string> terms;
  for (std::size_t n = 1; n <= n_max && n <= tokens.size(); ++n) {
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      std::string term = tokens[start];
      for (std::size_t k = 1; k < n; ++k) {
        term += '_';
        term += tokens[start + k];
      }
      terms.push_back(std::move(term));
    }
  }
  return terms;
}

std::vector<std::string> document_terms(const Document& document, const TextConfig& config) {
  const auto tokens = tokenize(document_text(document), config);
  return ngrams(tokens, config.ngram_max);
}

TextVocabulary::TextVocabulary(std::vector<std::string> terms,
                               std::vector<std::size_t> doc_frequency, std::size_t corpus_size)
    : terms_(std::move(terms)), doc_frequency_(std::move(doc_frequency)), corpus_size_(corpus_size) {
  if (terms_.size() != doc_frequency_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "vocabulary terms and frequencies differ in length");
  }
  idf_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto df = doc_frequency_[i];
    if (df < 1 || df > corpus_size_) {
      throw Error(ErrorKind::InvalidArgument,
                  "document frequency of '" + terms_[i] + "' outside [1, corpus size]");
    }
    idf_.push_back(std::log(static_cast<double>(corpus_size_) / static_cast<double>(df)));
    if (!index_.emplace(terms_[i], i).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

std::size_t TextVocabulary::index_of(const std::string& term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? terms_.size() : it->second;
}

TextVocabulary fit_vocabulary(std::span<const Document> documents, const TextConfig& config) {
  config.validate();
  if (documents.empty()) throw Error(ErrorKind::EmptyCorpus, "no documents to fit a vocabulary");

  std::map<std::string, std::size_t> frequency;
  for (const auto& doc : documents) {
    auto terms = document_terms(doc, config);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& term : terms) ++frequency[std::move(term)];
  }

  const double n = static_cast<double>(documents.size());
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  for (auto& [term, df] : frequency) {
    const double fraction = static_cast<double>(df) / n;
    if (fraction < config.df_min_fraction || fraction > config.df_max_fraction) continue;
    terms.push_back(term);
    counts.push_back(df);
  }
  return TextVocabulary(std::move(terms), std::move(counts), documents.size());
}

FeatureMatrix tfidf_encode(std::span<const Document> documents, const TextVocabulary& vocab,
                           const TextConfig& config) {
  FeatureMatrix matrix(vocab.terms(), documents.size());
  auto& values = matrix.values();
  std::map<std::size_t, double> counts;
  for (std::size_t j = 0; j < documents.size(); ++j) {
    counts.clear();
    for (const auto& term : document_terms(documents[j], config)) {
      const auto i = vocab.index_of(term);
      if (i < vocab.size()) counts[i] += 1.0;
    }
    if (counts.empty()) continue;

    double norm = 0.0;
    for (const auto& [i, f] : counts) norm += config.tf_norm == TfNorm::L2 ? f * f : f;
    if (config.tf_norm == TfNorm::L2) norm = std::sqrt(norm);

    for (const auto& [i, f] : counts) {
      values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          f / norm * vocab.idf()[i];
    }
  }
  return matrix;
}

CorrelationFilterResult correlation_filter(const FeatureMatrix& matrix, double threshold) {
  const auto& x = matrix.values();
  const auto cols = matrix.cols();

  CorrelationFilterResult result;
  std::vector<std::size_t> candidates;
  for (std::size_t c = 0; c < cols; ++c) {
    const auto col = x.col(static_cast<Eigen::Index>(c));
    const bool constant = col.size() == 0 || (col.array() == col(0)).all();
    if (constant) {
      result.removed.push_back(matrix.column_names()[c]);
    } else {
      candidates.push_back(c);
    }
  }

  // Unit-norm centred columns; their Gram matrix is the Pearson correlation matrix.
  Eigen::MatrixXd z(x.rows(), static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto col = x.col(static_cast<Eigen::Index>(candidates[k]));
    auto centred = (col.array() - col.mean()).matrix();
    z.col(static_cast<Eigen::Index>(k)) = centred / centred.norm();
  }
  const Eigen::MatrixXd corr = z.transpose() * z;

  std::vector<bool> dropped(candidates.size(), false);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (dropped[j]) continue;
      if (std::abs(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > threshold) {
        dropped[j] = true;
        result.removed.push_back(matrix.column_names()[candidates[j]]);
      }
    }
  }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!dropped[k]) result.kept.push_back(candidates[k]);
  }
  result.matrix = matrix.select_columns(result.kept);
  return result;
}

}  // namespace classifieds
