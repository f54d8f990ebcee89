#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "classifieds/feature_matrix.hpp"
#include "classifieds/record.hpp"

namespace classifieds {

/// How |F| in TF(i,j) = F(i,j) / |F| is measured over a document's vocabulary counts.
enum class TfNorm {
  L2,          // Euclidean norm of the count vector
  TokenCount,  // sum of the counts
};

std::string_view to_string(TfNorm norm) noexcept;
TfNorm parse_tf_norm(std::string_view text);

/// The bundled English stop-word list.
std::set<std::string> default_stopwords();
/// One word per line; blank lines and '#' comments ignored; words lower-cased.
std::set<std::string> parse_stopwords(std::string_view text);
std::set<std::string> load_stopwords(const std::filesystem::path& path);

struct TextConfig {
  std::size_t min_token_length = 4;  // in code points
  std::size_t ngram_max = 2;
  double df_min_fraction = 0.01;
  double df_max_fraction = 0.5;
  double correlation_threshold = 0.99;
  TfNorm tf_norm = TfNorm::L2;
  std::set<std::string> stopwords = default_stopwords();

  void validate() const;
  bool operator==(const TextConfig&) const = default;
};

/// Title and description of one classified. They are vectorised as a single
/// document joined by one space.
struct Document {
  std::string title;
  std::string description;
};

std::vector<Document> documents_of(std::span<const ClassifiedRecord> records);
std::string document_text(const Document& document);

/// Splits on every non-alphanumeric code point; no filtering.
std::vector<std::string> split_words(std::string_view text);

/// split_words, then drops tokens shorter than min_token_length and stop words.
/// Expects lower-cased text.
std::vector<std::string> tokenize(std::string_view text, const TextConfig& config);

/// All k-grams for k = 1..n_max joined by '_': every 1-gram in position
/// order, then every 2-gram, and so on.
std::vector<std::string> ngrams(std::span<const std::string> tokens, std::size_t n_max);

/// tokenize + ngrams over document_text(document).
std::vector<std::string> document_terms(const Document& document, const TextConfig& config);

/// Surviving terms (lexicographic order) with document frequencies N_i over a
/// corpus of N documents and idf = ln(N / N_i).
class TextVocabulary {
 public:
  TextVocabulary() = default;
  TextVocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_frequency,
                 std::size_t corpus_size);

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& doc_frequency() const noexcept { return doc_frequency_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  /// Index of the term, or size() when absent.
  std::size_t index_of(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_frequency_;
  std::vector<double> idf_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws EmptyCorpus when documents is empty.
TextVocabulary fit_vocabulary(std::span<const Document> documents, const TextConfig& config);

/// TF-IDF matrix, one column per vocabulary term. Documents without any
/// vocabulary term encode as zero rows.
FeatureMatrix tfidf_encode(std::span<const Document> documents, const TextVocabulary& vocab,
                           const TextConfig& config);

struct CorrelationFilterResult {
  FeatureMatrix matrix;
  std::vector<std::size_t> kept;      // indices into the input columns
  std::vector<std::string> removed;   // names, in removal order
};

/// Drops constant columns, then scans column pairs (i < j) in order and drops
/// column j when |corr(i, j)| > threshold and column i is still kept.
CorrelationFilterResult correlation_filter(const FeatureMatrix& matrix, double threshold);

}  // namespace classifieds
