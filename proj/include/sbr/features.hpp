#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sbr/execution.hpp"
#include "sbr/matrix.hpp"
#include "sbr/textprep.hpp"

namespace sbr {

enum class FeatureScheme { bf, tf, tfidf };
enum class RankingPolicy { document_frequency, corpus_tfidf };

std::string_view to_string(FeatureScheme scheme);
std::optional<FeatureScheme> parse_feature_scheme(std::string_view text);
std::string_view to_string(RankingPolicy policy);
std::optional<RankingPolicy> parse_ranking_policy(std::string_view text);

// Ordered term list with document frequencies N(term) and the document
// count |D| it was fitted on. Terms are kept in ranking order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws DataError unless terms are distinct and 1 <= N(term) <= |D|.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
             std::size_t doc_count, RankingPolicy policy);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }
  std::size_t doc_count() const noexcept { return doc_count_; }
  RankingPolicy policy() const noexcept { return policy_; }

  std::optional<std::size_t> index_of(std::string_view term) const;
  // ln(|D| / N(term)) for the term at position i.
  double idf(std::size_t i) const;
  // Identifies the vocabulary a feature vector was built against.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t doc_count_ = 0;
  RankingPolicy policy_ = RankingPolicy::document_frequency;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t fingerprint_ = 0;
};

// Counts N(term) over `docs`, ranks terms by the policy score (descending,
// ties lexicographic ascending) and keeps the top `max_size`.
// Throws DataError on an empty document list or max_size == 0.
Vocabulary build_vocabulary(std::span<const TokenSequence> docs, std::size_t max_size,
                            RankingPolicy policy = RankingPolicy::document_frequency);

struct FeatureVector {
  FeatureScheme scheme = FeatureScheme::tf;
  std::vector<double> values;
  std::uint64_t vocab_id = 0;
};

// Position i holds BF = [f(t_i) > 0], TF = f(t_i) or TF-IDF =
// f(t_i) * ln(|D| / N(t_i)). Out-of-vocabulary tokens are ignored.
FeatureVector vectorize(const TokenSequence& tokens, const Vocabulary& vocab, FeatureScheme scheme);

// One row per document.
Matrix vectorize_corpus(std::span<const TokenSequence> docs, const Vocabulary& vocab,
                        FeatureScheme scheme, Execution exec = Execution::parallel);

// Header of vocabulary terms plus a trailing "label" column; labels are
// written as 1 (security) / 0 (non-security).
void write_feature_csv(std::ostream& out, const Vocabulary& vocab, const Matrix& features,
                       std::span<const int> labels);

}  // namespace sbr
