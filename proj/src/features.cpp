#include "sbr/features.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "sbr/errors.hpp"

namespace sbr {

std::string_view to_string(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::bf: return "bf";
    case FeatureScheme::tf: return "tf";
    case FeatureScheme::tfidf: return "tfidf";
  }
  return "tf";
}

std::optional<FeatureScheme> parse_feature_scheme(std::string_view text) {
  if (text == "bf") return FeatureScheme::bf;
  if (text == "tf") return FeatureScheme::tf;
  if (text == "tfidf" || text == "tf-idf") return FeatureScheme::tfidf;
  return std::nullopt;
}

std::string_view to_string(RankingPolicy policy) {
  return policy == RankingPolicy::document_frequency ? "df" : "tfidf";
}

std::optional<RankingPolicy> parse_ranking_policy(std::string_view text) {
  if (text == "df" || text == "document-frequency") return RankingPolicy::document_frequency;
  if (text == "tfidf" || text == "corpus-tfidf") return RankingPolicy::corpus_tfidf;
  return std::nullopt;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       std::size_t doc_count, RankingPolicy policy)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), doc_count_(doc_count),
      policy_(policy) {
  if (terms_.size() != doc_freq_.size())
    throw DataError("vocabulary terms and document frequencies differ in length");
  index_.reserve(terms_.size());
  fingerprint_ = 0xcbf29ce484222325ULL ^ doc_count_;  // FNV-1a over the terms
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (doc_freq_[i] < 1 || doc_freq_[i] > doc_count_)
      throw DataError("document frequency of '" + terms_[i] + "' outside [1, |D|]");
    if (!index_.emplace(terms_[i], i).second)
      throw DataError("duplicate vocabulary term '" + terms_[i] + "'");
    for (unsigned char c : terms_[i]) fingerprint_ = (fingerprint_ ^ c) * 0x100000001b3ULL;
    fingerprint_ = (fingerprint_ ^ 0xff) * 0x100000001b3ULL;
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::size_t i) const {
  return std::log(static_cast<double>(doc_count_) / static_cast<double>(doc_freq_[i]));
}

Vocabulary build_vocabulary(std::span<const TokenSequence> docs, std::size_t max_size,
                            RankingPolicy policy) {
  if (docs.empty()) throw DataError("cannot build a vocabulary from zero documents");
  if (max_size == 0) throw DataError("vocabulary size must be at least 1");

  struct Stat {
    std::size_t df = 0;
    std::size_t max_tf = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& doc : docs) {
    counts.clear();
    for (const auto& t : doc) ++counts[t];
    for (const auto& [term, f] : counts) {
      auto& s = stats[std::string(term)];
      ++s.df;
      s.max_tf = std::max(s.max_tf, f);
    }
  }

  const double n_docs = static_cast<double>(docs.size());
  struct Ranked {
    std::string term;
    std::size_t df;
    double score;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(stats.size());
  for (auto& [term, s] : stats) {
    // max over documents of f * idf is reached at the document with max f
    const double score = policy == RankingPolicy::document_frequency
                             ? static_cast<double>(s.df)
                             : static_cast<double>(s.max_tf) * std::log(n_docs / s.df);
    ranked.push_back({term, s.df, score});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);

  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  terms.reserve(ranked.size());
  df.reserve(ranked.size());
  for (auto& r : ranked) {
    terms.push_back(std::move(r.term));
    df.push_back(r.df);
  }
  return Vocabulary(std::move(terms), std::move(df), docs.size(), policy);
}

namespace {

void fill_row(const TokenSequence& tokens, const Vocabulary& vocab, FeatureScheme scheme,
              std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : tokens)
    if (auto i = vocab.index_of(t)) out[*i] += 1.0;
  switch (scheme) {
    case FeatureScheme::tf: break;
    case FeatureScheme::bf:
      for (double& v : out) v = v > 0.0 ? 1.0 : 0.0;
      break;
    case FeatureScheme::tfidf:
      for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] > 0.0) out[i] *= vocab.idf(i);
      break;
  }
}

}  // namespace

FeatureVector vectorize(const TokenSequence& tokens, const Vocabulary& vocab, FeatureScheme scheme) {
  FeatureVector fv;
  fv.scheme = scheme;
  fv.vocab_id = vocab.fingerprint();
  fv.values.resize(vocab.size());
  fill_row(tokens, vocab, scheme, fv.values);
  return fv;
}

Matrix vectorize_corpus(std::span<const TokenSequence> docs, const Vocabulary& vocab,
                        FeatureScheme scheme, Execution exec) {
  Matrix m(docs.size(), vocab.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) fill_row(docs[i], vocab, scheme, m.row(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) fill_row(docs[i], vocab, scheme, m.row(i));
  }
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

void write_feature_csv(std::ostream& out, const Vocabulary& vocab, const Matrix& features,
                       std::span<const int> labels) {
  if (features.rows() != labels.size())
    throw DimensionError("feature rows and labels differ in length");
  if (features.rows() > 0 && features.cols() != vocab.size())
    throw DimensionError("feature columns do not match the vocabulary");
  for (const auto& t : vocab.terms()) out << csv_field(t) << ',';
  out << "label\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (double v : features.row(r)) out << v << ',';
    out << labels[r] << '\n';
  }
}

}  // namespace sbr
