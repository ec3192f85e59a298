#pragma once

// Independent reference computations. Deliberately naive: no shared code
// with the library beyond its public types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sbr/eval.hpp"
#include "sbr/features.hpp"
#include "sbr/random.hpp"

namespace oracle {

using Doc = std::vector<std::string>;

// Number of documents containing `term`, by linear scan.
inline std::size_t doc_freq(const std::vector<Doc>& docs, const std::string& term) {
  std::size_t n = 0;
  for (const auto& d : docs)
    if (std::find(d.begin(), d.end(), term) != d.end()) ++n;
  return n;
}

inline std::size_t count_in(const Doc& doc, const std::string& term) {
  return static_cast<std::size_t>(std::count(doc.begin(), doc.end(), term));
}

// Recount every component from scratch: BF, TF and f * ln(|D| / N).
inline std::vector<double> vectorize(const Doc& doc, const std::vector<Doc>& fit_docs,
                                     const std::vector<std::string>& terms, sbr::FeatureScheme scheme) {
  std::vector<double> out;
  for (const auto& t : terms) {
    const double f = static_cast<double>(count_in(doc, t));
    switch (scheme) {
      case sbr::FeatureScheme::bf: out.push_back(f > 0 ? 1.0 : 0.0); break;
      case sbr::FeatureScheme::tf: out.push_back(f); break;
      case sbr::FeatureScheme::tfidf: {
        const double n = static_cast<double>(doc_freq(fit_docs, t));
        out.push_back(f * std::log(static_cast<double>(fit_docs.size()) / n));
        break;
      }
    }
  }
  return out;
}

// Document-frequency ranking by full sort over all distinct terms.
inline std::vector<std::string> top_terms_by_df(const std::vector<Doc>& docs, std::size_t k) {
  std::vector<std::string> all;
  for (const auto& d : docs) all.insert(all.end(), d.begin(), d.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& t : all) scored.emplace_back(doc_freq(docs, t), t);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

// Random mini-corpus over a small alphabet of terms.
inline std::vector<Doc> random_docs(sbr::Rng& rng, std::size_t max_docs, std::size_t max_terms) {
  const std::size_t n_docs = 1 + rng.below(max_docs);
  const std::size_t n_terms = 1 + rng.below(max_terms);
  std::vector<Doc> docs(n_docs);
  for (auto& d : docs) {
    const std::size_t len = rng.below(12);
    for (std::size_t i = 0; i < len; ++i) d.push_back("t" + std::to_string(rng.below(n_terms)));
  }
  // build_vocabulary needs at least one term overall
  if (std::all_of(docs.begin(), docs.end(), [](const Doc& d) { return d.empty(); }))
    docs[0].push_back("t0");
  return docs;
}

// Exact rational metrics; ratios are formed once from integer counts so the
// only rounding is the final division.
struct Rational {
  std::uint64_t num = 0, den = 0;
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
};

struct RationalMetrics {
  Rational accuracy, precision, recall, f_score;
};

inline RationalMetrics metrics(const sbr::ConfusionMatrix& cm) {
  RationalMetrics m;
  m.accuracy = {cm.tp + cm.tn, cm.tp + cm.tn + cm.fp + cm.fn};
  m.precision = {cm.tp, cm.tp + cm.fp};
  m.recall = {cm.tp, cm.tp + cm.fn};
  // 2PR / (P + R) reduces to 2tp / (2tp + fp + fn); zero when tp = 0
  m.f_score = cm.tp == 0 ? Rational{0, 0} : Rational{2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn};
  return m;
}

}  // namespace oracle
