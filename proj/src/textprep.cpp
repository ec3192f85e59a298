#include "sbr/textprep.hpp"

#include <cctype>

namespace sbr {

std::string_view to_string(ContentVariant variant) {
  switch (variant) {
    case ContentVariant::title: return "title";
    case ContentVariant::description: return "description";
    case ContentVariant::title_plus_description: return "both";
  }
  return "both";
}

std::optional<ContentVariant> parse_content_variant(std::string_view text) {
  if (text == "title") return ContentVariant::title;
  if (text == "description") return ContentVariant::description;
  if (text == "both" || text == "title-plus-description") return ContentVariant::title_plus_description;
  return std::nullopt;
}

std::string select_content(const BugReport& report, ContentVariant variant) {
  switch (variant) {
    case ContentVariant::title: return report.title;
    case ContentVariant::description: return report.description;
    case ContentVariant::title_plus_description:
      if (report.title.empty()) return report.description;
      if (report.description.empty()) return report.title;
      return report.title + " " + report.description;
  }
  return {};
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  bool has_letter = false;
  auto flush = [&] {
    if (!current.empty() && has_letter) tokens.push_back(current);
    current.clear();
    has_letter = false;
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    // ASCII only: bytes of multi-byte UTF-8 sequences act as separators
    if (c < 0x80 && std::isalnum(c)) {
      if (std::isalpha(c)) has_letter = true;
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TokenSequence remove_stopwords(const TokenSequence& tokens, const Stoplist& stoplist) {
  TokenSequence kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stoplist.contains(t)) kept.push_back(t);
  return kept;
}

TokenSequence preprocess(const BugReport& report, ContentVariant variant, const Stoplist& stoplist) {
  auto tokens = remove_stopwords(tokenize(select_content(report, variant)), stoplist);
  for (auto& t : tokens) t = porter_stem(t);
  return tokens;
}

std::vector<TokenSequence> preprocess_corpus(const Corpus& corpus, ContentVariant variant,
                                             const Stoplist& stoplist, Execution exec) {
  std::vector<TokenSequence> docs(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) docs[i] = preprocess(corpus[i], variant, stoplist);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) docs[i] = preprocess(corpus[i], variant, stoplist);
  }
  return docs;
}

}  // namespace sbr
