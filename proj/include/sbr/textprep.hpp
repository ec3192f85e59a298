#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sbr/corpus.hpp"
#include "sbr/execution.hpp"

namespace sbr {

enum class ContentVariant { title, description, title_plus_description };

std::string_view to_string(ContentVariant variant);
// Accepts "title", "description", "both" and "title-plus-description".
std::optional<ContentVariant> parse_content_variant(std::string_view text);

// Lowercase terms, each non-empty and free of whitespace.
using TokenSequence = std::vector<std::string>;

class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(std::unordered_set<std::string> terms) : terms_(std::move(terms)) {}

  bool contains(std::string_view term) const { return terms_.count(std::string(term)) != 0; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::unordered_set<std::string>& terms() const noexcept { return terms_; }

 private:
  std::unordered_set<std::string> terms_;
};

// The bundled English list (mirrors data/stopwords_en.txt).
const Stoplist& default_stoplist();
// One lowercase term per line; '#' lines and blank lines ignored.
Stoplist read_stoplist(std::istream& in);
Stoplist load_stoplist(const std::filesystem::path& path);

std::string select_content(const BugReport& report, ContentVariant variant);

// Lowercases, splits on runs of non-alphanumeric bytes and drops tokens
// with no letter.
TokenSequence tokenize(std::string_view text);

TokenSequence remove_stopwords(const TokenSequence& tokens, const Stoplist& stoplist);

// Original Porter (1980) suffix-stripping algorithm. Expects a lowercase
// token; tokens of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view token);

// select_content -> tokenize -> remove_stopwords -> porter_stem.
TokenSequence preprocess(const BugReport& report, ContentVariant variant,
                         const Stoplist& stoplist = default_stoplist());

// preprocess over every report, in corpus order.
std::vector<TokenSequence> preprocess_corpus(const Corpus& corpus, ContentVariant variant,
                                             const Stoplist& stoplist = default_stoplist(),
                                             Execution exec = Execution::parallel);

}  // namespace sbr
