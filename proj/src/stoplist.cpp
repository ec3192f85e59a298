#include <fstream>
#include <istream>
#include <string_view>

#include "sbr/errors.hpp"
#include "sbr/textprep.hpp"

namespace sbr {

namespace {

// Version 1 of the bundled list; data/stopwords_en.txt holds the same terms.
constexpr std::string_view kDefaultStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
    "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
    "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
    "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves", "also", "get", "got", "however", "may", "might", "must", "shall", "us",
    "upon", "within", "without", "yet", "whether", "whose", "etc", "via",
};

}  // namespace

const Stoplist& default_stoplist() {
  static const Stoplist list = [] {
    std::unordered_set<std::string> terms;
    for (auto w : kDefaultStopwords) terms.emplace(w);
    return Stoplist(std::move(terms));
  }();
  return list;
}

Stoplist read_stoplist(std::istream& in) {
  std::unordered_set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    terms.insert(line.substr(start));
  }
  return Stoplist(std::move(terms));
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stoplist " + path.string());
  return read_stoplist(in);
}

}  // namespace sbr
