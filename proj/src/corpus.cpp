#include "sbr/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <set>

#include <json.hpp>

#include "sbr/errors.hpp"
#include "sbr/random.hpp"

namespace sbr {

namespace {

constexpr std::array<std::pair<Source, std::string_view>, 5> kSourceNames{{
    {Source::github_project, "github-project"},
    {Source::mozilla, "mozilla"},
    {Source::redhat, "redhat"},
    {Source::literature, "literature"},
    {Source::other, "other"},
}};

// Length of the well-formed UTF-8 sequence starting at s[i], or 0.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char c = byte(i);
  if (c < 0x80) return 1;
  std::size_t len;
  unsigned char lo = 0x80, hi = 0xBF;
  if (c >= 0xC2 && c <= 0xDF) {
    len = 2;
  } else if (c >= 0xE0 && c <= 0xEF) {
    len = 3;
    if (c == 0xE0) lo = 0xA0;       // overlong
    if (c == 0xED) hi = 0x9F;       // surrogates
  } else if (c >= 0xF0 && c <= 0xF4) {
    len = 4;
    if (c == 0xF0) lo = 0x90;
    if (c == 0xF4) hi = 0x8F;       // above U+10FFFF
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  if (byte(i + 1) < lo || byte(i + 1) > hi) return 0;
  for (std::size_t k = 2; k < len; ++k)
    if (byte(i + k) < 0x80 || byte(i + k) > 0xBF) return 0;
  return len;
}

// Invalid bytes are carried through the JSON parser as private-use code
// points U+F780..U+F7FF and restored afterwards, so the loader keeps the
// raw bytes for curate() to repair.
constexpr unsigned kRawBytePlane = 0xF700;

std::string escape_invalid_bytes(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 16);
  for (std::size_t i = 0; i < s.size();) {
    if (auto len = utf8_sequence_length(s, i)) {
      out.append(s.substr(i, len));
      i += len;
      continue;
    }
    const unsigned cp = kRawBytePlane + static_cast<unsigned char>(s[i]);
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    ++i;
  }
  return out;
}

std::string restore_invalid_bytes(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 == 0xEF && i + 2 < s.size()) {
      const auto b1 = static_cast<unsigned char>(s[i + 1]);
      const auto b2 = static_cast<unsigned char>(s[i + 2]);
      const unsigned cp = ((b0 & 0x0Fu) << 12) | ((b1 & 0x3Fu) << 6) | (b2 & 0x3Fu);
      if (cp >= kRawBytePlane + 0x80 && cp <= kRawBytePlane + 0xFF) {
        out.push_back(static_cast<char>(cp - kRawBytePlane));
        i += 3;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<std::int64_t> optional_timestamp(const nlohmann::json& obj, const char* key,
                                               std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer())
    throw ParseError(line, std::string("field '") + key + "' must be an integer or null");
  return it->get<std::int64_t>();
}

std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line,
                            bool restore) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw ParseError(line, std::string("field '") + key + "' must be a string");
  auto value = it->get<std::string>();
  return restore ? restore_invalid_bytes(value) : value;
}

}  // namespace

std::string_view to_string(Source source) {
  for (const auto& [s, name] : kSourceNames)
    if (s == source) return name;
  return "other";
}

std::string_view to_string(Label label) {
  return label == Label::security ? "security" : "non-security";
}

std::optional<Source> parse_source(std::string_view text) {
  for (const auto& [s, name] : kSourceNames)
    if (name == text) return s;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "security") return Label::security;
  if (text == "non-security") return Label::non_security;
  return std::nullopt;
}

ClassCounts Provenance::totals() const {
  ClassCounts sum;
  for (const auto& [source, counts] : by_source) {
    sum.security += counts.security;
    sum.non_security += counts.non_security;
  }
  return sum;
}

Corpus::Corpus(std::vector<BugReport> reports) : reports_(std::move(reports)) {
  index_.reserve(reports_.size());
  for (std::size_t i = 0; i < reports_.size(); ++i) {
    const auto& r = reports_[i];
    if (!index_.emplace(r.id, i).second) throw DuplicateIdError(r.id);
    auto& counts = provenance_.by_source[r.source];
    (r.label == Label::security ? counts.security : counts.non_security) += 1;
  }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BugReport parse_record(std::string_view line, std::size_t line_number) {
  const bool raw_bytes = !is_valid_utf8(line);
  nlohmann::json obj;
  try {
    obj = raw_bytes ? nlohmann::json::parse(escape_invalid_bytes(line))
                    : nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_number, "record is not a JSON object");

  BugReport r;
  r.id = required_string(obj, "id", line_number, raw_bytes);
  if (r.id.empty()) throw ParseError(line_number, "field 'id' is empty");
  const auto source = required_string(obj, "source", line_number, raw_bytes);
  const auto parsed_source = parse_source(source);
  if (!parsed_source) throw ParseError(line_number, "unknown source '" + source + "'");
  r.source = *parsed_source;
  r.title = required_string(obj, "title", line_number, raw_bytes);
  r.description = required_string(obj, "description", line_number, raw_bytes);
  const auto label = required_string(obj, "label", line_number, raw_bytes);
  const auto parsed_label = parse_label(label);
  if (!parsed_label) throw ParseError(line_number, "unknown label '" + label + "'");
  r.label = *parsed_label;
  r.created_at = optional_timestamp(obj, "created_at", line_number);
  r.closed_at = optional_timestamp(obj, "closed_at", line_number);
  if (r.created_at && r.closed_at && *r.closed_at < *r.created_at)
    throw ParseError(line_number, "closed_at precedes created_at");
  return r;
}

std::string serialize_record(const BugReport& r) {
  nlohmann::ordered_json obj;
  obj["id"] = r.id;
  obj["source"] = std::string(to_string(r.source));
  obj["title"] = r.title;
  obj["description"] = r.description;
  obj["label"] = std::string(to_string(r.label));
  obj["created_at"] = r.created_at ? nlohmann::ordered_json(*r.created_at) : nullptr;
  obj["closed_at"] = r.closed_at ? nlohmann::ordered_json(*r.closed_at) : nullptr;
  return obj.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

Corpus read_corpus(std::istream& in) {
  std::vector<BugReport> reports;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    reports.push_back(parse_record(line, line_number));
  }
  return Corpus(std::move(reports));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return read_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& r : corpus.reports()) out << serialize_record(r) << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  write_corpus(corpus, out);
  if (!out) throw IoError("write failed for " + path.string());
}

bool is_valid_utf8(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    const auto len = utf8_sequence_length(text, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::string repair_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_invalid_run = false;
  for (std::size_t i = 0; i < text.size();) {
    if (auto len = utf8_sequence_length(text, i)) {
      out.append(text.substr(i, len));
      i += len;
      in_invalid_run = false;
    } else {
      if (!in_invalid_run) out.append(kReplacementMarker);
      in_invalid_run = true;
      ++i;
    }
  }
  return out;
}

CurationResult curate(const Corpus& corpus) {
  CurationResult result;
  result.report.loaded = corpus.size();
  std::vector<BugReport> kept;
  kept.reserve(corpus.size());
  for (const auto& r : corpus.reports()) {
    if (trim(r.title).empty() && trim(r.description).empty()) {
      ++result.report.dropped;
      continue;
    }
    BugReport copy = r;
    bool repaired = false;
    for (std::string* field : {&copy.id, &copy.title, &copy.description}) {
      if (!is_valid_utf8(*field)) {
        *field = repair_utf8(*field);
        repaired = true;
      }
    }
    if (repaired) ++result.report.repaired;
    kept.push_back(std::move(copy));
  }
  result.corpus = Corpus(std::move(kept));
  return result;
}

std::string_view to_string(TrackerKind kind) {
  switch (kind) {
    case TrackerKind::jira_key: return "jira-key";
    case TrackerKind::tracker_number: return "tracker-number";
    case TrackerKind::issue_ref: return "issue-ref";
  }
  return "unknown";
}

std::vector<BugRef> extract_bug_ids(std::string_view message) {
  // key-style ids must not continue with another "-digits" group, which
  // keeps CVE-2014-3579 out of the jira-key bucket
  static const std::regex pattern(
      R"(\b([A-Z][A-Z0-9_]*-[0-9]+)(?![-0-9])|\b[Bb][Uu][Gg]\s*#?\s*([0-9]+)\b|#([0-9]+)\b)");
  std::vector<BugRef> found;
  std::set<std::pair<TrackerKind, std::string>> seen;
  const std::string text(message);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    BugRef ref;
    if (m[1].matched) {
      ref = {TrackerKind::jira_key, m[1].str()};
    } else if (m[2].matched) {
      ref = {TrackerKind::tracker_number, m[2].str()};
    } else {
      ref = {TrackerKind::issue_ref, m[3].str()};
    }
    if (seen.emplace(ref.kind, ref.id).second) found.push_back(std::move(ref));
  }
  return found;
}

namespace {

double sorted_median(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  const std::size_t n = end - begin;
  const std::size_t mid = begin + n / 2;
  return n % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

DelaySummary summarize_delays(std::vector<double> days) {
  if (days.empty()) throw DataError("delay summary of an empty sample");
  std::sort(days.begin(), days.end());
  const std::size_t n = days.size();
  DelaySummary s;
  s.count = n;
  s.median = sorted_median(days, 0, n);
  const std::size_t half = (n + 1) / 2;  // Tukey: odd n shares the middle
  s.q1 = sorted_median(days, 0, half);
  s.q3 = sorted_median(days, n - half, n);
  return s;
}

std::vector<double> delays_in_days(const Corpus& corpus, Label label) {
  std::vector<double> days;
  for (const auto& r : corpus.reports()) {
    if (r.label != label || !r.created_at || !r.closed_at) continue;
    days.push_back(static_cast<double>(*r.closed_at - *r.created_at) / 86400.0);
  }
  return days;
}

DelayStats delay_analysis(const Corpus& corpus) {
  DelayStats stats;
  if (auto d = delays_in_days(corpus, Label::security); !d.empty())
    stats.security = summarize_delays(std::move(d));
  if (auto d = delays_in_days(corpus, Label::non_security); !d.empty())
    stats.non_security = summarize_delays(std::move(d));
  return stats;
}

std::vector<std::size_t> FoldAssignment::test_indices(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != f) out.push_back(i);
  return out;
}

FoldAssignment stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw StratificationError("fold count must be at least 2, got " + std::to_string(k));
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_of.assign(corpus.size(), -1);

  Rng rng(seed);
  std::size_t dealt = 0;
  for (Label label : {Label::security, Label::non_security}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (corpus[i].label == label) members.push_back(i);
    if (members.size() < static_cast<std::size_t>(k))
      throw StratificationError("class '" + std::string(to_string(label)) + "' has " +
                                std::to_string(members.size()) + " reports, fewer than k=" +
                                std::to_string(k));
    // canonical order makes the assignment independent of input order
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return corpus[a].id < corpus[b].id;
    });
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t idx : members) folds.fold_of[idx] = static_cast<int>(dealt++ % k);
  }
  return folds;
}

}  // namespace sbr
