#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sbr {

enum class Source { github_project, mozilla, redhat, literature, other };
enum class Label { non_security = 0, security = 1 };

std::string_view to_string(Source source);
std::string_view to_string(Label label);
std::optional<Source> parse_source(std::string_view text);
std::optional<Label> parse_label(std::string_view text);

// One labeled tracker record. Timestamps are UTC epoch seconds.
struct BugReport {
  std::string id;
  Source source = Source::other;
  std::string title;
  std::string description;
  Label label = Label::non_security;
  std::optional<std::int64_t> created_at;
  std::optional<std::int64_t> closed_at;

  friend bool operator==(const BugReport&, const BugReport&) = default;
};

struct ClassCounts {
  std::size_t security = 0;
  std::size_t non_security = 0;

  std::size_t total() const noexcept { return security + non_security; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

// Per-source tallies of security / non-security reports.
struct Provenance {
  std::map<Source, ClassCounts> by_source;

  ClassCounts totals() const;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Ordered, immutable collection of reports with unique ids.
class Corpus {
 public:
  Corpus() = default;
  // Throws DuplicateIdError when two reports share an id.
  explicit Corpus(std::vector<BugReport> reports);

  const std::vector<BugReport>& reports() const noexcept { return reports_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return reports_.size(); }
  bool empty() const noexcept { return reports_.empty(); }
  const BugReport& operator[](std::size_t i) const { return reports_[i]; }

  // Index of the report with this id, if present.
  std::optional<std::size_t> find(std::string_view id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.reports_ == b.reports_; }

 private:
  std::vector<BugReport> reports_;
  Provenance provenance_;
  std::unordered_map<std::string, std::size_t> index_;
};

// --- JSON-lines ingestion -------------------------------------------------

enum class CorpusFormat { json_lines };

// Parses one record. Throws ParseError citing `line_number`.
BugReport parse_record(std::string_view line, std::size_t line_number);
// Serializes with keys in schema order: id, source, title, description,
// label, created_at, closed_at.
std::string serialize_record(const BugReport& report);

// Blank lines are skipped; input order is preserved; no curation applied.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path,
                   CorpusFormat format = CorpusFormat::json_lines);
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// --- Curation -------------------------------------------------------------

struct CurationReport {
  std::size_t loaded = 0;
  std::size_t dropped = 0;
  std::size_t repaired = 0;
};

struct CurationResult {
  Corpus corpus;
  CurationReport report;
};

inline constexpr std::string_view kReplacementMarker = "\xEF\xBF\xBD";  // U+FFFD

bool is_valid_utf8(std::string_view text);
// Replaces each maximal invalid byte subsequence with U+FFFD.
std::string repair_utf8(std::string_view text);

// Drops reports whose title and description are both blank after trimming
// and repairs invalid UTF-8 in the remaining ones.
CurationResult curate(const Corpus& corpus);

// --- Commit message linking -----------------------------------------------

enum class TrackerKind { jira_key, tracker_number, issue_ref };
std::string_view to_string(TrackerKind kind);

struct BugRef {
  TrackerKind kind;
  std::string id;
  friend bool operator==(const BugRef&, const BugRef&) = default;
};

// Recognizes project keys (APLO-366), "bug 319004" and "#42". Matches are
// returned in order of appearance, deduplicated on first occurrence.
std::vector<BugRef> extract_bug_ids(std::string_view message);

// --- Time-to-fix delays ---------------------------------------------------

struct DelaySummary {
  std::size_t count = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct DelayStats {
  std::optional<DelaySummary> security;
  std::optional<DelaySummary> non_security;
};

// Median of the sorted values with the midpoint convention; quartiles are
// Tukey hinges (medians of the lower and upper halves, the middle element
// included in both halves when the count is odd). Values must be non-empty.
DelaySummary summarize_delays(std::vector<double> days);

// Delays in fractional days over reports carrying both timestamps.
std::vector<double> delays_in_days(const Corpus& corpus, Label label);
DelayStats delay_analysis(const Corpus& corpus);

// --- Stratified folds -----------------------------------------------------

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  // fold index per report, aligned with corpus order
  std::vector<int> fold_of;

  int fold(std::size_t report_index) const { return fold_of[report_index]; }
  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

// Per class: ids sorted, shuffled with the seeded generator, dealt
// round-robin. The deal continues across classes so total fold sizes also
// stay balanced. Throws StratificationError when a class has < k members.
FoldAssignment stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed);

}  // namespace sbr
