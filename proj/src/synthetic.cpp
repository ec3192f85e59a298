#include "sbr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sbr/errors.hpp"
#include "sbr/random.hpp"

namespace sbr {

void SyntheticOptions::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  if (reports < 2) throw ConfigError("synthetic corpus needs at least 2 reports");
  prob(security_fraction, "security_fraction");
  prob(report_signal, "report_signal");
  prob(title_signal, "title_signal");
  prob(description_signal, "description_signal");
  if (background_terms < 1) throw ConfigError("background vocabulary must not be empty");
  if (!(zipf_exponent >= 0.0)) throw ConfigError("zipf_exponent must be >= 0");
  if (title_length < 1 || description_length < 1)
    throw ConfigError("title and description lengths must be at least 1");
  if (description_signal_terms > description_length)
    throw ConfigError("description_signal_terms exceeds description_length");
}

SyntheticOptions lexicon_preset(std::uint64_t seed) {
  SyntheticOptions o;
  o.seed = seed;
  return o;
}

SyntheticOptions split_signal_preset(std::uint64_t seed) {
  SyntheticOptions o;
  o.report_signal = 1.0;
  o.title_signal = 0.5;
  o.description_signal = 0.8;
  o.seed = seed;
  return o;
}

const std::vector<std::string>& security_lexicon() {
  static const std::vector<std::string> lexicon{
      "overflow",  "exploit",      "vulnerability", "injection", "xss",
      "csrf",      "privilege",    "escalation",    "malicious", "attacker",
      "sanitize",  "bypass",       "cve",           "leak",      "spoofing",
      "authentication", "unauthorized", "forgery",  "tampering", "credential",
  };
  return lexicon;
}

std::vector<std::string> background_vocabulary(std::size_t count) {
  // No r, l, c, s, n, y, w in final position keeps Porter's suffix rules
  // away from these words.
  static constexpr std::string_view consonants = "bdgkmptvz";
  static constexpr std::string_view vowels = "aeiou";
  const std::size_t nc = consonants.size(), nv = vowels.size();
  const std::size_t space = nc * nv * nc * nv * nc;
  if (count > space) throw ConfigError("background vocabulary larger than the word space");
  std::vector<std::string> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t code = (i * 7919) % space;  // 7919 is coprime to the space size
    std::string w(5, ' ');
    w[4] = consonants[code % nc];
    code /= nc;
    w[3] = vowels[code % nv];
    code /= nv;
    w[2] = consonants[code % nc];
    code /= nc;
    w[1] = vowels[code % nv];
    code /= nv;
    w[0] = consonants[code % nc];
    words.push_back(std::move(w));
  }
  return words;
}

namespace {

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s) : cdf_(n) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), s);
      cdf_[r] = total;
    }
    for (auto& c : cdf_) c /= total;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

std::vector<std::string> draw_words(std::size_t n, const ZipfSampler& zipf,
                                    const std::vector<std::string>& vocab, Rng& rng) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[zipf(rng)]);
  return out;
}

// Overwrites `m` distinct positions with lexicon terms.
void plant(std::vector<std::string>& words, std::size_t m, Rng& rng) {
  const auto& lex = security_lexicon();
  std::vector<std::size_t> positions(words.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  rng.shuffle(std::span<std::size_t>(positions));
  for (std::size_t i = 0; i < m; ++i) words[positions[i]] = lex[rng.below(lex.size())];
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

Corpus generate_synthetic_corpus(const SyntheticOptions& options) {
  options.validate();
  Rng rng(options.seed);
  const auto vocab = background_vocabulary(options.background_terms);
  const ZipfSampler zipf(vocab.size(), options.zipf_exponent);

  const auto n_security = static_cast<std::size_t>(
      std::llround(static_cast<double>(options.reports) * options.security_fraction));
  std::vector<Label> labels(options.reports, Label::non_security);
  std::fill_n(labels.begin(), n_security, Label::security);
  rng.shuffle(std::span<Label>(labels));

  static constexpr Source sources[] = {Source::github_project, Source::mozilla, Source::redhat};
  std::vector<BugReport> reports;
  reports.reserve(options.reports);
  for (std::size_t i = 0; i < options.reports; ++i) {
    BugReport r;
    char id[32];
    std::snprintf(id, sizeof id, "SYN-%04zu", i + 1);
    r.id = id;
    r.source = sources[rng.below(3)];
    r.label = labels[i];
    auto title = draw_words(options.title_length, zipf, vocab, rng);
    auto description = draw_words(options.description_length, zipf, vocab, rng);
    if (r.label == Label::security && rng.bernoulli(options.report_signal)) {
      if (rng.bernoulli(options.title_signal)) plant(title, 1, rng);
      if (rng.bernoulli(options.description_signal))
        plant(description, options.description_signal_terms, rng);
    }
    r.title = join(title);
    r.description = join(description);
    reports.push_back(std::move(r));
  }
  return Corpus(std::move(reports));
}

}  // namespace sbr
