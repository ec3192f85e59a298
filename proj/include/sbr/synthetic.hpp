#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sbr/corpus.hpp"

namespace sbr {

// Labeled corpus with a Zipf-distributed background vocabulary shared by
// both classes. Security reports may additionally carry terms from a fixed
// security lexicon:
//   1. with probability report_signal the report is signalled at all;
//   2. a signalled report gets one lexicon term in its title with
//      probability title_signal and description_signal_terms lexicon terms
//      in its description with probability description_signal.
// Unsignalled security reports are indistinguishable from non-security ones.
struct SyntheticOptions {
  std::size_t reports = 1000;
  double security_fraction = 0.35;
  std::size_t background_terms = 500;
  double zipf_exponent = 1.0;
  std::size_t title_length = 5;
  std::size_t description_length = 15;
  double report_signal = 0.8;
  double title_signal = 0.5;
  double description_signal = 1.0;
  std::size_t description_signal_terms = 4;
  std::uint64_t seed = 42;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Per-report signal 0.8; the defaults above.
SyntheticOptions lexicon_preset(std::uint64_t seed = 42);
// Title signal 0.5 and description signal 0.8, drawn independently for
// every security report.
SyntheticOptions split_signal_preset(std::uint64_t seed = 42);

// 20 security terms with pairwise distinct stems.
const std::vector<std::string>& security_lexicon();

// `count` pronounceable pseudo-words (CVCVC), none of which the stemmer
// alters or the default stoplist contains. Independent of any seed.
std::vector<std::string> background_vocabulary(std::size_t count);

// Exactly round(reports * security_fraction) security reports, in shuffled
// order. Ids are "SYN-0001", ...; timestamps are absent.
Corpus generate_synthetic_corpus(const SyntheticOptions& options);

}  // namespace sbr
