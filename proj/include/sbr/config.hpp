#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sbr/features.hpp"
#include "sbr/learners.hpp"
#include "sbr/textprep.hpp"

namespace sbr {

// Experiment configuration. The file format is one `key = value` pair per
// line; '#' starts a comment, values may be double-quoted, list values are
// comma separated. Keys:
//
//   corpus        path to a JSON-lines corpus
//   content       title | description | both          (list)
//   scheme        bf | tf | tfidf                      (list)
//   algorithm     gnb | knn | linear-sgd | ...         (list)
//   <algo>.<name> hyperparameter override, e.g. knn.neighbors = 3
//   vector_size   vocabulary size(s)                   (list; sweep sizes)
//   folds         k
//   seed          integer
//   policy        df | tfidf
//   out           output directory
//   stoplist      stop-word file replacing the built-in list
//   jobs          concurrent grid cells
//   timing        true | false (fill the wall_time_s column)
//
// Relative paths in a file resolve against the file's directory.
struct RunConfig {
  std::filesystem::path corpus;
  std::vector<ContentVariant> contents{ContentVariant::title_plus_description};
  std::vector<FeatureScheme> schemes{FeatureScheme::tfidf};
  std::vector<AlgorithmKind> algorithms{AlgorithmKind::random_forest};
  // (kind, name, value) in file order
  std::vector<std::tuple<AlgorithmKind, std::string, std::string>> overrides;
  std::vector<std::size_t> vector_sizes{1000};
  int folds = 5;
  std::optional<std::uint64_t> seed;
  RankingPolicy policy = RankingPolicy::document_frequency;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> stoplist;
  int jobs = 1;
  bool timing = false;

  // Applies one key/value pair. `base` resolves relative paths.
  // Throws ConfigError naming the key on any problem.
  void set(std::string_view key, std::string_view value,
           const std::filesystem::path& base = {});

  // Algorithm specs with overrides applied and the given seed.
  std::vector<AlgorithmSpec> algorithm_specs(std::uint64_t seed) const;

  // Throws ConfigError unless the axes are non-empty and a corpus is set.
  void validate() const;
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

std::vector<std::string> split_list(std::string_view value);

// Flag, then config, then the SBR_SEED environment variable, then 0.
// Throws ConfigError when SBR_SEED is not an unsigned integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> configured);

}  // namespace sbr
