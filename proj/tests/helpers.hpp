#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sbr/corpus.hpp"
#include "sbr/matrix.hpp"
#include "sbr/random.hpp"

namespace test {

inline sbr::BugReport report(std::string id, sbr::Label label, std::string title,
                             std::string description = "",
                             sbr::Source source = sbr::Source::other) {
  sbr::BugReport r;
  r.id = std::move(id);
  r.label = label;
  r.title = std::move(title);
  r.description = std::move(description);
  r.source = source;
  return r;
}

// n_sec security + n_non non-security reports with distinct ids.
inline sbr::Corpus balanced_corpus(std::size_t n_sec, std::size_t n_non) {
  std::vector<sbr::BugReport> reports;
  for (std::size_t i = 0; i < n_sec; ++i)
    reports.push_back(report("S-" + std::to_string(i), sbr::Label::security, "overflow crash"));
  for (std::size_t i = 0; i < n_non; ++i)
    reports.push_back(report("N-" + std::to_string(i), sbr::Label::non_security, "typo docs"));
  return sbr::Corpus(std::move(reports));
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sbr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Binary-labeled rows separated by a hyperplane through the origin with a
// margin; coordinates are uniform in [-1, 1].
inline sbr::Matrix separable_rows(std::size_t n, std::size_t d, std::uint64_t seed,
                                  std::vector<int>& labels) {
  sbr::Rng rng(seed);
  std::vector<double> w(d);
  for (auto& v : w) v = rng.uniform() * 2.0 - 1.0;
  sbr::Matrix x(0, d);
  labels.clear();
  while (x.rows() < n) {
    std::vector<double> row(d);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = rng.uniform() * 2.0 - 1.0;
      s += w[j] * row[j];
    }
    if (std::abs(s) < 0.1) continue;
    x.append_row(row);
    labels.push_back(s > 0.0 ? 1 : 0);
  }
  return x;
}

}  // namespace test
