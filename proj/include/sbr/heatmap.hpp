#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sbr/features.hpp"

namespace sbr {

inline constexpr std::size_t kHeatmapSide = 7;
inline constexpr std::size_t kHeatmapCells = kHeatmapSide * kHeatmapSide;

using HeatmapGrid = std::array<double, kHeatmapCells>;  // row-major

// 7x7 image encoding of a document's highest TF-IDF terms.
struct Heatmap {
  // ln(1 + tfidf) per cell before smoothing, terms placed row-major
  HeatmapGrid log_grid{};
  // log_grid after the Gaussian blur
  HeatmapGrid grid{};
  // (term, tfidf) in ranking order, at most 49
  std::vector<std::pair<std::string, double>> terms;
  double sigma = 1.0;

  double at(std::size_t row, std::size_t col) const { return grid[row * kHeatmapSide + col]; }
};

// Separable discrete Gaussian (radius ceil(4 sigma), normalized weights)
// with mirror-reflect boundaries: ... c b a | a b c ... Sigma must be > 0.
HeatmapGrid gaussian_blur(const HeatmapGrid& grid, double sigma);

// Throws ConfigError when sigma <= 0.
Heatmap encode_heatmap(const TokenSequence& tokens, const Vocabulary& vocab, double sigma = 1.0);

// Binary PGM (P5, maxval 255); each cell becomes a zoom x zoom block,
// intensities min-max rescaled over the grid (constant grid -> all 0).
void write_pgm(std::ostream& out, const Heatmap& heatmap, int zoom);
void render_heatmap(const Heatmap& heatmap, const std::filesystem::path& path, int zoom = 10);

}  // namespace sbr
