#include "sbr/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "sbr/errors.hpp"

namespace sbr {

namespace {

// Maps an out-of-range index onto [0, n) by mirror reflection.
std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  const std::ptrdiff_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace

HeatmapGrid gaussian_blur(const HeatmapGrid& grid, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("heatmap sigma must be positive");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
    kernel[d + radius] = std::exp(-0.5 * static_cast<double>(d * d) / (sigma * sigma));
    total += kernel[d + radius];
  }
  for (double& w : kernel) w /= total;

  constexpr auto n = static_cast<std::ptrdiff_t>(kHeatmapSide);
  HeatmapGrid rows{}, out{};
  for (std::ptrdiff_t r = 0; r < n; ++r)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -radius; d <= radius; ++d)
        acc += kernel[d + radius] * grid[r * n + reflect(c + d, n)];
      rows[r * n + c] = acc;
    }
  for (std::ptrdiff_t r = 0; r < n; ++r)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -radius; d <= radius; ++d)
        acc += kernel[d + radius] * rows[reflect(r + d, n) * n + c];
      // clamp rounding noise below zero on all-zero neighbourhoods
      out[r * n + c] = std::max(acc, 0.0);
    }
  return out;
}

Heatmap encode_heatmap(const TokenSequence& tokens, const Vocabulary& vocab, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("heatmap sigma must be positive");
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens)
    if (auto i = vocab.index_of(t)) counts[*i] += 1.0;

  Heatmap h;
  h.sigma = sigma;
  for (const auto& [i, f] : counts) h.terms.emplace_back(vocab.terms()[i], f * vocab.idf(i));
  std::sort(h.terms.begin(), h.terms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (h.terms.size() > kHeatmapCells) h.terms.resize(kHeatmapCells);

  for (std::size_t cell = 0; cell < h.terms.size(); ++cell)
    h.log_grid[cell] = std::log1p(h.terms[cell].second);
  h.grid = gaussian_blur(h.log_grid, sigma);
  return h;
}

void write_pgm(std::ostream& out, const Heatmap& heatmap, int zoom) {
  if (zoom < 1) throw ConfigError("zoom must be at least 1");
  const auto [lo_it, hi_it] = std::minmax_element(heatmap.grid.begin(), heatmap.grid.end());
  const double lo = *lo_it, hi = *hi_it;
  const auto side = static_cast<std::size_t>(zoom) * kHeatmapSide;
  out << "P5\n" << side << ' ' << side << "\n255\n";
  std::vector<unsigned char> line(side);
  for (std::size_t r = 0; r < kHeatmapSide; ++r) {
    for (std::size_t c = 0; c < kHeatmapSide; ++c) {
      const double v = heatmap.at(r, c);
      const auto level = hi > lo
                             ? static_cast<unsigned char>(std::lround((v - lo) / (hi - lo) * 255.0))
                             : static_cast<unsigned char>(0);
      std::fill_n(line.begin() + c * zoom, zoom, level);
    }
    for (int z = 0; z < zoom; ++z) out.write(reinterpret_cast<const char*>(line.data()), side);
  }
}

void render_heatmap(const Heatmap& heatmap, const std::filesystem::path& path, int zoom) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image " + path.string());
  write_pgm(out, heatmap, zoom);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sbr
