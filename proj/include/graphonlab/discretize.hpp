#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "graphon.hpp"
#include "parallel.hpp"

namespace graphonlab {

enum class DiscretizeMode { midpoint, cell_average };

inline constexpr std::size_t kDefaultGridSize = 1024;
inline constexpr std::size_t kMaxGridSize = 4096;

namespace detail {

inline double cell_average(const GraphonHandle& w, std::size_t i, std::size_t j, double n) {
  // 4×4 tensor Gauss rule on the cell.
  std::array<double, 16> samples{};
  const double xi = (static_cast<double>(i) + 0.5) / n;
  const double yj = (static_cast<double>(j) + 0.5) / n;
  const double half = 0.5 / n;
  bool uniform = true;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      samples[a * 4 + b] = w.value(xi + half * gauss_nodes[a], yj + half * gauss_nodes[b]);
      uniform = uniform && samples[a * 4 + b] == samples[0];
    }
  if (uniform) return samples[0];
  ExactSum acc;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      acc.add(gauss_weights[a] * gauss_weights[b] * samples[a * 4 + b]);
  return std::clamp(0.25 * acc.value(), 0.0, 1.0);
}

}  // namespace detail

/// Step approximation on an n×n grid: cell centers (midpoint) or a fixed
/// 4×4 Gauss rule per cell (cell_average). Only the upper triangle is
/// evaluated; the lower one is mirrored so the grid is symmetric bit for bit.
inline GridGraphon discretize(const GraphonHandle& w, std::size_t n,
                              DiscretizeMode mode = DiscretizeMode::cell_average) {
  if (n == 0) throw DomainError("discretize needs n >= 1");
  if (n > kMaxGridSize) throw CapacityError("grid size above 4096 blocks");
  std::vector<double> values(n * n);
  const double nd = static_cast<double>(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (mode == DiscretizeMode::midpoint)
        v = w.value((static_cast<double>(i) + 0.5) / nd, (static_cast<double>(j) + 0.5) / nd);
      else
        v = detail::cell_average(w, i, j, nd);
      values[i * n + j] = v;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) values[i * n + j] = values[j * n + i];
  return GridGraphon(n, std::move(values));
}

}  // namespace graphonlab
