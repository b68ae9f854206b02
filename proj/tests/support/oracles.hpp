#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

// Definitional O(n^2) rank-correlation oracles, independent of the library
// implementations they check.

namespace testsupport {

/// 1-based fractional ranks computed by pairwise counting.
inline std::vector<double> oracle_ranks(const std::vector<double>& values) {
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (values[j] < values[i]) ++less;
      if (values[j] == values[i]) ++equal;  // includes i itself
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

inline double oracle_spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto rx = oracle_ranks(xs);
  const auto ry = oracle_ranks(ys);
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
    sxy += rx[i] * ry[i];
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

/// tau-b from literal concordant/discordant/tie pair counts.
inline double oracle_kendall(const std::vector<double>& xs, const std::vector<double>& ys) {
  long long concordant = 0, discordant = 0, tie_x_only = 0, tie_y_only = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) ++tie_x_only;
      else if (dy == 0) ++tie_y_only;
      else if ((dx > 0) == (dy > 0)) ++concordant;
      else ++discordant;
    }
  }
  const double cd = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((cd + static_cast<double>(tie_x_only)) *
                                 (cd + static_cast<double>(tie_y_only)));
  return (static_cast<double>(concordant) - static_cast<double>(discordant)) / denom;
}

}  // namespace testsupport
