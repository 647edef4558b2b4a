#pragma once

// Slow reference implementations used to cross-check the fast paths.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/stats.hpp"

namespace ctxkit::oracle {

/// s_odd by enumerating all sign vectors with an odd number of -1 entries.
inline double s_odd_enumerate(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0 || n > 24) throw Error(ErrorKind::InvalidArgument, "s_odd enumeration needs 1..24 entries");
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) % 2 == 0) continue;
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (mask >> i & 1u) ? -x[i] : x[i];
    if (v > best) best = v;
  }
  return best;
}

/// Pair counts by visiting every pair.
inline stats::KendallCounts kendall_counts_pairwise(std::span<const double> x, std::span<const double> y) {
  stats::detail::require_paired(x, y);
  stats::KendallCounts k;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++k.pairs;
      const int sx = (x[i] < x[j]) - (x[i] > x[j]);
      const int sy = (y[i] < y[j]) - (y[i] > y[j]);
      if (sx == 0) ++k.x_ties;
      if (sy == 0) ++k.y_ties;
      k.score += sx * sy;
    }
  }
  return k;
}

inline double kendall_pairwise(std::span<const double> x, std::span<const double> y) {
  return stats::tau_b(kendall_counts_pairwise(x, y));
}

/// Average ranks (1-based) by counting, for each value, how many are smaller
/// and how many are equal.
inline std::vector<double> ranks_bruteforce(std::span<const double> v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++less;
      if (w == v[i]) ++equal;
    }
    // ranks less+1 .. less+equal, averaged
    r[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return r;
}

inline double spearman_bruteforce(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks_bruteforce(x);
  const auto ry = ranks_bruteforce(y);
  return stats::pearson(rx, ry);
}

}  // namespace ctxkit::oracle
