#pragma once

// Correlation, regression and histogram helpers for batches of reports.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctxkit/error.hpp"
#include "ctxkit/prlike.hpp"

namespace ctxkit::stats {

struct FeatureVector {
  double euclidean_dist = 0.0;
  double bias_diff = 0.0;
  double nouns_entropy = 0.0;
  double adjectives_entropy = 0.0;
  std::optional<double> cosine_similarity;
};

namespace detail {

inline void require_paired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "inputs differ in length");
  if (x.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two observations");
}

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::require_paired(x, y);
  const double mx = detail::mean(x), my = detail::mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::UndefinedStatistic, "correlation undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks, ties receive the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::require_paired(x, y);
  const auto rx = average_ranks(x), ry = average_ranks(y);
  return pearson(rx, ry);
}

/// Pair counts behind Kendall's tau-b.
struct KendallCounts {
  std::int64_t pairs = 0;     // n(n-1)/2
  std::int64_t x_ties = 0;    // pairs tied in x
  std::int64_t y_ties = 0;    // pairs tied in y
  std::int64_t score = 0;     // concordant - discordant
};

inline double tau_b(const KendallCounts& k) {
  const double denom = std::sqrt(static_cast<double>(k.pairs - k.x_ties) *
                                 static_cast<double>(k.pairs - k.y_ties));
  if (denom == 0.0) throw Error(ErrorKind::UndefinedStatistic, "Kendall tau undefined for a constant input");
  return static_cast<double>(k.score) / denom;
}

namespace detail {

inline std::int64_t tie_pairs_sorted(std::span<const double> sorted) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Merge sort counting pairs that appear in strictly decreasing order.
inline std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf,
                                     std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace detail

/// Knight's O(n log n) pair counting.
inline KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y) {
  detail::require_paired(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  KendallCounts k;
  k.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

  std::int64_t joint_ties = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const auto t = static_cast<std::int64_t>(j - i + 1);
    k.x_ties += t * (t - 1) / 2;
    for (std::size_t a = i; a <= j;) {
      std::size_t b = a;
      while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
      const auto u = static_cast<std::int64_t>(b - a + 1);
      joint_ties += u * (u - 1) / 2;
      a = b + 1;
    }
    i = j + 1;
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::int64_t swaps = detail::count_inversions(ys, buf, 0, n);
  k.y_ties = detail::tie_pairs_sorted(ys);
  k.score = k.pairs - k.x_ties - k.y_ties + joint_ties - 2 * swaps;
  return k;
}

inline double kendall(std::span<const double> x, std::span<const double> y) {
  return tau_b(kendall_counts(x, y));
}

/// R^2 of a least-squares polynomial fit. The abscissa is centred and scaled
/// to [-1, 1] before building the Vandermonde design, which is solved by
/// column-pivoted QR. A constant response yields 0.
inline double polyfit_r2(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "inputs differ in length");
  if (degree < 1 || x.size() <= static_cast<std::size_t>(degree)) {
    throw Error(ErrorKind::InvalidArgument, "need 1 <= degree < number of observations");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  const double my = detail::mean(y);
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - my) * (v - my);
  if (ss_tot == 0.0) return 0.0;

  const double mx = detail::mean(x);
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v - mx));
  if (scale == 0.0) scale = 1.0;

  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (x[static_cast<std::size_t>(i)] - mx) / scale;
    double power = 1.0;
    for (int d = 0; d <= degree; ++d) {
      design(i, d) = power;
      power *= t;
    }
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  const double ss_res = (design * coef - rhs).squaredNorm();
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

/// Shannon entropy in bits of the distribution proportional to `freqs`.
inline double entropy_bits(std::span<const double> freqs) {
  double total = 0.0;
  for (double f : freqs) {
    if (!std::isfinite(f) || f < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "frequencies must be finite and nonnegative");
    }
    total += f;
  }
  if (total <= 0.0) throw Error(ErrorKind::InvalidArgument, "entropy of an all-zero frequency list");
  double h = 0.0;
  for (double f : freqs) {
    if (f == 0.0) continue;
    const double p = f / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

inline double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorKind::InvalidArgument, "vectors differ in dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
  return std::sqrt(s);
}

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorKind::InvalidArgument, "vectors differ in dimension");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorKind::InvalidArgument, "cosine of a zero vector");
  return std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Histograms

/// Bin index of v in [lo, hi] split into `bins` equal bins; hi itself falls
/// in the last bin. Returns nullopt outside the range.
inline std::optional<std::size_t> bin_of(double v, double lo, double hi, std::size_t bins) {
  if (!(v >= lo && v <= hi)) return std::nullopt;
  const auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

inline std::vector<double> linear_edges(double lo, double hi, std::size_t bins) {
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  return edges;
}

struct Histogram1D {
  std::vector<double> edges;
  std::vector<std::int64_t> counts;
  /// Records in each bin that carry the highlighted (contextual) flag.
  std::vector<std::int64_t> highlighted;
};

inline Histogram1D histogram(std::span<const double> values, std::span<const bool> flags,
                             std::size_t bins, double lo, double hi) {
  if (bins == 0) throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
  if (values.size() != flags.size()) throw Error(ErrorKind::InvalidArgument, "values and flags differ in length");
  Histogram1D h{linear_edges(lo, hi, bins), std::vector<std::int64_t>(bins, 0),
                std::vector<std::int64_t>(bins, 0)};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (const auto b = bin_of(values[i], lo, hi, bins)) {
      ++h.counts[*b];
      if (flags[i]) ++h.highlighted[*b];
    }
  }
  return h;
}

enum class Region { Forbidden, CbdOnly, SheafAndCbd, Neither };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::Forbidden: return "forbidden";
    case Region::CbdOnly: return "cbd_only";
    case Region::SheafAndCbd: return "sheaf_and_cbd";
    case Region::Neither: return "neither";
  }
  return "unknown";
}

struct Histogram2D {
  std::size_t bins = 0;
  std::size_t rank = 0;
  std::vector<double> sf_edges;
  std::vector<double> delta_edges;
  /// counts[i * bins + j]: SF bin i, delta bin j.
  std::vector<std::int64_t> counts;
  std::vector<Region> regions;

  std::int64_t count(std::size_t sf_bin, std::size_t delta_bin) const { return counts[sf_bin * bins + delta_bin]; }
  Region region(std::size_t sf_bin, std::size_t delta_bin) const { return regions[sf_bin * bins + delta_bin]; }
};

/// Upper end of the admissible delta range per unit SF for rank-n PR-like models.
inline double delta_upper_factor(std::size_t rank) {
  const auto n = static_cast<double>(rank);
  return rank % 2 == 1 ? 2.0 * n : 2.0 * (n - 1.0);
}

/// SF in [0, 1] by delta in [0, 2 rank]. A bin is forbidden when no point of
/// the closed bin satisfies 2 SF <= delta <= upper(rank) SF; otherwise its
/// label comes from the contextuality thresholds at the bin centre.
inline Histogram2D sf_delta_grid(std::span<const ContextualityReport> reports, std::size_t bins,
                                 std::size_t rank) {
  if (bins == 0) throw Error(ErrorKind::InvalidArgument, "grid needs at least one bin");
  if (rank < 3) throw Error(ErrorKind::InvalidArgument, "grid needs rank >= 3");
  const double delta_hi = 2.0 * static_cast<double>(rank);
  const double upper = delta_upper_factor(rank);
  const double sheaf_threshold = 1.0 / (2.0 * static_cast<double>(rank));

  Histogram2D g;
  g.bins = bins;
  g.rank = rank;
  g.sf_edges = linear_edges(0.0, 1.0, bins);
  g.delta_edges = linear_edges(0.0, delta_hi, bins);
  g.counts.assign(bins * bins, 0);
  g.regions.resize(bins * bins);

  for (std::size_t i = 0; i < bins; ++i) {
    const double s0 = g.sf_edges[i], s1 = g.sf_edges[i + 1];
    for (std::size_t j = 0; j < bins; ++j) {
      const double d0 = g.delta_edges[j], d1 = g.delta_edges[j + 1];
      // smallest SF in the bin that can reach delta >= d0
      const double s_star = std::max(s0, d0 / upper);
      const bool admissible = s_star <= s1 && 2.0 * s_star <= d1;
      Region r;
      if (!admissible) {
        r = Region::Forbidden;
      } else {
        const double sc = (s0 + s1) / 2.0, dc = (d0 + d1) / 2.0;
        const bool cbd = dc < 2.0;
        const bool sheaf = sc < sheaf_threshold;
        r = cbd ? (sheaf ? Region::SheafAndCbd : Region::CbdOnly) : Region::Neither;
      }
      g.regions[i * bins + j] = r;
    }
  }
  for (const auto& rep : reports) {
    const auto i = bin_of(rep.sf, 0.0, 1.0, bins);
    const auto j = bin_of(rep.delta, 0.0, delta_hi, bins);
    if (i && j) ++g.counts[*i * bins + *j];
  }
  return g;
}

struct SweepPoint {
  double percentile = 0.0;
  std::size_t count = 0;
  double sheaf_fraction = 0.0;
  double cbd_fraction = 0.0;
};

/// For each percentile q, the flag fractions among the ceil(q/100 N) records
/// with the highest cosine similarity (ties keep input order).
inline std::vector<SweepPoint> similarity_sweep(
    std::span<const std::pair<ContextualityReport, double>> records,
    std::span<const double> percentiles) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return records[a].second > records[b].second; });

  std::vector<SweepPoint> out;
  for (double q : percentiles) {
    if (!(q > 0.0 && q <= 100.0)) {
      throw Error(ErrorKind::InvalidArgument, "percentile must lie in (0, 100]");
    }
    const auto n = static_cast<double>(records.size());
    const auto take = static_cast<std::size_t>(std::ceil(q * n / 100.0 - 1e-9));
    if (take == 0) throw Error(ErrorKind::InvalidArgument, "empty similarity restriction");
    SweepPoint p{q, take, 0.0, 0.0};
    std::size_t sheaf = 0, cbd = 0;
    for (std::size_t k = 0; k < take; ++k) {
      const auto& rep = records[order[k]].first;
      sheaf += rep.sheaf_flag ? 1 : 0;
      cbd += rep.cbd_flag ? 1 : 0;
    }
    p.sheaf_fraction = static_cast<double>(sheaf) / static_cast<double>(take);
    p.cbd_fraction = static_cast<double>(cbd) / static_cast<double>(take);
    out.push_back(p);
  }
  return out;
}

}  // namespace ctxkit::stats
