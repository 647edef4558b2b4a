#pragma once

// Seeded self-verification: the closed forms of the PR-like family against
// the linear programs and the CbD measures computed from the tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ctxkit/cbd.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/format.hpp"
#include "ctxkit/fractions.hpp"
#include "ctxkit/oracles.hpp"
#include "ctxkit/prlike.hpp"

namespace ctxkit {

struct SelftestOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  /// Fault injection for harness checks: the analytic path sees the last
  /// epsilon negated.
  bool negate_last_epsilon = false;
};

inline constexpr double kLpTolerance = 1e-6;
inline constexpr double kIdentityTolerance = 1e-12;

struct SelftestReport {
  std::size_t trials = 0;
  double max_sf_dev = 0.0;
  double max_cf_dev = 0.0;
  double max_bound_violation = 0.0;
  double max_cnt1_dev = 0.0;
  double max_s_odd_dev = 0.0;
  std::vector<std::string> counterexamples;

  bool passed() const { return counterexamples.empty(); }
};

namespace detail {

inline std::string describe(std::size_t trial, const std::vector<double>& eps, const std::string& what) {
  std::string s = "trial " + std::to_string(trial) + " eps=(";
  for (std::size_t i = 0; i < eps.size(); ++i) s += (i ? "," : "") + fmt::format_double(eps[i]);
  return s + "): " + what;
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestOptions& opt) {
  if (opt.trials == 0) throw Error(ErrorKind::InvalidArgument, "selftest needs at least one trial");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> rank_dist(3, 4);

  SelftestReport rep;
  rep.trials = opt.trials;
  constexpr std::size_t kMaxDump = 20;
  auto fail = [&](std::size_t t, const std::vector<double>& eps, const std::string& what) {
    if (rep.counterexamples.size() < kMaxDump) rep.counterexamples.push_back(detail::describe(t, eps, what));
  };

  for (std::size_t t = 0; t < opt.trials; ++t) {
    const int n = rank_dist(rng);
    std::vector<double> eps(static_cast<std::size_t>(n));
    for (auto& e : eps) e = unit(rng);
    const PrLikeModel pr(eps);
    std::vector<double> seen = eps;
    if (opt.negate_last_epsilon) seen.back() = -seen.back();
    const PrLikeModel analytic(seen);

    const auto model = to_empirical(pr);
    const double sf_lp = signalling_fraction(model).fraction;
    const double cf_lp = contextual_fraction(model).fraction;
    const double sf_dev = std::abs(sf_lp - sf_analytic(analytic));
    const double cf_dev = std::abs(cf_lp - cf_analytic(analytic));
    rep.max_sf_dev = std::max(rep.max_sf_dev, sf_dev);
    rep.max_cf_dev = std::max(rep.max_cf_dev, cf_dev);
    if (sf_dev > kLpTolerance) fail(t, eps, "SF_LP=" + fmt::format_double(sf_lp) + " vs max|eps|");
    if (cf_dev > kLpTolerance) fail(t, eps, "CF_LP=" + fmt::format_double(cf_lp) + " vs 1");

    const double delta = delta_analytic(analytic);
    const auto b = delta_bounds(analytic);
    const double violation = std::max({0.0, b.lower - delta, delta - b.upper});
    rep.max_bound_violation = std::max(rep.max_bound_violation, violation);
    if (violation > kIdentityTolerance) fail(t, eps, "delta " + fmt::format_double(delta) + " outside bounds");

    const auto st = cbd::from_empirical(model);
    const double c1 = cbd::cnt1(st);
    const double cnt_dev = std::abs(c1 - (2.0 - delta));
    rep.max_cnt1_dev = std::max(rep.max_cnt1_dev, cnt_dev);
    if (cnt_dev > kIdentityTolerance) {
      fail(t, eps, "CNT1=" + fmt::format_double(c1) + " vs 2-delta=" + fmt::format_double(2.0 - delta));
    }

    // random vectors exercise both parity branches of the closed form
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = unit(rng);
    const double so_dev = std::max(std::abs(cbd::s_odd(x) - oracle::s_odd_enumerate(x)),
                                   std::abs(cbd::s_odd(st.correlations) -
                                            oracle::s_odd_enumerate(st.correlations)));
    rep.max_s_odd_dev = std::max(rep.max_s_odd_dev, so_dev);
    if (so_dev > kIdentityTolerance) fail(t, x, "s_odd closed form disagrees with enumeration");
  }
  return rep;
}

inline void print_selftest(std::ostream& out, const SelftestReport& r) {
  out << "trials " << r.trials << '\n'
      << "max |SF_LP - max|eps||   " << fmt::format_double(r.max_sf_dev) << '\n'
      << "max |CF_LP - 1|          " << fmt::format_double(r.max_cf_dev) << '\n'
      << "max delta bound excess   " << fmt::format_double(r.max_bound_violation) << '\n'
      << "max |CNT1 - (2 - delta)| " << fmt::format_double(r.max_cnt1_dev) << '\n'
      << "max s_odd deviation      " << fmt::format_double(r.max_s_odd_dev) << '\n';
  for (const auto& c : r.counterexamples) out << "counterexample: " << c << '\n';
  out << (r.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace ctxkit
