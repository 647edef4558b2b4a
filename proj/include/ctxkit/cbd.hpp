#pragma once

// Contextuality-by-Default measures for cyclic systems of binary variables.
// Outcome index 0 is encoded as +1 and index 1 as -1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/scenario.hpp"

namespace ctxkit::cbd {

struct CyclicSystemStats {
  std::size_t rank = 0;
  /// <R R> per context, in context order.
  std::vector<double> correlations;
  /// Per observable (content): its expectation in each of its two host
  /// contexts, hosts taken in increasing context order.
  std::vector<std::pair<double, double>> expectations;
};

namespace detail {

inline double encode(std::size_t outcome) { return outcome == 0 ? 1.0 : -1.0; }

/// Host contexts per observable; throws unless the cover is a single cycle
/// of two-observable contexts.
inline std::vector<std::pair<std::size_t, std::size_t>> cyclic_hosts(const MeasurementScenario& sc) {
  const std::size_t n = sc.num_contexts();
  if (n < 3 || sc.num_observables() != n) {
    throw Error(ErrorKind::InvalidScenario, "not a cyclic scenario: need |X| = |M| >= 3");
  }
  std::vector<std::vector<std::size_t>> hosts(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (sc.context_indices()[c].size() != 2) {
      throw Error(ErrorKind::InvalidScenario,
                  "not a cyclic scenario: context " + std::to_string(c) + " does not have 2 observables");
    }
    for (std::size_t x : sc.context_indices()[c]) hosts[x].push_back(c);
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < n; ++x) {
    if (hosts[x].size() != 2) {
      throw Error(ErrorKind::InvalidScenario, "not a cyclic scenario: observable '" +
                                                  sc.observables()[x] + "' is not in exactly 2 contexts");
    }
    out.emplace_back(hosts[x][0], hosts[x][1]);
  }
  // walk the cycle from context 0; every context must be reached
  std::vector<bool> seen(n, false);
  std::size_t ctx = 0, via = sc.context_indices()[0][0];
  for (std::size_t step = 0; step < n; ++step) {
    if (seen[ctx]) break;
    seen[ctx] = true;
    const auto& obs = sc.context_indices()[ctx];
    const std::size_t next_obs = obs[0] == via ? obs[1] : obs[0];
    ctx = out[next_obs].first == ctx ? out[next_obs].second : out[next_obs].first;
    via = next_obs;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorKind::InvalidScenario, "not a cyclic scenario: cover splits into several cycles");
  }
  return out;
}

}  // namespace detail

inline CyclicSystemStats from_empirical(const EmpiricalModel& model) {
  const auto& sc = model.scenario();
  if (sc.num_outcomes() != 2) {
    throw Error(ErrorKind::InvalidArgument, "cyclic systems need binary outcomes");
  }
  const auto hosts = detail::cyclic_hosts(sc);

  CyclicSystemStats st;
  st.rank = sc.num_contexts();
  for (std::size_t c = 0; c < st.rank; ++c) {
    const auto& t = model.table(c);
    double corr = 0.0;
    for (std::size_t s = 0; s < t.size(); ++s) {
      corr += t[s] * detail::encode(sc.outcome_at(c, s, 0)) * detail::encode(sc.outcome_at(c, s, 1));
    }
    st.correlations.push_back(corr);
  }
  auto expectation = [&](std::size_t c, std::size_t x) {
    const auto m = marginal(model, c, x);
    return m[0] - m[1];
  };
  for (std::size_t x = 0; x < st.rank; ++x) {
    st.expectations.emplace_back(expectation(hosts[x].first, x), expectation(hosts[x].second, x));
  }
  return st;
}

/// Maximum of sigma.x over sign vectors with an odd number of -1 entries.
/// Closed form: with an odd number of negative entries the sign pattern of x
/// itself is admissible; otherwise the cheapest fix flips the smallest |x_i|.
inline double s_odd(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "s_odd of an empty vector");
  double total = 0.0;
  double smallest = std::abs(x[0]);
  std::size_t negatives = 0;
  for (double v : x) {
    total += std::abs(v);
    smallest = std::min(smallest, std::abs(v));
    if (v < 0.0) ++negatives;
  }
  return negatives % 2 == 1 ? total : total - 2.0 * smallest;
}

inline double direct_influence(const CyclicSystemStats& st) {
  double delta = 0.0;
  for (const auto& [a, b] : st.expectations) delta += std::abs(a - b);
  return delta;
}

inline double cnt1(const CyclicSystemStats& st) {
  return s_odd(st.correlations) - direct_influence(st) - static_cast<double>(st.rank) + 2.0;
}

inline bool is_cbd_contextual(const CyclicSystemStats& st) { return cnt1(st) > 0.0; }

}  // namespace ctxkit::cbd
