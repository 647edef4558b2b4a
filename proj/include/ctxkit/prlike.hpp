#pragma once

// PR-like models: cyclic binary models sharing the support of a PR box,
// parametrised by one epsilon per context. A correlated context puts
// (1+e)/2 on (0,0) and (1-e)/2 on (1,1); an anti-correlated context puts
// (1+e)/2 on (0,1) and (1-e)/2 on (1,0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/fractions.hpp"
#include "ctxkit/scenario.hpp"

namespace ctxkit {

class PrLikeModel {
 public:
  /// Context indices are zero-based. An empty anti-correlated set means the
  /// canonical form: only the last context is anti-correlated.
  explicit PrLikeModel(std::vector<double> epsilons, std::vector<std::size_t> anticorrelated = {})
      : epsilons_(std::move(epsilons)), anticorrelated_(std::move(anticorrelated)) {
    if (epsilons_.size() < 3) {
      throw Error(ErrorKind::InvalidArgument, "PR-like models need rank >= 3");
    }
    for (double e : epsilons_) {
      if (!(std::abs(e) <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "epsilon outside [-1, 1]");
      }
    }
    if (anticorrelated_.empty()) anticorrelated_.push_back(epsilons_.size() - 1);
    std::sort(anticorrelated_.begin(), anticorrelated_.end());
    if (std::adjacent_find(anticorrelated_.begin(), anticorrelated_.end()) != anticorrelated_.end()) {
      throw Error(ErrorKind::InvalidArgument, "repeated anti-correlated context");
    }
    if (anticorrelated_.back() >= epsilons_.size()) {
      throw Error(ErrorKind::InvalidArgument, "anti-correlated context index out of range");
    }
    if (anticorrelated_.size() % 2 == 0) {
      throw Error(ErrorKind::InvalidArgument, "the anti-correlated set must have odd size");
    }
  }

  std::size_t rank() const noexcept { return epsilons_.size(); }
  const std::vector<double>& epsilons() const noexcept { return epsilons_; }
  const std::vector<std::size_t>& anticorrelated() const noexcept { return anticorrelated_; }

  bool is_anticorrelated(std::size_t context) const {
    return std::binary_search(anticorrelated_.begin(), anticorrelated_.end(), context);
  }

  bool is_canonical() const noexcept {
    return anticorrelated_.size() == 1 && anticorrelated_[0] == rank() - 1;
  }

 private:
  std::vector<double> epsilons_;
  std::vector<std::size_t> anticorrelated_;
};

/// epsilon_i = 2 p_i - 1, where p_i is the weight on the first outcome pair.
inline PrLikeModel from_probabilities(std::span<const double> p_first,
                                      std::vector<std::size_t> anticorrelated = {}) {
  std::vector<double> eps;
  eps.reserve(p_first.size());
  for (double p : p_first) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "probability outside [0, 1]");
    }
    eps.push_back(2.0 * p - 1.0);
  }
  return PrLikeModel(std::move(eps), std::move(anticorrelated));
}

inline EmpiricalModel to_empirical(const PrLikeModel& pr) {
  const std::size_t n = pr.rank();
  std::vector<Table> tables;
  tables.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double hi = (1.0 + pr.epsilons()[c]) / 2.0;
    const double lo = (1.0 - pr.epsilons()[c]) / 2.0;
    if (pr.is_anticorrelated(c)) {
      tables.push_back({0.0, hi, lo, 0.0});
    } else {
      tables.push_back({hi, 0.0, 0.0, lo});
    }
  }
  return EmpiricalModel(cyclic_scenario(static_cast<int>(n)), std::move(tables));
}

/// Relabels outcomes so that only the last context is anti-correlated.
/// Flipping the outcomes of the observable shared by contexts j and j+1
/// toggles both contexts' correlation type and negates epsilon_{j+1};
/// sweeping j = 0..n-2 clears every anti-correlated context but the last.
inline PrLikeModel canonicalize(const PrLikeModel& pr) {
  if (pr.is_canonical()) return pr;
  const std::size_t n = pr.rank();
  std::vector<double> eps = pr.epsilons();
  std::vector<bool> anti(n);
  for (std::size_t c = 0; c < n; ++c) anti[c] = pr.is_anticorrelated(c);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!anti[j]) continue;
    anti[j] = false;
    anti[j + 1] = !anti[j + 1];
    eps[j + 1] = -eps[j + 1];
  }
  return PrLikeModel(std::move(eps));
}

inline double sf_analytic(const PrLikeModel& pr) {
  double m = 0.0;
  for (double e : pr.epsilons()) m = std::max(m, std::abs(e));
  return m;
}

inline double cf_analytic(const PrLikeModel&) { return 1.0; }

/// |e1 - e2| + ... + |e_{n-1} - e_n| + |e_n + e1|; canonical form only.
inline double delta_analytic(const PrLikeModel& pr) {
  if (!pr.is_canonical()) {
    throw Error(ErrorKind::InvalidArgument,
                "delta_analytic needs the canonical anti-correlated pattern; call canonicalize()");
  }
  const auto& e = pr.epsilons();
  double delta = 0.0;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) delta += std::abs(e[i] - e[i + 1]);
  return delta + std::abs(e.back() + e.front());
}

struct DeltaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline DeltaBounds delta_bounds(const PrLikeModel& pr) {
  const double sf = sf_analytic(pr);
  const auto n = static_cast<double>(pr.rank());
  return {2.0 * sf, (pr.rank() % 2 == 1 ? 2.0 * n : 2.0 * (n - 1.0)) * sf};
}

struct ContextualityReport {
  double sf = 0.0;
  double delta = 0.0;
  double cf = 1.0;
  double cnt1 = 0.0;
  bool sheaf_flag = false;
  bool cbd_flag = false;
};

/// With `compute_cf_lp` the contextual fraction comes from the linear
/// program instead of the closed form.
inline ContextualityReport analyze(const PrLikeModel& pr, bool compute_cf_lp = false) {
  const PrLikeModel canon = canonicalize(pr);
  ContextualityReport r;
  r.sf = sf_analytic(canon);
  r.delta = delta_analytic(canon);
  r.cf = compute_cf_lp ? contextual_fraction(to_empirical(pr)).fraction : cf_analytic(canon);
  // s_odd of a PR-like correlation vector is always n
  r.cnt1 = 2.0 - r.delta;
  r.sheaf_flag = r.cf > 2.0 * static_cast<double>(pr.rank()) * r.sf;
  r.cbd_flag = r.cnt1 > 0.0;
  return r;
}

/// Invariance of every context table under swapping the two outcome labels.
inline bool is_symmetric(const EmpiricalModel& model, double tol = 1e-12) {
  const auto& sc = model.scenario();
  if (sc.num_outcomes() != 2) {
    throw Error(ErrorKind::InvalidArgument, "symmetry check supports binary outcomes only");
  }
  for (const auto& t : model.tables()) {
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (std::abs(t[s] - t[t.size() - 1 - s]) > tol) return false;
    }
  }
  return true;
}

}  // namespace ctxkit
