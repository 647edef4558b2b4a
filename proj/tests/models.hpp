#pragma once

// Fixture models shared by the tests.

#include <optional>
#include <random>
#include <vector>

#include "ctxkit/prlike.hpp"
#include "ctxkit/scenario.hpp"

namespace fixtures {

// Kind of the ctxkit::Error thrown by fn, or nullopt when nothing is thrown.
template <class Fn>
std::optional<ctxkit::ErrorKind> error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const ctxkit::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

using ctxkit::EmpiricalModel;
using ctxkit::MeasurementScenario;

inline MeasurementScenario bell_scenario() {
  return MeasurementScenario({"a1", "a2", "b1", "b2"},
                             {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}}, {"0", "1"});
}

// CHSH value 2.5
inline EmpiricalModel bell_model() {
  return EmpiricalModel(bell_scenario(), {{0.5, 0.0, 0.0, 0.5},
                                          {0.375, 0.125, 0.125, 0.375},
                                          {0.375, 0.125, 0.125, 0.375},
                                          {0.125, 0.375, 0.375, 0.125}});
}

inline EmpiricalModel pr_box_bell() {
  return EmpiricalModel(bell_scenario(), {{0.5, 0.0, 0.0, 0.5},
                                          {0.5, 0.0, 0.0, 0.5},
                                          {0.5, 0.0, 0.0, 0.5},
                                          {0.0, 0.5, 0.5, 0.0}});
}

// Hardy's model: logically but not strongly contextual
inline EmpiricalModel hardy_model() {
  return EmpiricalModel(bell_scenario(), {{0.2, 0.3, 0.3, 0.2},
                                          {0.0, 0.375, 0.375, 0.25},
                                          {0.0, 0.375, 0.375, 0.25},
                                          {0.25, 0.375, 0.375, 0.0}});
}

inline EmpiricalModel pr_prism() { return ctxkit::to_empirical(ctxkit::PrLikeModel({0.0, 0.0, 0.0})); }

inline EmpiricalModel pr_box_cyclic4() {
  return ctxkit::to_empirical(ctxkit::PrLikeModel({0.0, 0.0, 0.0, 0.0}));
}

inline EmpiricalModel deterministic_cyclic(int k) {
  std::vector<ctxkit::Table> t(static_cast<std::size_t>(k), ctxkit::Table{1.0, 0.0, 0.0, 0.0});
  return EmpiricalModel(ctxkit::cyclic_scenario(k), t);
}

inline EmpiricalModel mix(const EmpiricalModel& a, const EmpiricalModel& b, double w) {
  std::vector<ctxkit::Table> t = a.tables();
  for (std::size_t c = 0; c < t.size(); ++c) {
    for (std::size_t s = 0; s < t[c].size(); ++s) t[c][s] = w * a.table(c)[s] + (1.0 - w) * b.table(c)[s];
  }
  return EmpiricalModel(a.scenario(), t);
}

inline std::vector<double> random_epsilons(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> e(n);
  for (auto& v : e) v = u(rng);
  return e;
}

// Random binary model on a cyclic scenario whose tables are invariant under
// swapping the outcome labels: entries (a, b, b, a) with a + b = 1/2.
inline EmpiricalModel random_symmetric_cyclic(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<ctxkit::Table> t;
  for (int c = 0; c < k; ++c) {
    const double a = u(rng);
    t.push_back({a, 0.5 - a, 0.5 - a, a});
  }
  return EmpiricalModel(ctxkit::cyclic_scenario(k), t);
}

}  // namespace fixtures
