#pragma once

// Contextual fraction (CF) and signalling fraction (SF) by linear programming.
//
// CF: maximise the total weight of deterministic global assignments whose
// restrictions stay below the model, context by context. The optimum is the
// non-contextual mass 1 - CF.
//
// SF: maximise the common row mass c of a sub-model f <= e whose rows all
// sum to c and whose single-observable marginals agree across contexts. The
// optimum is the no-signalling mass 1 - SF.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/scenario.hpp"
#include "ctxkit/simplex.hpp"

namespace ctxkit {

enum class SolverStatus { Optimal, InfeasibleGuard };

struct DecompositionResult {
  /// lambda for CF, mu for SF.
  double fraction = 1.0;
  /// CF only: weight per global assignment, lexicographic order.
  std::vector<double> witness_weights;
  /// SF only: the dominated no-signalling sub-model f (rows sum to common_mass).
  std::vector<Table> no_signalling_part;
  double common_mass = 0.0;
  SolverStatus status = SolverStatus::Optimal;
};

namespace detail {

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

inline void require_optimal(const lp::Result& r, const char* which) {
  if (r.status != lp::Status::Optimal) {
    throw Error(ErrorKind::SolverFailure,
                std::string(which) + " linear program failed: " + lp::to_string(r.status));
  }
}

}  // namespace detail

inline DecompositionResult contextual_fraction(const EmpiricalModel& model) {
  validate(model);
  const auto& sc = model.scenario();

  std::vector<GlobalAssignment> assignments;
  for_each_global_assignment(sc, [&](const GlobalAssignment& g) { assignments.push_back(g); });

  lp::Matrix a;
  std::vector<double> b;
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    const std::size_t base = a.size();
    for (std::size_t s = 0; s < sc.table_size(c); ++s) {
      a.emplace_back(assignments.size(), 0.0);
      b.push_back(model.table(c)[s]);
    }
    for (std::size_t g = 0; g < assignments.size(); ++g) {
      a[base + restrict_to(sc, assignments[g], c)][g] = 1.0;
    }
  }
  const std::vector<double> cost(assignments.size(), 1.0);
  const auto r = lp::maximize(a, b, cost);
  detail::require_optimal(r, "contextual fraction");

  DecompositionResult out;
  out.fraction = detail::clamp_unit(1.0 - r.objective);
  out.witness_weights = r.x;
  return out;
}

inline DecompositionResult signalling_fraction(const EmpiricalModel& model) {
  validate(model);
  const auto& sc = model.scenario();

  std::vector<std::size_t> offset(sc.num_contexts() + 1, 0);
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) offset[c + 1] = offset[c] + sc.table_size(c);
  const std::size_t mass = offset.back();  // index of the common-mass variable
  const std::size_t nvars = mass + 1;

  lp::Matrix a;
  std::vector<double> b;
  auto add_equality = [&](std::vector<double> row) {
    std::vector<double> neg(row.size());
    std::transform(row.begin(), row.end(), neg.begin(), [](double v) { return -v; });
    a.push_back(std::move(row));
    b.push_back(0.0);
    a.push_back(std::move(neg));
    b.push_back(0.0);
  };

  // f <= e
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    for (std::size_t s = 0; s < sc.table_size(c); ++s) {
      std::vector<double> row(nvars, 0.0);
      row[offset[c] + s] = 1.0;
      a.push_back(std::move(row));
      b.push_back(model.table(c)[s]);
    }
  }
  // every row of f carries the same mass
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    std::vector<double> row(nvars, 0.0);
    for (std::size_t s = 0; s < sc.table_size(c); ++s) row[offset[c] + s] = 1.0;
    row[mass] = -1.0;
    add_equality(std::move(row));
  }
  // marginals of f agree with the first host context of each observable
  for (std::size_t x = 0; x < sc.num_observables(); ++x) {
    std::vector<std::size_t> hosts;
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
      if (sc.position_in_context(c, x) != MeasurementScenario::npos) hosts.push_back(c);
    }
    for (std::size_t h = 1; h < hosts.size(); ++h) {
      const std::size_t c0 = hosts[0], c1 = hosts[h];
      const std::size_t p0 = sc.position_in_context(c0, x), p1 = sc.position_in_context(c1, x);
      for (std::size_t o = 0; o < sc.num_outcomes(); ++o) {
        std::vector<double> row(nvars, 0.0);
        for (std::size_t s = 0; s < sc.table_size(c0); ++s) {
          if (sc.outcome_at(c0, s, p0) == o) row[offset[c0] + s] += 1.0;
        }
        for (std::size_t s = 0; s < sc.table_size(c1); ++s) {
          if (sc.outcome_at(c1, s, p1) == o) row[offset[c1] + s] -= 1.0;
        }
        add_equality(std::move(row));
      }
    }
  }

  std::vector<double> cost(nvars, 0.0);
  cost[mass] = 1.0;
  const auto r = lp::maximize(a, b, cost);
  detail::require_optimal(r, "signalling fraction");

  DecompositionResult out;
  out.common_mass = r.x[mass];
  out.fraction = detail::clamp_unit(1.0 - r.objective);
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    out.no_signalling_part.emplace_back(r.x.begin() + static_cast<std::ptrdiff_t>(offset[c]),
                                        r.x.begin() + static_cast<std::ptrdiff_t>(offset[c + 1]));
  }
  return out;
}

struct SheafVerdict {
  bool contextual = false;
  double cf = 0.0;
  double sf = 0.0;
};

/// CF > 2|M| SF, strict.
inline SheafVerdict sheaf_contextual(const EmpiricalModel& model) {
  SheafVerdict v;
  v.cf = contextual_fraction(model).fraction;
  v.sf = signalling_fraction(model).fraction;
  v.contextual = v.cf > 2.0 * static_cast<double>(model.scenario().num_contexts()) * v.sf;
  return v;
}

}  // namespace ctxkit
