#pragma once

// Measurement scenarios, empirical models and their possibilistic collapse.
//
// A joint outcome of a context is stored at a dense index: outcomes are
// enumerated lexicographically in the order the context lists its
// observables, first observable most significant. For binary two-observable
// contexts this gives the familiar column order (0,0), (0,1), (1,0), (1,1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"

namespace ctxkit {

inline constexpr double kNormalisationTolerance = 1e-9;
inline constexpr std::size_t kEnumerationGuard = std::size_t{1} << 20;

class MeasurementScenario {
 public:
  MeasurementScenario(std::vector<std::string> observables,
                      std::vector<std::vector<std::string>> contexts,
                      std::vector<std::string> outcomes)
      : observables_(std::move(observables)),
        contexts_(std::move(contexts)),
        outcomes_(std::move(outcomes)) {
    check_distinct(observables_, "observable");
    check_distinct(outcomes_, "outcome");
    if (outcomes_.size() < 2) {
      throw Error(ErrorKind::InvalidScenario, "a scenario needs at least two outcomes");
    }
    if (contexts_.empty()) {
      throw Error(ErrorKind::InvalidScenario, "a scenario needs at least one context");
    }

    std::vector<bool> covered(observables_.size(), false);
    std::set<std::set<std::size_t>> seen;
    context_indices_.reserve(contexts_.size());
    for (std::size_t c = 0; c < contexts_.size(); ++c) {
      const auto& ctx = contexts_[c];
      if (ctx.empty()) {
        throw Error(ErrorKind::InvalidScenario, "context " + std::to_string(c) + " is empty");
      }
      std::vector<std::size_t> idx;
      idx.reserve(ctx.size());
      for (const auto& name : ctx) {
        const std::size_t i = find_observable(name);
        if (i == observables_.size()) {
          throw Error(ErrorKind::InvalidScenario, "context " + std::to_string(c) +
                                                      " names unknown observable '" + name + "'");
        }
        if (std::find(idx.begin(), idx.end(), i) != idx.end()) {
          throw Error(ErrorKind::InvalidScenario, "context " + std::to_string(c) +
                                                      " repeats observable '" + name + "'");
        }
        idx.push_back(i);
        covered[i] = true;
      }
      if (!seen.emplace(idx.begin(), idx.end()).second) {
        throw Error(ErrorKind::DegenerateScenario,
                    "context " + std::to_string(c) + " duplicates an earlier context");
      }
      context_indices_.push_back(std::move(idx));
    }
    for (std::size_t i = 0; i < observables_.size(); ++i) {
      if (!covered[i]) {
        throw Error(ErrorKind::InvalidScenario,
                    "observable '" + observables_[i] + "' is not covered by any context");
      }
    }
  }

  const std::vector<std::string>& observables() const noexcept { return observables_; }
  const std::vector<std::vector<std::string>>& contexts() const noexcept { return contexts_; }
  const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }

  /// Contexts as observable indices, same order as contexts().
  const std::vector<std::vector<std::size_t>>& context_indices() const noexcept {
    return context_indices_;
  }

  std::size_t num_observables() const noexcept { return observables_.size(); }
  std::size_t num_contexts() const noexcept { return contexts_.size(); }
  std::size_t num_outcomes() const noexcept { return outcomes_.size(); }

  std::size_t observable_index(std::string_view name) const {
    const std::size_t i = find_observable(name);
    if (i == observables_.size()) {
      throw Error(ErrorKind::InvalidArgument, "unknown observable '" + std::string(name) + "'");
    }
    return i;
  }

  /// Position of an observable inside a context, or npos.
  std::size_t position_in_context(std::size_t context, std::size_t observable) const {
    const auto& idx = context_indices_.at(context);
    const auto it = std::find(idx.begin(), idx.end(), observable);
    return it == idx.end() ? npos : static_cast<std::size_t>(it - idx.begin());
  }

  std::size_t table_size(std::size_t context) const {
    std::size_t n = 1;
    for (std::size_t k = 0; k < context_indices_.at(context).size(); ++k) n *= outcomes_.size();
    return n;
  }

  /// Outcome index of the observable at `position` within joint outcome `joint`.
  std::size_t outcome_at(std::size_t context, std::size_t joint, std::size_t position) const {
    const std::size_t m = context_indices_.at(context).size();
    for (std::size_t k = m; k-- > position + 1;) joint /= outcomes_.size();
    return joint % outcomes_.size();
  }

  bool operator==(const MeasurementScenario& other) const {
    return observables_ == other.observables_ && contexts_ == other.contexts_ &&
           outcomes_ == other.outcomes_;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t find_observable(std::string_view name) const {
    const auto it = std::find(observables_.begin(), observables_.end(), name);
    return static_cast<std::size_t>(it - observables_.begin());
  }

  static void check_distinct(const std::vector<std::string>& names, const char* what) {
    std::set<std::string> unique;
    for (const auto& n : names) {
      if (n.empty()) throw Error(ErrorKind::InvalidScenario, std::string("empty ") + what + " name");
      if (!unique.insert(n).second) {
        throw Error(ErrorKind::InvalidScenario, std::string("duplicate ") + what + " '" + n + "'");
      }
    }
  }

  std::vector<std::string> observables_;
  std::vector<std::vector<std::string>> contexts_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<std::size_t>> context_indices_;
};

/// The k-cyclic scenario: observables x1..xk, contexts {x1,x2}, ..., {xk,x1}.
inline MeasurementScenario cyclic_scenario(int k, std::vector<std::string> outcomes = {"0", "1"}) {
  if (k < 3) {
    throw Error(ErrorKind::DegenerateScenario,
                "cyclic scenarios need k >= 3 (got " + std::to_string(k) + ")");
  }
  std::vector<std::string> xs;
  for (int i = 1; i <= k; ++i) xs.push_back("x" + std::to_string(i));
  std::vector<std::vector<std::string>> contexts;
  for (int i = 0; i < k; ++i) contexts.push_back({xs[i], xs[(i + 1) % k]});
  return MeasurementScenario(std::move(xs), std::move(contexts), std::move(outcomes));
}

using Table = std::vector<double>;

class EmpiricalModel {
 public:
  EmpiricalModel(MeasurementScenario scenario, std::vector<Table> tables)
      : scenario_(std::move(scenario)), tables_(std::move(tables)) {}

  const MeasurementScenario& scenario() const noexcept { return scenario_; }
  const std::vector<Table>& tables() const noexcept { return tables_; }
  const Table& table(std::size_t context) const { return tables_.at(context); }

 private:
  MeasurementScenario scenario_;
  std::vector<Table> tables_;
};

/// Throws InvalidModel naming the offending context when a table has the
/// wrong shape, a negative or non-finite entry, or does not sum to one.
inline void validate(const EmpiricalModel& model) {
  const auto& sc = model.scenario();
  if (model.tables().size() != sc.num_contexts()) {
    throw Error(ErrorKind::InvalidModel, "expected " + std::to_string(sc.num_contexts()) +
                                             " tables, got " + std::to_string(model.tables().size()));
  }
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    const auto& t = model.table(c);
    const std::string where = "context " + std::to_string(c);
    if (t.size() != sc.table_size(c)) {
      throw Error(ErrorKind::InvalidModel, where + ": shape mismatch, expected " +
                                               std::to_string(sc.table_size(c)) + " entries, got " +
                                               std::to_string(t.size()));
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (!std::isfinite(t[s])) {
        throw Error(ErrorKind::InvalidModel, where + ": non-finite entry at " + std::to_string(s));
      }
      if (t[s] < 0.0) {
        std::ostringstream os;
        os << where << ": negative entry " << t[s] << " at " << s;
        throw Error(ErrorKind::InvalidModel, os.str());
      }
      sum += t[s];
    }
    if (std::abs(sum - 1.0) > kNormalisationTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << where << ": normalisation error, row sums to " << sum;
      throw Error(ErrorKind::InvalidModel, os.str());
    }
  }
}

inline std::vector<double> marginal(const EmpiricalModel& model, std::size_t context,
                                    std::size_t observable) {
  const auto& sc = model.scenario();
  const std::size_t pos = sc.position_in_context(context, observable);
  if (pos == MeasurementScenario::npos) {
    throw Error(ErrorKind::NotInContext, "observable '" + sc.observables().at(observable) +
                                             "' is not in context " + std::to_string(context));
  }
  std::vector<double> out(sc.num_outcomes(), 0.0);
  const auto& t = model.table(context);
  for (std::size_t s = 0; s < t.size(); ++s) out[sc.outcome_at(context, s, pos)] += t[s];
  return out;
}

inline std::vector<double> marginal(const EmpiricalModel& model, std::size_t context,
                                    std::string_view observable) {
  return marginal(model, context, model.scenario().observable_index(observable));
}

/// Marginals are compared by observable name, so a shared observable may sit
/// at different positions in its host contexts.
inline bool is_no_signalling(const EmpiricalModel& model, double tol) {
  const auto& sc = model.scenario();
  for (std::size_t x = 0; x < sc.num_observables(); ++x) {
    std::vector<double> reference;
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
      if (sc.position_in_context(c, x) == MeasurementScenario::npos) continue;
      auto m = marginal(model, c, x);
      if (reference.empty()) {
        reference = std::move(m);
        continue;
      }
      for (std::size_t o = 0; o < m.size(); ++o) {
        if (std::abs(m[o] - reference[o]) > tol) return false;
      }
    }
  }
  return true;
}

using Support = std::vector<std::uint8_t>;

class PossibilisticModel {
 public:
  PossibilisticModel(MeasurementScenario scenario, std::vector<Support> supports)
      : scenario_(std::move(scenario)), supports_(std::move(supports)) {
    if (supports_.size() != scenario_.num_contexts()) {
      throw Error(ErrorKind::InvalidModel, "support count does not match context count");
    }
    for (std::size_t c = 0; c < supports_.size(); ++c) {
      if (supports_[c].size() != scenario_.table_size(c)) {
        throw Error(ErrorKind::InvalidModel, "context " + std::to_string(c) + ": support shape mismatch");
      }
      if (std::none_of(supports_[c].begin(), supports_[c].end(), [](auto v) { return v != 0; })) {
        throw Error(ErrorKind::InvalidModel, "context " + std::to_string(c) + " has empty support");
      }
    }
  }

  const MeasurementScenario& scenario() const noexcept { return scenario_; }
  const std::vector<Support>& supports() const noexcept { return supports_; }
  const Support& support(std::size_t context) const { return supports_.at(context); }

 private:
  MeasurementScenario scenario_;
  std::vector<Support> supports_;
};

/// Exact collapse by default: an outcome is possible iff its probability
/// exceeds `support_eps` (0 unless the caller thresholds noisy data).
inline PossibilisticModel possibilistic_collapse(const EmpiricalModel& model,
                                                 double support_eps = 0.0) {
  std::vector<Support> supports;
  supports.reserve(model.tables().size());
  for (const auto& t : model.tables()) {
    Support s(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) s[i] = t[i] > support_eps ? 1 : 0;
    supports.push_back(std::move(s));
  }
  return PossibilisticModel(model.scenario(), std::move(supports));
}

/// A deterministic global value assignment: one outcome index per observable.
struct GlobalAssignment {
  std::vector<std::size_t> outcome_of;

  const std::string& label(const MeasurementScenario& sc, std::string_view observable) const {
    return sc.outcomes().at(outcome_of.at(sc.observable_index(observable)));
  }

  bool operator==(const GlobalAssignment&) const = default;
};

/// Joint-outcome index a global assignment restricts to on a context.
inline std::size_t restrict_to(const MeasurementScenario& sc, const GlobalAssignment& g,
                               std::size_t context) {
  std::size_t joint = 0;
  for (std::size_t x : sc.context_indices()[context]) joint = joint * sc.num_outcomes() + g.outcome_of[x];
  return joint;
}

inline std::size_t num_global_assignments(const MeasurementScenario& sc) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < sc.num_observables(); ++i) {
    if (total > kEnumerationGuard / sc.num_outcomes()) {
      throw Error(ErrorKind::EnumerationGuard, "global assignment count exceeds 2^20");
    }
    total *= sc.num_outcomes();
  }
  return total;
}

/// Calls `fn(const GlobalAssignment&)` for every global assignment in
/// lexicographic order (first observable most significant).
template <class Fn>
void for_each_global_assignment(const MeasurementScenario& sc, Fn&& fn) {
  const std::size_t total = num_global_assignments(sc);
  GlobalAssignment g{std::vector<std::size_t>(sc.num_observables(), 0)};
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t i = sc.num_observables(); i-- > 0;) {
      g.outcome_of[i] = rest % sc.num_outcomes();
      rest /= sc.num_outcomes();
    }
    fn(std::as_const(g));
  }
}

inline std::vector<GlobalAssignment> global_sections(const PossibilisticModel& pm) {
  const auto& sc = pm.scenario();
  std::vector<GlobalAssignment> sections;
  for_each_global_assignment(sc, [&](const GlobalAssignment& g) {
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
      if (!pm.support(c)[restrict_to(sc, g, c)]) return;
    }
    sections.push_back(g);
  });
  return sections;
}

/// True iff some possible local outcome extends to no global section.
inline bool is_logically_contextual(const PossibilisticModel& pm) {
  const auto& sc = pm.scenario();
  std::vector<Support> covered;
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) covered.emplace_back(sc.table_size(c), 0);
  for (const auto& g : global_sections(pm)) {
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) covered[c][restrict_to(sc, g, c)] = 1;
  }
  for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
    for (std::size_t s = 0; s < covered[c].size(); ++s) {
      if (pm.support(c)[s] && !covered[c][s]) return true;
    }
  }
  return false;
}

inline bool is_logically_contextual(const EmpiricalModel& model, double support_eps = 0.0) {
  return is_logically_contextual(possibilistic_collapse(model, support_eps));
}

inline bool is_strongly_contextual(const PossibilisticModel& pm) {
  return global_sections(pm).empty();
}

inline bool is_strongly_contextual(const EmpiricalModel& model, double support_eps = 0.0) {
  return is_strongly_contextual(possibilistic_collapse(model, support_eps));
}

}  // namespace ctxkit
