#pragma once

// Logit geometry of a two-candidate masked prediction. With logits
// l_j = p.e_j + b_j, the pairwise-normalised probability of the first noun
// is sigmoid(dl) for dl = p.(e_1 - e_2) + (b_1 - b_2), so the PR-like
// parameter is epsilon = 2 sigmoid(dl) - 1 = tanh(dl / 2).

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"

namespace ctxkit::geometry {

class PredictionGeometry {
 public:
  PredictionGeometry(std::vector<double> prediction, std::vector<double> embedding_diff,
                     double bias_diff)
      : prediction_(std::move(prediction)),
        embedding_diff_(std::move(embedding_diff)),
        bias_diff_(bias_diff) {
    if (prediction_.empty() || prediction_.size() != embedding_diff_.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "prediction and embedding difference need equal, nonzero dimension");
    }
  }

  const std::vector<double>& prediction() const noexcept { return prediction_; }
  const std::vector<double>& embedding_diff() const noexcept { return embedding_diff_; }
  double bias_diff() const noexcept { return bias_diff_; }

 private:
  std::vector<double> prediction_;
  std::vector<double> embedding_diff_;
  double bias_diff_;
};

inline double logit_diff(const PredictionGeometry& g) {
  return std::inner_product(g.prediction().begin(), g.prediction().end(),
                            g.embedding_diff().begin(), 0.0) +
         g.bias_diff();
}

inline double epsilon_from_logit_diff(double dl) {
  if (!std::isfinite(dl)) throw Error(ErrorKind::InvalidArgument, "non-finite logit difference");
  return std::tanh(dl / 2.0);
}

/// log((1+e)/(1-e)); a certain prediction (|e| = 1) has no finite logit gap.
inline double logit_diff_from_epsilon(double eps) {
  if (!(std::abs(eps) < 1.0)) {
    throw Error(ErrorKind::Saturation, "|epsilon| >= 1 has no finite logit difference");
  }
  return std::log1p(eps) - std::log1p(-eps);
}

/// Signed distance to the hyperplane p.dx + db = 0; positive on the side
/// favouring the first noun.
inline double hyperplane_distance(const PredictionGeometry& g) {
  const auto& dx = g.embedding_diff();
  const double norm = std::sqrt(std::inner_product(dx.begin(), dx.end(), dx.begin(), 0.0));
  if (norm == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "zero embedding difference defines no hyperplane");
  }
  return logit_diff(g) / norm;
}

}  // namespace ctxkit::geometry
