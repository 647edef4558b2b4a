#pragma once

// Dense tableau simplex for small linear programs:
//
//     maximise  c.x   subject to  A x <= b,  x >= 0.
//
// Pivoting follows Bland's rule (lowest-index entering column, lowest-index
// basic variable among tied leaving rows), which rules out cycling on the
// heavily degenerate programs the fraction computations produce and makes
// the optimal vertex deterministic. A negative right-hand side triggers a
// phase one with a single auxiliary column.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ctxkit/error.hpp"

namespace ctxkit::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

struct Options {
  double tolerance = 1e-9;
  std::size_t max_iterations = 100000;
};

/// Row-major constraint matrix.
using Matrix = std::vector<std::vector<double>>;

class DenseSimplex {
 public:
  DenseSimplex(const Matrix& a, std::span<const double> b, std::span<const double> c,
               Options opt = {})
      : m_(b.size()), n_(c.size()), opt_(opt) {
    if (a.size() != m_) throw Error(ErrorKind::InvalidArgument, "lp: row count mismatch");
    // columns: structural [0,n), slack [n,n+m), auxiliary n+m, rhs n+m+1
    width_ = n_ + m_ + 2;
    rows_.assign(m_ + 1, std::vector<double>(width_, 0.0));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (a[i].size() != n_) throw Error(ErrorKind::InvalidArgument, "lp: column count mismatch");
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = a[i][j];
      rows_[i][n_ + i] = 1.0;
      rows_[i][aux()] = -1.0;
      rows_[i][rhs()] = b[i];
      basis_[i] = n_ + i;
    }
    objective_.assign(c.begin(), c.end());
  }

  Result maximize() {
    Result res;
    if (!phase_one()) {
      res.status = last_status_;
      return res;
    }
    // Phase two: reduced costs of the real objective for the current basis.
    auto& obj = rows_[m_];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj[j] = objective_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = basis_[i] < n_ ? objective_[basis_[i]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) obj[j] -= cb * rows_[i][j];
    }
    const Status st = run();
    res.status = st;
    if (st != Status::Optimal) return res;
    res.objective = -rows_[m_][rhs()];
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) res.x[basis_[i]] = std::max(0.0, rows_[i][rhs()]);
    }
    return res;
  }

 private:
  std::size_t aux() const { return n_ + m_; }
  std::size_t rhs() const { return n_ + m_ + 1; }

  bool phase_one() {
    std::size_t worst = m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (rows_[i][rhs()] < -opt_.tolerance && (worst == m_ || rows_[i][rhs()] < rows_[worst][rhs()])) {
        worst = i;
      }
    }
    aux_allowed_ = worst != m_;
    if (!aux_allowed_) return true;

    // maximise -aux; entering aux on the most violated row makes the basis feasible.
    auto& obj = rows_[m_];
    std::fill(obj.begin(), obj.end(), 0.0);
    obj[aux()] = -1.0;
    pivot(worst, aux());
    const Status st = run();
    if (st != Status::Optimal || -rows_[m_][rhs()] < -opt_.tolerance) {
      last_status_ = st == Status::IterationLimit ? st : Status::Infeasible;
      return false;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] != aux()) continue;
      for (std::size_t j = 0; j < aux(); ++j) {
        if (std::abs(rows_[i][j]) > opt_.tolerance) {
          pivot(i, j);
          break;
        }
      }
    }
    aux_allowed_ = false;
    for (auto& row : rows_) row[aux()] = 0.0;
    return true;
  }

  Status run() {
    for (std::size_t iter = 0; iter < opt_.max_iterations; ++iter) {
      const auto& obj = rows_[m_];
      std::size_t enter = width_;
      for (std::size_t j = 0; j < rhs(); ++j) {
        if (j == aux() && !aux_allowed_) continue;
        if (obj[j] > opt_.tolerance) {
          enter = j;
          break;
        }
      }
      if (enter == width_) return Status::Optimal;

      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double coef = rows_[i][enter];
        if (coef <= opt_.tolerance) continue;
        const double ratio = rows_[i][rhs()] / coef;
        if (leave == m_ || ratio < best - opt_.tolerance ||
            (ratio <= best + opt_.tolerance && basis_[i] < basis_[leave])) {
          if (leave == m_ || ratio < best - opt_.tolerance) best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return Status::Unbounded;
      pivot(leave, enter);
    }
    return Status::IterationLimit;
  }

  void pivot(std::size_t r, std::size_t s) {
    auto& prow = rows_[r];
    const double inv = 1.0 / prow[s];
    for (auto& v : prow) v *= inv;
    prow[s] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      auto& row = rows_[i];
      const double f = row[s];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[s] = 0.0;
    }
    basis_[r] = s;
  }

  std::size_t m_, n_, width_ = 0;
  Options opt_;
  std::vector<std::vector<double>> rows_;  // m constraint rows + objective row
  std::vector<std::size_t> basis_;
  std::vector<double> objective_;
  bool aux_allowed_ = false;
  Status last_status_ = Status::Optimal;
};

inline Result maximize(const Matrix& a, std::span<const double> b, std::span<const double> c,
                       Options opt = {}) {
  return DenseSimplex(a, b, c, opt).maximize();
}

}  // namespace ctxkit::lp
