// Copyright 2026 The qrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrisk/epigraph_lp.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

#include "qrisk/error.hpp"

namespace qrisk::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResolvable = 1e-12;

class Exchange {
 public:
  Exchange(const Problem& problem, const Options& options)
      : p_(problem), opt_(options), n_(static_cast<int>(problem.basis.cols())),
        dim_(n_ + 1) {
    const Eigen::Index points = p_.basis.rows();
    upper_.assign(static_cast<std::size_t>(points), {});
    lower_.assign(static_cast<std::size_t>(points), {});
    for (int r = 0; r < static_cast<int>(p_.rows.size()); ++r) {
      const Row& row = p_.rows[static_cast<std::size_t>(r)];
      if (row.point < 0 || row.point >= points || (row.sign != 1 && row.sign != -1) ||
          !std::isfinite(row.rhs)) {
        throw InvalidArgument("lp: malformed constraint row " + std::to_string(r));
      }
      auto& side = row.sign > 0 ? upper_ : lower_;
      side[static_cast<std::size_t>(row.point)].push_back(r);
      if (row.has_t) objective_points_.push_back(row.point);
    }
    std::sort(objective_points_.begin(), objective_points_.end());
    objective_points_.erase(std::unique(objective_points_.begin(), objective_points_.end()),
                            objective_points_.end());
    if (static_cast<int>(objective_points_.size()) < dim_) {
      throw InvalidArgument("lp: need at least " + std::to_string(dim_) +
                            " objective points, got " +
                            std::to_string(objective_points_.size()));
    }
  }

  Solution run() {
    initial_reference();
    remez();
    simplex();
    refactor();
    simplex();
    Solution out;
    out.coeffs = z_.head(n_);
    out.t = z_(n_);
    out.remez_iterations = remez_iterations_;
    out.pivots = pivots_;
    std::vector<int> order(basis_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Row& ra = p_.rows[static_cast<std::size_t>(basis_[static_cast<std::size_t>(a)])];
      const Row& rb = p_.rows[static_cast<std::size_t>(basis_[static_cast<std::size_t>(b)])];
      return ra.point != rb.point ? ra.point < rb.point
                                  : basis_[static_cast<std::size_t>(a)] <
                                        basis_[static_cast<std::size_t>(b)];
    });
    out.duals.resize(dim_);
    for (int i = 0; i < dim_; ++i) {
      out.active_rows.push_back(basis_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
      out.duals(i) = std::max(0.0, y_(order[static_cast<std::size_t>(i)]));
    }
    return out;
  }

 private:
  Eigen::VectorXd gradient(int r) const {
    const Row& row = p_.rows[static_cast<std::size_t>(r)];
    Eigen::VectorXd g(dim_);
    g.head(n_) = static_cast<double>(row.sign) * p_.basis.row(row.point).transpose();
    g(n_) = row.has_t ? -1.0 : 0.0;
    return g;
  }

  Eigen::MatrixXd basis_rows(const std::vector<int>& rows) const {
    Eigen::MatrixXd b(dim_, dim_);
    for (int i = 0; i < dim_; ++i) b.row(i) = gradient(rows[static_cast<std::size_t>(i)]).transpose();
    return b;
  }

  Eigen::VectorXd rhs_of(const std::vector<int>& rows) const {
    Eigen::VectorXd h(dim_);
    for (int i = 0; i < dim_; ++i) h(i) = p_.rows[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])].rhs;
    return h;
  }

  // Factor a candidate reference. Returns false if singular or not dual feasible.
  bool try_reference(const std::vector<int>& rows, Eigen::MatrixXd& inv, Eigen::VectorXd& z,
                     Eigen::VectorXd& y) const {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_rows(rows));
    inv = lu.inverse();
    if (!inv.allFinite()) return false;
    z = inv * rhs_of(rows);
    y = -inv.row(n_).transpose();
    const double scale = y.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !z.allFinite()) return false;
    return y.minCoeff() >= -1e-9 * scale;
  }

  void adopt(std::vector<int> rows, Eigen::MatrixXd inv, Eigen::VectorXd z, Eigen::VectorXd y) {
    basis_ = std::move(rows);
    inv_ = std::move(inv);
    z_ = std::move(z);
    y_ = std::move(y);
    since_refactor_ = 0;
  }

  int t_row(int point, int sign) const {
    const auto& side = sign > 0 ? upper_ : lower_;
    for (int r : side[static_cast<std::size_t>(point)]) {
      if (p_.rows[static_cast<std::size_t>(r)].has_t) return r;
    }
    return -1;
  }

  // Reference points spread evenly in index over the objective points.
  std::vector<int> uniform_points() const {
    const int count = static_cast<int>(objective_points_.size());
    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(dim_));
    int last = -1;
    for (int j = 0; j < dim_; ++j) {
      const double u = static_cast<double>(j) / (dim_ - 1);
      int idx = static_cast<int>(std::lround(u * (count - 1)));
      idx = std::clamp(idx, last + 1, count - (dim_ - j));
      chosen.push_back(objective_points_[static_cast<std::size_t>(idx)]);
      last = idx;
    }
    return chosen;
  }

  // Reference points split over the runs of consecutive objective points in
  // proportion to run length, clustered towards both ends of every run.
  std::vector<int> clustered_points() const {
    std::vector<std::pair<int, int>> runs;  // [begin, end) into objective_points_
    const int count = static_cast<int>(objective_points_.size());
    for (int i = 0; i < count; ++i) {
      if (i == 0 || objective_points_[static_cast<std::size_t>(i)] != objective_points_[static_cast<std::size_t>(i - 1)] + 1) {
        runs.emplace_back(i, i + 1);
      } else {
        runs.back().second = i + 1;
      }
    }
    if (runs.size() < 2) return {};
    std::vector<int> share(runs.size());
    int assigned = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const int len = runs[r].second - runs[r].first;
      share[r] = std::min(len, std::max(1, static_cast<int>(std::lround(static_cast<double>(dim_) * len / count))));
      assigned += share[r];
    }
    for (std::size_t r = 0; assigned != dim_; r = (r + 1) % runs.size()) {
      const int len = runs[r].second - runs[r].first;
      if (assigned < dim_ && share[r] < len) {
        ++share[r];
        ++assigned;
      } else if (assigned > dim_ && share[r] > 1) {
        --share[r];
        --assigned;
      }
    }
    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(dim_));
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const int len = runs[r].second - runs[r].first;
      const int k = share[r];
      int last = -1;
      for (int j = 0; j < k; ++j) {
        const double u = k == 1 ? 0.5 : 0.5 * (1.0 - std::cos(std::numbers::pi * j / (k - 1)));
        int idx = static_cast<int>(std::lround(u * (len - 1)));
        idx = std::clamp(idx, last + 1, len - (k - j));
        chosen.push_back(objective_points_[static_cast<std::size_t>(runs[r].first + idx)]);
        last = idx;
      }
    }
    return chosen;
  }

  void initial_reference() {
    bool tiny = false;
    for (const std::vector<int>& chosen : {clustered_points(), uniform_points()}) {
      if (static_cast<int>(chosen.size()) != dim_) continue;
      for (int first_sign : {1, -1}) {
        std::vector<int> rows;
        bool complete = true;
        int sign = first_sign;
        for (int pt : chosen) {
          int r = t_row(pt, sign);
          if (r < 0) r = t_row(pt, -sign);
          if (r < 0) {
            complete = false;
            break;
          }
          rows.push_back(r);
          sign = -sign;
        }
        if (!complete) continue;
        Eigen::MatrixXd inv;
        Eigen::VectorXd z, y;
        if (try_reference(rows, inv, z, y)) {
          adopt(std::move(rows), std::move(inv), std::move(z), std::move(y));
          return;
        }
        if (z.allFinite() && std::abs(z(n_)) <= kResolvable * std::max(1.0, rhs_of(rows).cwiseAbs().maxCoeff())) {
          tiny = true;
        }
      }
    }
    if (tiny) throw PrecisionLimit("lp: levelled error below double-precision resolution");
    throw InternalError("lp: no dual-feasible starting reference");
  }

  // f = Phi a, and the signed slack of every row.
  void evaluate() {
    f_ = p_.basis * z_.head(n_);
    const double t = z_(n_);
    slack_.resize(static_cast<Eigen::Index>(p_.rows.size()));
    for (std::size_t r = 0; r < p_.rows.size(); ++r) {
      const Row& row = p_.rows[r];
      slack_(static_cast<Eigen::Index>(r)) =
          row.rhs - (row.sign * f_(row.point) - (row.has_t ? t : 0.0));
    }
  }

  // Tightest row on one side of a point at the current t, with its bound on f.
  std::pair<int, double> tightest(int point, int sign) const {
    const auto& side = sign > 0 ? upper_ : lower_;
    int best = -1;
    double bound = kInf;
    for (int r : side[static_cast<std::size_t>(point)]) {
      const Row& row = p_.rows[static_cast<std::size_t>(r)];
      const double b = row.rhs + (row.has_t ? z_(n_) : 0.0);
      if (b < bound) {
        bound = b;
        best = r;
      }
    }
    return {best, bound};
  }

  void remez() {
    const int points = static_cast<int>(p_.basis.rows());
    struct Extremum {
      int point;
      double e;
    };
    for (remez_iterations_ = 0; remez_iterations_ < opt_.max_remez_iterations; ++remez_iterations_) {
      evaluate();
      if (slack_.minCoeff() >= -opt_.tolerance) return;
      std::vector<Extremum> groups;
      for (int pt = 0; pt < points; ++pt) {
        const auto [ur, ub] = tightest(pt, 1);
        const auto [lr, lb] = tightest(pt, -1);
        if (ur < 0 || lr < 0) continue;
        const double upper = ub;
        const double lower = -lb;
        const double half = std::max(0.5 * (upper - lower), 1e-300);
        const double e = (f_(pt) - 0.5 * (upper + lower)) / half;
        if (e == 0.0) continue;
        if (!groups.empty() && (groups.back().e > 0) == (e > 0)) {
          if (std::abs(e) > std::abs(groups.back().e)) groups.back() = {pt, e};
        } else {
          groups.push_back({pt, e});
        }
      }
      if (static_cast<int>(groups.size()) < dim_) return;
      while (static_cast<int>(groups.size()) > dim_) {
        std::size_t weakest = 0;
        for (std::size_t i = 1; i < groups.size(); ++i) {
          if (std::abs(groups[i].e) < std::abs(groups[weakest].e)) weakest = i;
        }
        const bool endpoint = weakest == 0 || weakest + 1 == groups.size();
        if (endpoint || static_cast<int>(groups.size()) == dim_ + 1) {
          if (!endpoint) {
            weakest = std::abs(groups.front().e) < std::abs(groups.back().e) ? 0 : groups.size() - 1;
          }
          groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(weakest));
        } else {
          Extremum keep = std::abs(groups[weakest - 1].e) >= std::abs(groups[weakest + 1].e)
                              ? groups[weakest - 1]
                              : groups[weakest + 1];
          groups[weakest - 1] = keep;
          groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(weakest),
                       groups.begin() + static_cast<std::ptrdiff_t>(weakest) + 2);
        }
      }
      std::vector<int> rows;
      rows.reserve(groups.size());
      for (const auto& g : groups) rows.push_back(tightest(g.point, g.e > 0 ? 1 : -1).first);
      Eigen::MatrixXd inv;
      Eigen::VectorXd z, y;
      if (!try_reference(rows, inv, z, y)) return;
      if (z(n_) < z_(n_) - opt_.tolerance) return;
      adopt(std::move(rows), std::move(inv), std::move(z), std::move(y));
    }
  }

  void refactor() {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_rows(basis_));
    inv_ = lu.inverse();
    z_ = inv_ * rhs_of(basis_);
    y_ = -inv_.row(n_).transpose();
    since_refactor_ = 0;
  }

  [[noreturn]] void fail() {
    // Scale the current coefficients until the t-free rows hold, then lift t.
    Eigen::VectorXd a = z_.head(n_);
    Eigen::VectorXd f = p_.basis * a;
    double scale = 1.0;
    for (const Row& row : p_.rows) {
      const double v = row.sign * f(row.point);
      if (!row.has_t && v > row.rhs && v > 0.0) scale = std::min(scale, std::max(row.rhs, 0.0) / v);
    }
    a *= scale;
    f *= scale;
    double t = -kInf;
    for (const Row& row : p_.rows) {
      if (row.has_t) t = std::max(t, row.sign * f(row.point) - row.rhs);
    }
    if (std::abs(z_(n_)) <= kResolvable) {
      throw PrecisionLimit("lp: levelled error below double-precision resolution");
    }
    std::vector<double> incumbent(a.data(), a.data() + a.size());
    throw SolverFailure("lp: pivot limit of " + std::to_string(opt_.max_pivots) + " reached",
                        std::move(incumbent), t);
  }

  void simplex() {
    std::vector<char> in_basis(p_.rows.size(), 0);
    for (int r : basis_) in_basis[static_cast<std::size_t>(r)] = 1;
    int degenerate_run = 0;
    for (;;) {
      evaluate();
      const bool bland = degenerate_run > 2 * dim_;
      int enter = -1;
      double worst = -opt_.tolerance;
      for (std::size_t r = 0; r < p_.rows.size(); ++r) {
        if (in_basis[r]) continue;
        const double s = slack_(static_cast<Eigen::Index>(r));
        if (s < worst) {
          enter = static_cast<int>(r);
          if (bland) break;
          worst = s;
        }
      }
      if (enter < 0) return;
      if (pivots_ >= opt_.max_pivots) fail();

      const Eigen::VectorXd g = gradient(enter);
      const Eigen::VectorXd w = inv_.transpose() * g;
      const double wmax = w.cwiseAbs().maxCoeff();
      int leave = -1;
      double ratio = kInf;
      for (int i = 0; i < dim_; ++i) {
        if (w(i) <= 1e-12 * wmax) continue;
        const double q = std::max(y_(i), 0.0) / w(i);
        const bool better = q < ratio ||
                            (q == ratio && basis_[static_cast<std::size_t>(i)] <
                                               basis_[static_cast<std::size_t>(leave)]);
        if (better) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) throw InternalError("lp: problem is infeasible");
      degenerate_run = ratio <= 0.0 ? degenerate_run + 1 : 0;

      const Eigen::VectorXd col = inv_.col(leave);
      Eigen::VectorXd v = w;
      v(leave) -= 1.0;
      inv_.noalias() -= (col / w(leave)) * v.transpose();
      in_basis[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
      in_basis[static_cast<std::size_t>(enter)] = 1;
      basis_[static_cast<std::size_t>(leave)] = enter;
      ++pivots_;
      if (++since_refactor_ >= opt_.refactor_every) {
        refactor();
      } else {
        z_ = inv_ * rhs_of(basis_);
        y_ = -inv_.row(n_).transpose();
      }
    }
  }

  const Problem& p_;
  const Options& opt_;
  int n_;
  int dim_;
  std::vector<std::vector<int>> upper_;
  std::vector<std::vector<int>> lower_;
  std::vector<int> objective_points_;

  std::vector<int> basis_;
  Eigen::MatrixXd inv_;
  Eigen::VectorXd z_;
  Eigen::VectorXd y_;
  Eigen::VectorXd f_;
  Eigen::VectorXd slack_;
  int remez_iterations_ = 0;
  int pivots_ = 0;
  int since_refactor_ = 0;
};

}  // namespace

Solution solve_minimax(const Problem& problem, const Options& options) {
  if (problem.basis.cols() < 1) throw InvalidArgument("lp: empty basis");
  if (!problem.basis.allFinite()) throw InvalidArgument("lp: non-finite basis matrix");
  Exchange exchange(problem, options);
  return exchange.run();
}

double max_violation(const Problem& problem, const Eigen::VectorXd& coeffs, double t) {
  const Eigen::VectorXd f = problem.basis * coeffs;
  double worst = -kInf;
  for (const Row& row : problem.rows) {
    worst = std::max(worst, row.sign * f(row.point) - (row.has_t ? t : 0.0) - row.rhs);
  }
  return worst;
}

}  // namespace qrisk::lp
