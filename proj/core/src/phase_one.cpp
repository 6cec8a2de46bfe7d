#include "selinf/phase_one.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "selinf/errors.hpp"

namespace selinf {

void BinaryColumns::add_column(std::span<const std::uint32_t> ones) {
  for (auto r : ones) {
    if (r >= rows_) throw UsageError("binary column entry out of range");
  }
  ones_.insert(ones_.end(), ones.begin(), ones.end());
  offsets_.push_back(ones_.size());
}

namespace {

class PhaseOne {
 public:
  PhaseOne(const BinaryColumns& a, std::span<const double> b, const PhaseOneOptions& opt)
      : a_(a), b_(b.begin(), b.end()), opt_(opt), m_(a.rows()), n_(a.cols()) {
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
    basic_.assign(n_, false);
    binv_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    xb_ = Eigen::Map<const Eigen::VectorXd>(b_.data(), static_cast<Eigen::Index>(m_));
    y_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m_));
  }

  PhaseOneResult run() {
    std::size_t cap = opt_.max_iterations;
    if (cap == 0) cap = std::max<std::size_t>(20000, 50 * (m_ + n_));
    std::size_t iterations = 0;
    std::size_t since_refactor = 0;
    while (true) {
      if (objective() <= opt_.stop_below) {
        if (since_refactor == 0) break;
        refactor();
        since_refactor = 0;
        continue;
      }
      const auto entering = choose_entering();
      if (!entering) {
        // Confirm optimality on a freshly factored basis before stopping.
        if (since_refactor == 0) break;
        refactor();
        since_refactor = 0;
        continue;
      }
      if (iterations >= cap) {
        throw SolverError("phase-I simplex did not converge within " + std::to_string(cap) +
                          " iterations");
      }
      pivot(entering->first, entering->second);
      ++iterations;
      if (++since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }

    PhaseOneResult result;
    result.iterations = iterations;
    result.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double v = std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
      if (basis_[i] < n_) {
        result.x[basis_[i]] = v;
      } else {
        result.infeasibility += v;
      }
    }
    return result;
  }

 private:
  // Bland: the lowest-index structural column with a negative reduced cost.
  // Artificials never re-enter once they leave.
  std::optional<std::pair<std::size_t, double>> choose_entering() const {
    for (std::size_t j = 0; j < n_; ++j) {
      if (in_basis(j)) continue;
      double yaj = 0.0;
      for (auto r : a_.column(j)) yaj += y_(r);
      const double reduced = -yaj;
      if (reduced < -opt_.optimality_tol) return std::make_pair(j, reduced);
    }
    return std::nullopt;
  }

  bool in_basis(std::size_t var) const { return basic_[var]; }

  double objective() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) sum += std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
    }
    return sum;
  }

  void pivot(std::size_t entering, double reduced_cost) {
    const auto m = static_cast<Eigen::Index>(m_);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    for (auto r : a_.column(entering)) u += binv_.col(r);

    // Ratio test; ties go to the basic variable with the smallest index.
    std::optional<Eigen::Index> leave;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (u(i) <= opt_.pivot_tol) continue;
      const double ratio = std::max(0.0, xb_(i)) / u(i);
      if (!leave) {
        best = ratio;
        leave = i;
        continue;
      }
      const double tie = 1e-12 * std::max(1.0, best);
      if (ratio < best - tie) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + tie &&
                 basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(*leave)]) {
        best = std::min(best, ratio);
        leave = i;
      }
    }
    if (!leave) {
      // Phase-I objective is bounded below by zero, so this only happens
      // when precision has been lost.
      throw SolverError("phase-I simplex found an unbounded direction");
    }
    const Eigen::Index r = *leave;
    const double piv = u(r);
    binv_.row(r) /= piv;
    xb_(r) /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == r || u(i) == 0.0) continue;
      binv_.row(i) -= u(i) * binv_.row(r);
      xb_(i) -= u(i) * xb_(r);
    }
    y_ += reduced_cost * binv_.row(r).transpose();

    const std::size_t leaving = basis_[static_cast<std::size_t>(r)];
    basis_[static_cast<std::size_t>(r)] = entering;
    if (leaving < n_) basic_[leaving] = false;
    basic_[entering] = true;
  }

  void refactor() {
    const auto m = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t var = basis_[static_cast<std::size_t>(i)];
      if (var < n_) {
        for (auto r : a_.column(var)) basis_matrix(r, i) = 1.0;
      } else {
        basis_matrix(static_cast<Eigen::Index>(var - n_), i) = 1.0;
        cost(i) = 1.0;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    binv_ = lu.inverse();
    xb_ = binv_ * Eigen::Map<const Eigen::VectorXd>(b_.data(), m);
    y_ = binv_.transpose() * cost;
  }

  const BinaryColumns& a_;
  std::vector<double> b_;
  PhaseOneOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::vector<std::size_t> basis_;  // variable per row; >= n_ means artificial
  std::vector<bool> basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd y_;
};

}  // namespace

PhaseOneResult solve_phase_one(const BinaryColumns& a, std::span<const double> b,
                               const PhaseOneOptions& options) {
  if (b.size() != a.rows()) throw UsageError("right-hand side length does not match row count");
  for (double v : b) {
    if (!(v >= 0.0)) throw UsageError("phase-I right-hand side must be non-negative");
  }
  if (a.rows() == 0) {
    PhaseOneResult empty;
    empty.x.assign(a.cols(), 0.0);
    return empty;
  }
  return PhaseOne(a, b, options).run();
}

}  // namespace selinf
