#include "boxqi/simplex.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace boxqi::lp {
namespace {

class Solver {
 public:
  Solver(const RationalMatrix& A, const RationalVector& b)
      : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())), A_(A), b_(b) {
    // Flip rows so b >= 0; artificials then start feasible.
    for (int i = 0; i < m_; ++i)
      if (b_[i] < 0) {
        A_.row(i) = -A_.row(i);
        b_[i] = -b_[i];
      }
    Ad_.resize(m_, n_);
    scale_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < m_; ++i) {
        Ad_(i, j) = A_(i, j).convert_to<double>();
        scale_[j] += std::abs(Ad_(i, j));
      }
    binv_ = RationalMatrix::Identity(m_, m_);
    basis_.resize(m_);
    in_basis_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = i;
    }
    xb_ = b_;
  }

  // Runs simplex with the given costs; artificials may enter only if allowed.
  Status run(const std::vector<Rational>& cost, bool artificials_enter) {
    std::vector<double> costd(cost.size());
    for (std::size_t j = 0; j < cost.size(); ++j) costd[j] = cost[j].convert_to<double>();
    const int limit = artificials_enter ? n_ + m_ : n_;
    for (;;) {
      // pi = c_B^T B^-1
      RationalVector pi = RationalVector::Zero(m_);
      for (int i = 0; i < m_; ++i) {
        const Rational& cb = cost[basis_[i]];
        if (cb != 0) pi += cb * binv_.row(i).transpose();
      }
      Eigen::VectorXd pid(m_);
      double pimax = 0.0;
      for (int i = 0; i < m_; ++i) {
        pid[i] = pi[i].convert_to<double>();
        pimax = std::max(pimax, std::abs(pid[i]));
      }

      int entering = -1;
      for (int j = 0; j < limit && entering < 0; ++j) {
        if (in_basis_[j] >= 0) continue;
        double est = costd[j];
        double mag = std::abs(costd[j]);
        if (j < n_) {
          est -= pid.dot(Ad_.col(j));
          mag += pimax * scale_[j];
        } else {
          est -= pid[j - n_];
          mag += pimax;
        }
        // Clear positives are skipped; anything near zero is decided exactly.
        if (est > 1e-9 * (1.0 + mag)) continue;
        if (reduced_cost(j, cost, pi) < 0) entering = j;
      }
      if (entering < 0) return Status::Optimal;

      const RationalVector u = binv_ * column(entering);
      int leaving = -1;
      Rational best;
      for (int i = 0; i < m_; ++i) {
        if (u[i] <= 0) continue;
        const Rational ratio = xb_[i] / u[i];
        if (leaving < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leaving])) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving < 0) return Status::Unbounded;
      pivot(leaving, entering, u);
    }
  }

  // After phase I: pivot zero-level artificials out of the basis where a
  // structural column can replace them; the rest mark redundant rows.
  int drive_out_artificials() {
    int redundant = 0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      int replacement = -1;
      RationalVector u;
      for (int j = 0; j < n_ && replacement < 0; ++j) {
        if (in_basis_[j] >= 0) continue;
        Rational ur = binv_.row(r).dot(A_.col(j));
        if (ur != 0) {
          replacement = j;
          u = binv_ * A_.col(j);
        }
      }
      if (replacement < 0)
        ++redundant;
      else
        pivot(r, replacement, u);
    }
    return redundant;
  }

  Rational objective(const std::vector<Rational>& cost) const {
    Rational acc(0);
    for (int i = 0; i < m_; ++i) acc += cost[basis_[i]] * xb_[i];
    return acc;
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(n_, Rational(0));
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = xb_[i];
    return x;
  }

  int iterations() const { return iterations_; }
  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  RationalVector column(int j) const {
    if (j < n_) return A_.col(j);
    RationalVector e = RationalVector::Zero(m_);
    e[j - n_] = 1;
    return e;
  }

  Rational reduced_cost(int j, const std::vector<Rational>& cost, const RationalVector& pi) const {
    if (j >= n_) return cost[j] - pi[j - n_];
    Rational d = cost[j];
    for (int i = 0; i < m_; ++i)
      if (A_(i, j) != 0) d -= pi[i] * A_(i, j);
    return d;
  }

  void pivot(int r, int entering, const RationalVector& u) {
    const Rational piv = u[r];
    binv_.row(r) /= piv;
    xb_[r] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r || u[i] == 0) continue;
      binv_.row(i) -= u[i] * binv_.row(r);
      xb_[i] -= u[i] * xb_[r];
    }
    in_basis_[basis_[r]] = -1;
    basis_[r] = entering;
    in_basis_[entering] = r;
    ++iterations_;
  }

  int m_, n_;
  RationalMatrix A_;
  RationalVector b_;
  Eigen::MatrixXd Ad_;
  std::vector<double> scale_;
  RationalMatrix binv_;
  RationalVector xb_;
  std::vector<int> basis_;
  std::vector<int> in_basis_;
  int iterations_ = 0;
};

}  // namespace

Result solve(const RationalMatrix& A, const RationalVector& b, const RationalVector& c) {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw std::invalid_argument("lp::solve: dimension mismatch");
  Solver s(A, b);
  const int n = s.cols(), m = s.rows();

  Result res;
  std::vector<Rational> phase1(n + m, Rational(0));
  for (int i = 0; i < m; ++i) phase1[n + i] = 1;
  s.run(phase1, true);
  if (s.objective(phase1) != 0) {
    res.status = Status::Infeasible;
    res.iterations = s.iterations();
    return res;
  }
  res.redundant_rows = s.drive_out_artificials();

  std::vector<Rational> phase2(n + m, Rational(0));
  for (int j = 0; j < n; ++j) phase2[j] = c[j];
  res.status = s.run(phase2, false);
  res.iterations = s.iterations();
  if (res.status == Status::Optimal) {
    res.x = s.primal();
    res.objective = s.objective(phase2);
  }
  return res;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

}  // namespace boxqi::lp
