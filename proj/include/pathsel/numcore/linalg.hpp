#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace pathsel {

struct NotPositiveDefinite : std::runtime_error {
  NotPositiveDefinite() : std::runtime_error("matrix is not positive definite") {}
};
struct NonSymmetric : std::runtime_error {
  NonSymmetric() : std::runtime_error("matrix is not symmetric") {}
};

inline bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

// Symmetric positive-definite matrix; construction validates both properties.
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (!is_symmetric(m_)) throw NonSymmetric();
    Eigen::LLT<Eigen::MatrixXd> llt(m_);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  }

  int dim() const { return int(m_.rows()); }
  const Eigen::MatrixXd& entries() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// Lower-triangular L with L L^T = m.
inline Eigen::MatrixXd chol_factor(const SpdMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.entries());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  return llt.matrixL();
}

// Cholesky of a plain symmetric matrix; throws if a pivot is <= 0.
inline Eigen::MatrixXd chol_factor(const Eigen::MatrixXd& m) {
  if (!is_symmetric(m)) throw NonSymmetric();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  return llt.matrixL();
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (!is_symmetric(m, 1e-10)) throw NonSymmetric();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace pathsel
