#include "bbjsr/linalg.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "bbjsr/errors.h"

namespace bbjsr {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("symmetric matrix must be square");
  m_ = m.triangularView<Eigen::Upper>();
  m_.triangularView<Eigen::StrictlyLower>() = m_.transpose();
}

SymMatrix SymMatrix::identity(std::size_t n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::from_svec(const Eigen::VectorXd& v, std::size_t n) {
  if (static_cast<std::size_t>(v.size()) != sym_dim(n)) {
    throw DimensionError("svec length does not match n(n+1)/2");
  }
  Eigen::MatrixXd m(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = v[k++];
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = v[k++] / std::numbers::sqrt2;
    }
  }
  SymMatrix s;
  s.m_ = std::move(m);
  return s;
}

Eigen::VectorXd SymMatrix::svec() const {
  const std::size_t dim = n();
  Eigen::VectorXd v(sym_dim(dim));
  std::size_t k = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    v[k++] = m_(i, i);
    for (std::size_t j = i + 1; j < dim; ++j) {
      v[k++] = std::numbers::sqrt2 * m_(i, j);
    }
  }
  return v;
}

Eigen::VectorXd svec_outer(const Eigen::VectorXd& u) {
  const auto n = static_cast<std::size_t>(u.size());
  Eigen::VectorXd v(sym_dim(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v[k++] = u[i] * u[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      v[k++] = std::numbers::sqrt2 * u[i] * u[j];
    }
  }
  return v;
}

SymEigen sym_eigen(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.matrix());
  return {es.eigenvalues(), es.eigenvectors()};
}

double lambda_min(const SymMatrix& s) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
             s.matrix(), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double lambda_max(const SymMatrix& s) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
             s.matrix(), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

Eigen::MatrixXd cholesky(const SymMatrix& p) {
  Eigen::LLT<Eigen::MatrixXd> llt(p.matrix());
  if (llt.info() != Eigen::Success || lambda_min(p) <= 0.0) {
    throw NotPositiveDefinite("matrix is not positive definite");
  }
  return llt.matrixU();
}

double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("spectral radius of non-square matrix");
  if (a.rows() == 0) return 0.0;
  if (a.rows() == 1) return std::fabs(a(0, 0));
  if (a.rows() == 2) {
    // Roots of z^2 - tr z + det.
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) return std::sqrt(std::max(det, 0.0));
    const double root = std::sqrt(disc);
    // Stable pair: the large root directly, the small one via det / large.
    const double big = 0.5 * (tr + std::copysign(root, tr));
    return std::fabs(big);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue iteration did not converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const SymMatrix gram(a.transpose() * a);
  return std::sqrt(std::max(lambda_max(gram), 0.0));
}

}  // namespace bbjsr
