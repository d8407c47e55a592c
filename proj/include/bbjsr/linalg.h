#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace bbjsr {

/// Real symmetric n x n matrix. Built from the upper triangle of its input,
/// so symmetry holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(std::size_t n);
  /// Inverse of svec().
  static SymMatrix from_svec(const Eigen::VectorXd& v, std::size_t n);

  std::size_t n() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// Upper-triangle vectorization with off-diagonal entries scaled by
  /// sqrt(2), so svec(A).dot(svec(B)) == trace(A B).
  Eigen::VectorXd svec() const;

 private:
  Eigen::MatrixXd m_;
};

/// n (n + 1) / 2.
constexpr std::size_t sym_dim(std::size_t n) { return n * (n + 1) / 2; }

/// svec of the rank-one matrix u u^T.
Eigen::VectorXd svec_outer(const Eigen::VectorXd& u);

struct SymEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

SymEigen sym_eigen(const SymMatrix& s);

double lambda_min(const SymMatrix& s);
double lambda_max(const SymMatrix& s);

/// Upper-triangular L with P = L^T L. Throws NotPositiveDefinite.
Eigen::MatrixXd cholesky(const SymMatrix& p);

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::MatrixXd& a);

/// Largest singular value, from the eigenvalues of A^T A.
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace bbjsr
