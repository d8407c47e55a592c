#include "bbjsr/linalg.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bbjsr/errors.h"
#include "bbjsr/rng.h"
#include "oracles.h"

namespace bbjsr {
namespace {

Eigen::MatrixXd random_matrix(std::size_t n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return a;
}

TEST(SymMatrix, SvecRoundTripPreservesInnerProduct) {
  Rng rng(1);
  for (std::size_t n = 1; n <= 5; ++n) {
    const Eigen::MatrixXd a = random_matrix(n, rng);
    const Eigen::MatrixXd b = random_matrix(n, rng);
    const SymMatrix sa(a + a.transpose());
    const SymMatrix sb(b + b.transpose());
    EXPECT_EQ(static_cast<std::size_t>(sa.svec().size()), sym_dim(n));
    EXPECT_NEAR(sa.svec().dot(sb.svec()),
                (sa.matrix().cwiseProduct(sb.matrix())).sum(), 1e-10);
    EXPECT_TRUE(SymMatrix::from_svec(sa.svec(), n).matrix().isApprox(
        sa.matrix(), 1e-14));
  }
}

TEST(SymMatrix, SvecOuterIsSvecOfOuterProduct) {
  Eigen::Vector3d u(1.0, -2.0, 0.5);
  const SymMatrix uu(u * u.transpose());
  EXPECT_TRUE(svec_outer(u).isApprox(uu.svec(), 1e-14));
}

TEST(SymMatrix, UsesUpperTriangle) {
  Eigen::Matrix2d m;
  m << 1.0, 2.0, 99.0, 3.0;
  const SymMatrix s(m);
  EXPECT_EQ(s(1, 0), 2.0);
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd(2, 3)), DimensionError);
}

TEST(SymEigen, ReconstructsAndSorts) {
  Rng rng(2);
  for (std::size_t n = 1; n <= 6; ++n) {
    const Eigen::MatrixXd a = random_matrix(n, rng);
    const SymMatrix s(a + a.transpose());
    const SymEigen e = sym_eigen(s);
    const Eigen::MatrixXd rebuilt =
        e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_TRUE(rebuilt.isApprox(s.matrix(), 1e-10));
    for (Eigen::Index i = 1; i < e.values.size(); ++i) {
      EXPECT_LE(e.values[i - 1], e.values[i]);
    }
    EXPECT_NEAR(lambda_min(s), e.values.minCoeff(), 1e-12);
    EXPECT_NEAR(lambda_max(s), e.values.maxCoeff(), 1e-12);
  }
}

TEST(Cholesky, FactorsAndRejectsIndefinite) {
  Eigen::Matrix2d p;
  p << 4.0, 2.0, 2.0, 3.0;
  const Eigen::MatrixXd u = cholesky(SymMatrix(p));
  EXPECT_TRUE((u.transpose() * u).isApprox(p, 1e-14));
  Eigen::Matrix2d q;
  q << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(cholesky(SymMatrix(q)), NotPositiveDefinite);
}

TEST(SpectralRadius, MatchesCharacteristicPolynomial2x2) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Matrix2d a = random_matrix(2, rng);
    EXPECT_NEAR(spectral_radius(a), oracle::char_poly_radius_2x2(a), 1e-12);
  }
}

TEST(SpectralRadius, KnownCases) {
  Eigen::Matrix2d rot;
  const double t = 0.3;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  EXPECT_NEAR(spectral_radius(rot), 1.0, 1e-14);
  Eigen::Matrix3d nil = Eigen::Matrix3d::Zero();
  nil(0, 1) = 1.0;
  nil(1, 2) = 1.0;
  EXPECT_NEAR(spectral_radius(nil), 0.0, 1e-7);
  Eigen::Matrix3d d = Eigen::Vector3d(0.2, -0.9, 0.5).asDiagonal();
  EXPECT_NEAR(spectral_radius(d), 0.9, 1e-14);
}

TEST(SpectralRadius, SimilarityInvariant) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd a = random_matrix(4, rng);
    Eigen::MatrixXd t = random_matrix(4, rng);
    t += 4.0 * Eigen::MatrixXd::Identity(4, 4);
    EXPECT_NEAR(spectral_radius(t * a * t.inverse()), spectral_radius(a),
                1e-9 * (1.0 + spectral_radius(a)));
  }
}

TEST(SpectralNorm, MatchesSvd) {
  Rng rng(5);
  for (std::size_t n = 1; n <= 5; ++n) {
    const Eigen::MatrixXd a = random_matrix(n, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    EXPECT_NEAR(spectral_norm(a), svd.singularValues()(0), 1e-10);
    EXPECT_GE(spectral_norm(a) + 1e-12, spectral_radius(a));
  }
}

}  // namespace
}  // namespace bbjsr
