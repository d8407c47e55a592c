#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "bbjsr/linalg.h"

namespace bbjsr {

/// u^T P u <= c * v^T P v, i.e. <u u^T - c v v^T, P> <= 0. Built from an
/// observed pair (v, u) = (x_0, x_l) with c = gamma^(2l).
struct QuadConstraint {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double c = 0.0;
};

/// A^T P A <= c * P in the semidefinite order.
struct LmiConstraint {
  Eigen::MatrixXd a;
  double c = 0.0;
};

enum class SolveStatus { kFeasible, kInfeasible, kUndecided };

const char* to_string(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kUndecided;
  std::optional<SymMatrix> witness;
  std::optional<double> objective;  // lambda_max(witness)
  std::size_t iterations = 0;

  bool feasible() const { return status == SolveStatus::kFeasible; }
};

struct SolverOptions {
  /// Accepted relative violation of a quadratic or LMI constraint (see
  /// relative_violation).
  double tol_feas = 1e-7;
  /// Accepted shortfall in P >= I (and excess over P <= t I).
  double tol_psd = 1e-8;
  /// Absolute bracket width on lambda_max in min_lambda_max.
  double tol_obj = 1e-4;
  /// Infeasible once the ellipsoid volume drops below a ball of this radius.
  double collapse_radius = 1e-9;
  /// Box P <= t_max I imposed when the caller gives none.
  double t_max = 1e6;
  /// Iteration cap is iteration_factor * d^2, d = n(n+1)/2.
  std::size_t iteration_factor = 200;
};

/// Search for P with I <= P <= t I satisfying every constraint.
///
/// Square-root form ellipsoid method over svec(P) in R^d, d = n(n+1)/2.
/// Each iteration checks the current center; the first violated family
/// (P >= I, P <= t I, quadratic, LMI) supplies a deep cut, chosen as the
/// most violated member: its own gradient for quadratic constraints, the
/// extreme (generalized) eigenvector scalarization w^T(.)w for the matrix
/// inequalities.
/// The center is accepted as soon as every constraint holds to the
/// tolerances in `options`. Infeasible is reported when a cut misses the
/// ellipsoid entirely or the ellipsoid volume falls below that of a ball of
/// radius collapse_radius; Undecided when the iteration cap is hit.
SolveOutcome feasibility(std::size_t n, std::span<const QuadConstraint> quad,
                         std::span<const LmiConstraint> lmi,
                         std::optional<double> upper_box = std::nullopt,
                         const SolverOptions& options = {});

/// min lambda_max(P) over {P >= I} intersected with the constraints, by
/// bisection on the box P <= t I.
SolveOutcome min_lambda_max(std::size_t n, std::span<const QuadConstraint> quad,
                            std::span<const LmiConstraint> lmi,
                            const SolverOptions& options = {});

/// Relative violation of one quadratic constraint at P (<= 0 when met):
/// (u^T P u - c v^T P v) / (u^T P u + c v^T P v).
double relative_violation(const QuadConstraint& q, const SymMatrix& p);

/// Relative violation of an LMI at P > 0: (mu - c) / (mu + c) where mu is
/// the largest generalized eigenvalue of (A^T P A, P).
double relative_violation(const LmiConstraint& q, const SymMatrix& p);

}  // namespace bbjsr
