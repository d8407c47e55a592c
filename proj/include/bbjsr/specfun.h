#pragma once

#include <cstddef>

namespace bbjsr {

/// Shape parameters of a beta distribution. Both must be positive.
struct BetaParams {
  double a;
  double b;
};

/// log B(a, b), accurate for large arguments (Stirling correction terms
/// instead of differencing three lgamma values).
double log_beta(double a, double b);

/// Incomplete beta B(x; a, b) = int_0^x t^(a-1) (1-t)^(b-1) dt.
double inc_beta(double x, BetaParams p);

/// Regularized incomplete beta I(x; a, b) = B(x; a, b) / B(1; a, b).
/// Continued fraction (modified Lentz) with the usual symmetry swap above
/// x = (a+1)/(a+b+2).
double reg_inc_beta(double x, BetaParams p);

/// x in [0, 1] with I(x; a, b) = y. Newton steps safeguarded by a bisection
/// bracket; I(0) = 0 and I(1) = 1 map back exactly.
double inv_reg_inc_beta(double y, BetaParams p);

/// Density t^(a-1)(1-t)^(b-1) / B(a, b).
double beta_pdf(double x, BetaParams p);

/// 1 - sum_{j=0}^{d} C(N, j) eps^j (1-eps)^(N-j): the probability that a
/// Bin(N, eps) variable exceeds d. Terms are summed in the log domain.
/// Requires N >= d + 1.
double scenario_confidence(double eps, std::size_t n_samples, std::size_t d);

}  // namespace bbjsr
