#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bbjsr/linalg.h"
#include "bbjsr/lmisolve.h"
#include "bbjsr/sysmodel.h"

namespace bbjsr {

struct BoundsConfig {
  /// Confidence level, 0 <= beta < 1.
  double beta = 0.95;
  /// Expected trace length; checked against the sample when set.
  std::optional<std::size_t> l;
  /// Regularization: Opt(omega_N) uses the level (1 + eta) gamma*.
  double eta = 0.0;
  /// Bisection tolerance on gamma.
  double alpha = 1e-3;
  /// Upper end of the gamma bracket. Defaults to the largest observed
  /// growth max_i (||x_{i,l}|| / ||x_{i,0}||)^(1/l).
  std::optional<double> bracket_hint;
  /// Upper bound on the number of modes.
  std::optional<std::size_t> m_claimed;
  /// Lower bound on every mode's probability (non-uniform switching).
  std::optional<double> min_mode_prob;
  SolverOptions solver;
};

struct BoundsReport {
  double gamma_star = 0.0;  // feasible end of the final bisection bracket
  double gamma_lo = 0.0;    // other end, within alpha of gamma_star
  double level = 0.0;       // contraction level used in Opt(omega_N)
  SymMatrix p;
  double kappa = 1.0;
  double epsilon = 0.0;
  double eps_sphere = 0.0;
  double delta = 0.0;
  double violation_alt = 1.0;
  double delta_alt = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double upper_alt = 0.0;
  double upper_best = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  std::size_t n_traces = 0;
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t m = 0;  // 0 when only min_mode_prob was given
  std::size_t d = 0;
  std::optional<double> min_mode_prob;
  std::size_t solver_undecided = 0;  // bisection steps that hit the cap
  bool opt_retried = false;
  bool unbounded = false;

  /// "stable" if upper_best < 1, "unstable" if lower > 1, else
  /// "inconclusive".
  std::string verdict() const;
  std::string status() const;
};

/// {C_{c,k} = {x on the unit sphere : c^T x > k}}.
struct CapSpec {
  Eigen::VectorXd c;
  double k = 0.0;
};

struct GammaStarResult {
  double gamma = 0.0;     // Feasible
  double gamma_lo = 0.0;  // Infeasible or Undecided (or 0)
  SymMatrix witness;
  std::size_t undecided = 0;
  std::size_t solver_calls = 0;
};

struct OptResult {
  SymMatrix p;
  double level = 0.0;
  bool retried = false;
};

/// One constraint per trace: x_l^T P x_l <= level^(2l) x_0^T P x_0.
std::vector<QuadConstraint> sample_constraints(const SampleSet& sample,
                                               double level);

/// Smallest gamma (to within alpha) for which some P >= I satisfies every
/// sampled contraction constraint, by bisection on [0, U].
GammaStarResult gamma_star(const SampleSet& sample, const BoundsConfig& cfg);

/// min lambda_max(P) s.t. the sampled constraints at ((1 + eta) gamma*)
/// and P >= I. One retry at level * (1 + alpha) if that is infeasible.
OptResult solve_opt(const SampleSet& sample, double gamma_star,
                    const BoundsConfig& cfg);

/// Violation level eps with scenario_confidence(eps, N, d) = beta,
/// i.e. eps = I^{-1}(beta; d + 1, N - d).
double epsilon_of_beta(double beta, std::size_t n_samples, std::size_t d);

/// eps * m^l under uniform switching, eps / p_min^l when a lower bound on
/// the mode probabilities is given; capped at 1.
double violation_on_sphere(double eps, std::size_t m, std::size_t l,
                           std::optional<double> min_mode_prob = std::nullopt);

/// sqrt(det P / lambda_min(P)^n).
double kappa(const SymMatrix& p);

/// 1 - (1 - eps_sphere) sqrt(det P / lambda_max(P)^n), clamped to [0, 1].
double kappa_alt_violation(double eps_sphere, const SymMatrix& p);

/// Radius of the largest origin-centred ball inside the hull of the sphere
/// minus a cap of measure `half_measure`:
/// sqrt(1 - I^{-1}(2 x; (n - 1)/2, 1/2)), and 0 once 2 x >= 1.
double delta_shrink(double half_measure, std::size_t n);

/// min(1, |k| / ||c||).
double cap_shrink(const CapSpec& cap);

/// Measure of a cap at distance delta_cap from the origin:
/// I(1 - delta_cap^2; (n - 1)/2, 1/2) / 2.
double cap_measure(std::size_t n, double delta_cap);

/// Measure of C_{c,k} including caps larger than a hemisphere (k < 0).
double cap_measure(const CapSpec& cap);

/// Full pipeline: gamma*, Opt(omega_N), eps, kappa, delta and the bounds.
/// Reads only x0 and the final state of each trace.
BoundsReport analyze(const SampleSet& sample, const BoundsConfig& cfg);

}  // namespace bbjsr
