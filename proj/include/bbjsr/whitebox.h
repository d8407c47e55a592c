#pragma once

#include <cstddef>
#include <string>

#include "bbjsr/lmisolve.h"
#include "bbjsr/rng.h"
#include "bbjsr/sysmodel.h"

namespace bbjsr {

/// lower <= rho(M) <= upper, with the methods that produced each end.
struct JsrBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t depth = 0;
  std::string lower_method;
  std::string upper_method;
};

/// Products enumerated by jsr_bruteforce / constraints built by
/// jsr_cqf_upper may not exceed this count.
inline constexpr std::size_t kProductBudget = 1000000;

/// lower = max over products of length k <= depth of rho(Pi)^(1/k);
/// upper = min over k <= depth of max over products of ||Pi||^(1/k).
/// Products of length k are built by extending those of length k - 1.
JsrBracket jsr_bruteforce(const SwitchedSystem& sys, std::size_t depth = 8);

/// Smallest gamma (bisection to within alpha) for which there is P >= I
/// with Pi^T P Pi <= gamma^(2l) P for every product Pi of length l.
double jsr_cqf_upper(const SwitchedSystem& sys, std::size_t l = 1,
                     double alpha = 1e-3, const SolverOptions& options = {});

struct RhoBracket {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double bf_upper = 0.0;
  double cqf_upper = 0.0;

  /// Tight enough to serve as ground truth: rho_hi - rho_lo <= 0.02 rho_hi.
  bool usable() const { return rho_hi - rho_lo <= 0.02 * rho_hi; }
};

/// rho_lo from brute force, rho_hi = min(brute-force upper, CQF upper).
RhoBracket true_rho_for_validation(const SwitchedSystem& sys,
                                   std::size_t depth = 8, std::size_t l = 1,
                                   double alpha = 1e-3);

/// Random Gaussian system rescaled so its brute-force upper bound at
/// `depth` equals `target`.
SwitchedSystem random_system_with_bound(std::size_t n, std::size_t m,
                                        double target, std::size_t depth,
                                        Rng& rng);

}  // namespace bbjsr
