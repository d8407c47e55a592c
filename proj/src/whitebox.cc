#include "bbjsr/whitebox.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bbjsr/errors.h"
#include "bbjsr/linalg.h"

namespace bbjsr {
namespace {

// m^k, or budget + 1 once it passes the budget.
std::size_t product_count(std::size_t m, std::size_t k) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (total > kProductBudget / std::max<std::size_t>(m, 1)) {
      return kProductBudget + 1;
    }
    total *= m;
  }
  return total;
}

std::vector<Eigen::MatrixXd> products_of_length(const SwitchedSystem& sys,
                                                std::size_t l) {
  std::vector<Eigen::MatrixXd> level{
      Eigen::MatrixXd::Identity(sys.n(), sys.n())};
  for (std::size_t k = 0; k < l; ++k) {
    std::vector<Eigen::MatrixXd> next;
    next.reserve(level.size() * sys.m());
    for (const auto& prod : level) {
      for (const auto& a : sys.modes()) next.push_back(a * prod);
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace

JsrBracket jsr_bruteforce(const SwitchedSystem& sys, std::size_t depth) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  if (product_count(sys.m(), depth) > kProductBudget) {
    throw BudgetExceeded("m^depth = " + std::to_string(sys.m()) + "^" +
                         std::to_string(depth) + " exceeds the budget of " +
                         std::to_string(kProductBudget) + " products");
  }
  JsrBracket out;
  out.depth = depth;
  out.lower_method = "bruteforce-spectral-radius";
  out.upper_method = "bruteforce-norm";
  out.upper = std::numeric_limits<double>::infinity();

  std::vector<Eigen::MatrixXd> level{
      Eigen::MatrixXd::Identity(sys.n(), sys.n())};
  for (std::size_t k = 1; k <= depth; ++k) {
    const double inv_k = 1.0 / static_cast<double>(k);
    std::vector<Eigen::MatrixXd> next;
    next.reserve(level.size() * sys.m());
    double max_norm = 0.0;
    for (const auto& prod : level) {
      for (const auto& a : sys.modes()) {
        Eigen::MatrixXd p = a * prod;
        out.lower = std::max(out.lower, std::pow(spectral_radius(p), inv_k));
        max_norm = std::max(max_norm, std::pow(spectral_norm(p), inv_k));
        next.push_back(std::move(p));
      }
    }
    out.upper = std::min(out.upper, max_norm);
    level = std::move(next);
  }
  return out;
}

double jsr_cqf_upper(const SwitchedSystem& sys, std::size_t l, double alpha,
                     const SolverOptions& options) {
  if (l == 0) throw ValidationError("product length must be >= 1");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  if (product_count(sys.m(), l) > kProductBudget) {
    throw BudgetExceeded("m^l exceeds the product budget");
  }
  const auto products = products_of_length(sys, l);
  const double inv_l = 1.0 / static_cast<double>(l);

  // P = I certifies max ||Pi||^(1/l), so that end is feasible.
  double hi = 0.0;
  for (const auto& p : products) {
    hi = std::max(hi, std::pow(spectral_norm(p), inv_l));
  }
  double lo = 0.0;
  std::vector<LmiConstraint> lmis(products.size());
  for (std::size_t i = 0; i < products.size(); ++i) lmis[i].a = products[i];
  while (hi - lo > alpha) {
    const double mid = 0.5 * (lo + hi);
    const double c = std::pow(mid, 2.0 * static_cast<double>(l));
    for (auto& q : lmis) q.c = c;
    if (feasibility(sys.n(), {}, lmis, std::nullopt, options).feasible()) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

RhoBracket true_rho_for_validation(const SwitchedSystem& sys,
                                   std::size_t depth, std::size_t l,
                                   double alpha) {
  const JsrBracket bf = jsr_bruteforce(sys, depth);
  RhoBracket out;
  out.rho_lo = bf.lower;
  out.bf_upper = bf.upper;
  out.cqf_upper = jsr_cqf_upper(sys, l, alpha);
  out.rho_hi = std::min(out.bf_upper, out.cqf_upper);
  return out;
}

SwitchedSystem random_system_with_bound(std::size_t n, std::size_t m,
                                        double target, std::size_t depth,
                                        Rng& rng) {
  if (!(target > 0.0)) throw ValidationError("target must be positive");
  for (;;) {
    SwitchedSystem sys = random_gaussian_system(n, m, rng);
    const double up = jsr_bruteforce(sys, depth).upper;
    if (up > 0.0 && std::isfinite(up)) return sys.scaled(target / up);
  }
}

}  // namespace bbjsr
