#include "bbjsr/scenario.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bbjsr/errors.h"
#include "bbjsr/specfun.h"

namespace bbjsr {
namespace {

constexpr double kBracketFloor = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const BoundsConfig& cfg) {
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) {
    throw ValidationError("beta must lie in [0, 1)");
  }
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) {
    throw ValidationError("alpha must be positive");
  }
  if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta)) {
    throw ValidationError("eta must be >= 0");
  }
  if (cfg.bracket_hint && !(*cfg.bracket_hint > 0.0)) {
    throw ValidationError("bracket hint must be positive");
  }
}

double observed_growth(const SampleSet& sample) {
  double u = 0.0;
  const double inv_l = 1.0 / static_cast<double>(sample.l);
  for (const auto& t : sample.traces) {
    const double ratio = t.last().norm() / t.x0.norm();
    u = std::max(u, std::pow(ratio, inv_l));
  }
  return std::max(u, kBracketFloor);
}

// Turns the shrinkage radius into a growth bound; +inf when delta = 0.
double inflate(double level, double delta, std::size_t l) {
  if (!(delta > 0.0)) return kInf;
  return level / std::pow(delta, 1.0 / static_cast<double>(l));
}

double shrink_for(double half_measure, std::size_t n) {
  if (n >= 2) return delta_shrink(half_measure, n);
  // On S^0 = {-1, 1} the symmetric violating set is empty or everything.
  return 2.0 * half_measure < 1.0 ? 1.0 : 0.0;
}

}  // namespace

std::string BoundsReport::verdict() const {
  if (std::isfinite(upper_best) && upper_best < 1.0) return "stable";
  if (lower > 1.0) return "unstable";
  return "inconclusive";
}

std::string BoundsReport::status() const {
  if (unbounded) return "unbounded";
  if (solver_undecided > 0) return "undecided";
  return "ok";
}

std::vector<QuadConstraint> sample_constraints(const SampleSet& sample,
                                               double level) {
  const double c = std::pow(level, 2.0 * static_cast<double>(sample.l));
  std::vector<QuadConstraint> out;
  out.reserve(sample.size());
  for (const auto& t : sample.traces) {
    out.push_back(QuadConstraint{t.last(), t.x0, c});
  }
  return out;
}

GammaStarResult gamma_star(const SampleSet& sample, const BoundsConfig& cfg) {
  check_config(cfg);
  if (sample.size() == 0) throw ValidationError("empty sample");
  const std::size_t n = sample.n;

  GammaStarResult res;
  auto test = [&](double gamma) {
    ++res.solver_calls;
    const auto quad = sample_constraints(sample, gamma);
    return feasibility(n, quad, {}, std::nullopt, cfg.solver);
  };

  // P = I meets every constraint at the observed growth, so the default
  // bracket end is always feasible; a hint is checked before use.
  const double u_default = observed_growth(sample);
  double hi = u_default;
  SymMatrix witness = SymMatrix::identity(n);
  if (cfg.bracket_hint) {
    const SolveOutcome r = test(*cfg.bracket_hint);
    if (r.feasible()) {
      hi = *cfg.bracket_hint;
      witness = *r.witness;
    } else if (r.status == SolveStatus::kUndecided) {
      ++res.undecided;
    }
  }
  double lo = 0.0;
  while (hi - lo > cfg.alpha) {
    const double mid = 0.5 * (lo + hi);
    const SolveOutcome r = test(mid);
    if (r.feasible()) {
      hi = mid;
      witness = *r.witness;
    } else {
      if (r.status == SolveStatus::kUndecided) ++res.undecided;
      lo = mid;
    }
  }
  res.gamma = hi;
  res.gamma_lo = lo;
  res.witness = std::move(witness);
  return res;
}

OptResult solve_opt(const SampleSet& sample, double gamma_star,
                    const BoundsConfig& cfg) {
  check_config(cfg);
  if (sample.size() == 0) throw ValidationError("empty sample");
  if (!(gamma_star >= 0.0)) throw DomainError("gamma* must be >= 0");
  OptResult out;
  out.level = (1.0 + cfg.eta) * gamma_star;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto quad = sample_constraints(sample, out.level);
    const SolveOutcome r = min_lambda_max(sample.n, quad, {}, cfg.solver);
    if (r.feasible()) {
      out.p = *r.witness;
      return out;
    }
    out.level *= 1.0 + cfg.alpha;
    out.retried = true;
  }
  throw std::runtime_error(
      "Opt(omega_N) infeasible at the bisection level even after one retry");
}

double epsilon_of_beta(double beta, std::size_t n_samples, std::size_t d) {
  if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("beta must lie in [0, 1)");
  if (n_samples < d + 1) throw SampleTooSmall(n_samples, d + 1);
  if (beta == 0.0) return 0.0;
  const double a = static_cast<double>(d) + 1.0;
  const double b = static_cast<double>(n_samples - d);
  return std::clamp(inv_reg_inc_beta(beta, {a, b}), 0.0, 1.0);
}

double violation_on_sphere(double eps, std::size_t m, std::size_t l,
                           std::optional<double> min_mode_prob) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("eps must lie in [0, 1]");
  const double el = static_cast<double>(l);
  double v;
  if (min_mode_prob) {
    const double p = *min_mode_prob;
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("min mode probability must lie in (0, 1]");
    }
    v = eps * std::exp(-el * std::log(p));
  } else {
    if (m == 0) throw DomainError("mode count must be >= 1");
    v = eps * std::exp(el * std::log(static_cast<double>(m)));
  }
  return std::min(v, 1.0);
}

double kappa(const SymMatrix& p) {
  const SymEigen eig = sym_eigen(p);
  const double lmin = eig.values.minCoeff();
  if (!(lmin > 0.0)) throw NotPositiveDefinite("kappa needs P > 0");
  double log_ratio = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    log_ratio += std::log(eig.values[i] / lmin);
  }
  return std::max(1.0, std::exp(0.5 * log_ratio));
}

double kappa_alt_violation(double eps_sphere, const SymMatrix& p) {
  if (!(eps_sphere >= 0.0 && eps_sphere <= 1.0)) {
    throw DomainError("eps_sphere must lie in [0, 1]");
  }
  const SymEigen eig = sym_eigen(p);
  if (!(eig.values.minCoeff() > 0.0)) {
    throw NotPositiveDefinite("alternative bound needs P > 0");
  }
  const double lmax = eig.values.maxCoeff();
  double log_ratio = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    log_ratio += std::log(eig.values[i] / lmax);
  }
  const double v = 1.0 - (1.0 - eps_sphere) * std::exp(0.5 * log_ratio);
  return std::clamp(v, 0.0, 1.0);
}

double delta_shrink(double half_measure, std::size_t n) {
  if (n < 2) throw DomainError("delta_shrink needs n >= 2");
  if (!(half_measure >= 0.0)) throw DomainError("measure must be >= 0");
  if (2.0 * half_measure >= 1.0) return 0.0;
  const double a = 0.5 * (static_cast<double>(n) - 1.0);
  const double y = inv_reg_inc_beta(2.0 * half_measure, {a, 0.5});
  return std::sqrt(std::clamp(1.0 - y, 0.0, 1.0));
}

double cap_shrink(const CapSpec& cap) {
  const double cn = cap.c.norm();
  if (!(cn > 0.0)) throw DomainError("cap normal must be nonzero");
  return std::min(1.0, std::fabs(cap.k) / cn);
}

double cap_measure(std::size_t n, double delta_cap) {
  if (n < 2) throw DomainError("cap_measure needs n >= 2");
  if (!(delta_cap >= 0.0 && delta_cap <= 1.0)) {
    throw DomainError("cap distance must lie in [0, 1]");
  }
  const double a = 0.5 * (static_cast<double>(n) - 1.0);
  return 0.5 * reg_inc_beta(1.0 - delta_cap * delta_cap, {a, 0.5});
}

double cap_measure(const CapSpec& cap) {
  const double small = cap_measure(static_cast<std::size_t>(cap.c.size()),
                                   cap_shrink(cap));
  return cap.k >= 0.0 ? small : 1.0 - small;
}

BoundsReport analyze(const SampleSet& sample, const BoundsConfig& cfg) {
  check_config(cfg);
  if (cfg.l && *cfg.l != sample.l) {
    throw ValidationError("trace length " + std::to_string(sample.l) +
                          " does not match l = " + std::to_string(*cfg.l));
  }
  validate_sample(sample);
  const std::size_t n = sample.n;
  const std::size_t d = sym_dim(n);
  if (sample.size() < d + 1) throw SampleTooSmall(sample.size(), d + 1);

  std::optional<std::size_t> m = cfg.m_claimed;
  std::optional<double> p_min = cfg.min_mode_prob;
  if (!m && !p_min) {
    m = sample.claimed_m;
    p_min = sample.claimed_min_prob;
  }
  if (!m && !p_min) {
    throw ValidationError(
        "a bound on the number of modes (m) or a minimum mode probability "
        "is required");
  }

  BoundsReport rep;
  rep.beta = cfg.beta;
  rep.eta = cfg.eta;
  rep.alpha = cfg.alpha;
  rep.n_traces = sample.size();
  rep.n = n;
  rep.l = sample.l;
  rep.m = m.value_or(0);
  rep.d = d;
  rep.min_mode_prob = p_min;

  const GammaStarResult gs = gamma_star(sample, cfg);
  rep.gamma_star = gs.gamma;
  rep.gamma_lo = gs.gamma_lo;
  rep.solver_undecided = gs.undecided;

  const OptResult opt = solve_opt(sample, gs.gamma, cfg);
  rep.p = opt.p;
  rep.level = opt.level;
  rep.opt_retried = opt.retried;

  rep.epsilon = epsilon_of_beta(cfg.beta, sample.size(), d);
  rep.eps_sphere = violation_on_sphere(rep.epsilon, rep.m, sample.l, p_min);
  rep.kappa = kappa(rep.p);
  rep.delta = shrink_for(0.5 * rep.eps_sphere * rep.kappa, n);
  rep.violation_alt = kappa_alt_violation(rep.eps_sphere, rep.p);
  rep.delta_alt = shrink_for(0.5 * rep.violation_alt, n);

  // gamma_lo failed the feasibility test, so every gamma below it is
  // certified infeasible up to solver tolerance.
  rep.lower = gs.gamma_lo /
              std::pow(static_cast<double>(n),
                       1.0 / (2.0 * static_cast<double>(sample.l)));
  rep.upper = inflate(rep.level, rep.delta, sample.l);
  rep.upper_alt = inflate(rep.level, rep.delta_alt, sample.l);
  rep.upper_best = std::min(rep.upper, rep.upper_alt);
  rep.unbounded = !std::isfinite(rep.upper_best);
  return rep;
}

}  // namespace bbjsr
