#include "bbjsr/lmisolve.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bbjsr/errors.h"

namespace bbjsr {
namespace {

void check_dimensions(std::size_t n, std::span<const QuadConstraint> quad,
                      std::span<const LmiConstraint> lmi) {
  if (n == 0) throw DimensionError("solver dimension must be >= 1");
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const auto& q = quad[i];
    if (static_cast<std::size_t>(q.u.size()) != n ||
        static_cast<std::size_t>(q.v.size()) != n) {
      throw DimensionError("quadratic constraint " + std::to_string(i) +
                           " has vectors of the wrong dimension");
    }
    if (!(q.c >= 0.0) || !std::isfinite(q.c)) {
      throw DomainError("quadratic constraint " + std::to_string(i) +
                        " needs a finite level c >= 0");
    }
  }
  for (std::size_t i = 0; i < lmi.size(); ++i) {
    const auto& q = lmi[i];
    if (static_cast<std::size_t>(q.a.rows()) != n ||
        static_cast<std::size_t>(q.a.cols()) != n) {
      throw DimensionError("LMI constraint " + std::to_string(i) +
                           " has a matrix of the wrong dimension");
    }
    if (!(q.c >= 0.0) || !std::isfinite(q.c)) {
      throw DomainError("LMI constraint " + std::to_string(i) +
                        " needs a finite level c >= 0");
    }
  }
}

// A linear cut g^T p <= rhs in svec coordinates.
struct Cut {
  Eigen::VectorXd g;
  double rhs = 0.0;
};

// Ellipsoid {center + J z : ||z|| <= 1} in R^d, with log det J tracked
// through the update factors rather than recomputed.
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, double radius)
      : center_(std::move(center)),
        shape_(Eigen::MatrixXd::Identity(center_.size(), center_.size()) *
               radius),
        log_det_(static_cast<double>(center_.size()) * std::log(radius)) {}

  const Eigen::VectorXd& center() const { return center_; }
  double log_det() const { return log_det_; }

  // Returns false when the halfspace misses the ellipsoid.
  bool cut(const Cut& c) {
    const auto d = static_cast<double>(center_.size());
    const Eigen::VectorXd h = shape_.transpose() * c.g;
    const double hn = h.norm();
    if (!(hn > 0.0)) return true;
    const double a = (c.g.dot(center_) - c.rhs) / hn;
    if (a >= 1.0) return false;
    if (center_.size() == 1) {
      // Interval [p - r, p + r] intersected with the halfspace.
      const double p = center_[0];
      const double r = std::fabs(shape_(0, 0));
      double lo = p - r;
      double hi = p + r;
      const double bound = c.rhs / c.g[0];
      if (c.g[0] > 0.0) {
        hi = std::min(hi, bound);
      } else {
        lo = std::max(lo, bound);
      }
      center_[0] = 0.5 * (lo + hi);
      shape_(0, 0) = 0.5 * (hi - lo);
      log_det_ = std::log(std::max(shape_(0, 0), 1e-300));
      return true;
    }
    const Eigen::VectorXd hhat = h / hn;
    const double tau = (1.0 + d * a) / (d + 1.0);
    const double sigma = 2.0 * (1.0 + d * a) / ((d + 1.0) * (1.0 + a));
    const double delta = d * d * (1.0 - a * a) / (d * d - 1.0);
    const Eigen::VectorXd jh = shape_ * hhat;
    center_ -= tau * jh;
    const double shrink = 1.0 - std::sqrt(1.0 - sigma);
    shape_ = std::sqrt(delta) * (shape_ - shrink * jh * hhat.transpose());
    log_det_ += 0.5 * d * std::log(delta) + 0.5 * std::log1p(-sigma);
    return true;
  }

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  double log_det_;
};

struct LmiGap {
  double relative = 0.0;  // (mu - c) / (mu + c)
  Eigen::VectorXd w;      // mu = w^T A^T P A w with w^T P w = 1
};

// mu = lambda_max(U^-T A^T P A U^-1) for P = U^T U is the smallest level at
// which A^T P A <= mu P holds.
LmiGap lmi_gap(const LmiConstraint& q, const SymMatrix& p,
               const Eigen::MatrixXd& u) {
  const Eigen::MatrixXd image = q.a.transpose() * p.matrix() * q.a;
  const auto tri = u.triangularView<Eigen::Upper>();
  const Eigen::MatrixXd left = tri.transpose().solve(image);
  const Eigen::MatrixXd both =
      tri.transpose().solve(left.transpose()).transpose();
  const SymEigen eig = sym_eigen(SymMatrix(both));
  const Eigen::Index top = eig.values.size() - 1;
  const double mu = std::max(eig.values[top], 0.0);
  LmiGap g;
  g.relative = (mu + q.c) > 0.0 ? (mu - q.c) / (mu + q.c) : 0.0;
  g.w = tri.solve(eig.vectors.col(top));
  return g;
}

bool identity_satisfies(std::span<const QuadConstraint> quad,
                        std::span<const LmiConstraint> lmi, std::size_t n,
                        const SolverOptions& options) {
  const SymMatrix eye = SymMatrix::identity(n);
  for (const auto& q : quad) {
    if (relative_violation(q, eye) > options.tol_feas) return false;
  }
  for (const auto& q : lmi) {
    if (relative_violation(q, eye) > options.tol_feas) return false;
  }
  return true;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUndecided:
      return "undecided";
  }
  return "unknown";
}

double relative_violation(const QuadConstraint& q, const SymMatrix& p) {
  const double lhs = q.u.dot(p.matrix() * q.u);
  const double rhs = q.c * q.v.dot(p.matrix() * q.v);
  const double scale = std::fabs(lhs) + std::fabs(rhs);
  if (scale == 0.0) return 0.0;
  return (lhs - rhs) / scale;
}

double relative_violation(const LmiConstraint& q, const SymMatrix& p) {
  return lmi_gap(q, p, cholesky(p)).relative;
}

SolveOutcome feasibility(std::size_t n, std::span<const QuadConstraint> quad,
                         std::span<const LmiConstraint> lmi,
                         std::optional<double> upper_box,
                         const SolverOptions& options) {
  check_dimensions(n, quad, lmi);
  const double t = upper_box.value_or(options.t_max);
  SolveOutcome out;
  if (!(t >= 1.0 - options.tol_psd)) {
    out.status = SolveStatus::kInfeasible;
    return out;
  }
  const std::size_t d = sym_dim(n);

  // Rows of `grad` are svec(u u^T - c v v^T); rows of `scale` are
  // svec(u u^T + c v v^T), giving the relative-violation denominator.
  Eigen::MatrixXd grad(quad.size(), d);
  Eigen::MatrixXd scale(quad.size(), d);
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const Eigen::VectorXd su = svec_outer(quad[i].u);
    const Eigen::VectorXd sv = svec_outer(quad[i].v);
    grad.row(i) = (su - quad[i].c * sv).transpose();
    scale.row(i) = (su + quad[i].c * sv).transpose();
  }

  // The ball around ((1 + t) / 2) I through the corners of {I <= P <= tI}.
  const double mid = 0.5 * (1.0 + t);
  const double radius =
      std::max(0.5 * (t - 1.0) * std::sqrt(static_cast<double>(n)) *
                   (1.0 + 1e-9),
               10.0 * options.collapse_radius);
  Ellipsoid ell(SymMatrix::identity(n).svec() * mid, radius);
  const double collapse_log_det =
      static_cast<double>(d) * std::log(options.collapse_radius);
  const std::size_t max_iter = std::max<std::size_t>(
      options.iteration_factor * d * d, 50);

  for (std::size_t it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    const SymMatrix p = SymMatrix::from_svec(ell.center(), n);
    const SymEigen eig = sym_eigen(p);
    const double lmin = eig.values[0];
    const double lmax = eig.values[static_cast<Eigen::Index>(n) - 1];

    std::optional<Cut> cut;
    if (lmin < 1.0 - options.tol_psd) {
      cut = Cut{-svec_outer(eig.vectors.col(0)), -1.0};
    } else if (lmax > t * (1.0 + options.tol_psd)) {
      cut = Cut{svec_outer(eig.vectors.col(static_cast<Eigen::Index>(n) - 1)),
                t};
    }

    if (!cut && quad.size() > 0) {
      const Eigen::VectorXd lhs = grad * ell.center();
      const Eigen::VectorXd den = scale * ell.center();
      double worst = options.tol_feas;
      std::optional<Eigen::Index> worst_i;
      for (Eigen::Index i = 0; i < lhs.size(); ++i) {
        if (den[i] <= 0.0) continue;
        const double rel = lhs[i] / den[i];
        if (rel > worst) {
          worst = rel;
          worst_i = i;
        }
      }
      if (worst_i) cut = Cut{grad.row(*worst_i).transpose(), 0.0};
    }

    if (!cut && !lmi.empty()) {
      const Eigen::MatrixXd u = cholesky(p);
      double worst = options.tol_feas;
      for (const auto& q : lmi) {
        LmiGap g = lmi_gap(q, p, u);
        if (g.relative > worst) {
          worst = g.relative;
          cut = Cut{svec_outer(q.a * g.w) - q.c * svec_outer(g.w), 0.0};
        }
      }
    }

    if (!cut) {
      out.status = SolveStatus::kFeasible;
      out.objective = lmax;
      out.witness = p;
      return out;
    }
    if (!ell.cut(*cut) || ell.log_det() < collapse_log_det) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
  }
  out.status = SolveStatus::kUndecided;
  return out;
}

SolveOutcome min_lambda_max(std::size_t n, std::span<const QuadConstraint> quad,
                            std::span<const LmiConstraint> lmi,
                            const SolverOptions& options) {
  check_dimensions(n, quad, lmi);
  if (identity_satisfies(quad, lmi, n, options)) {
    SolveOutcome out;
    out.status = SolveStatus::kFeasible;
    out.witness = SymMatrix::identity(n);
    out.objective = 1.0;
    out.iterations = 0;
    return out;
  }
  SolveOutcome first = feasibility(n, quad, lmi, std::nullopt, options);
  if (!first.feasible()) return first;
  std::size_t iterations = first.iterations;

  // Constraints other than P >= I are homogeneous in P, so dividing by
  // lambda_min keeps feasibility and brings lambda_min to 1.
  SymMatrix best(first.witness->matrix() /
                 std::max(lambda_min(*first.witness), 1.0));
  double lo = 1.0;
  double hi = lambda_max(best);
  while (hi - lo > options.tol_obj) {
    const double t = 0.5 * (lo + hi);
    const SolveOutcome r = feasibility(n, quad, lmi, t, options);
    iterations += r.iterations;
    if (r.feasible()) {
      best = *r.witness;
      hi = std::min(t, lambda_max(best));
    } else {
      lo = t;
    }
  }
  SolveOutcome out;
  out.status = SolveStatus::kFeasible;
  out.objective = lambda_max(best);
  out.witness = std::move(best);
  out.iterations = iterations;
  return out;
}

}  // namespace bbjsr
