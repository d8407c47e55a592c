#include "bbjsr/specfun.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bbjsr/errors.h"

namespace bbjsr {
namespace {

constexpr double kLogSqrtTwoPi = 0.918938533204672741780329736406;
constexpr int kMaxContinuedFractionTerms = 20000;
constexpr int kMaxInverseIterations = 200;

void check_params(BetaParams p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) ||
      !std::isfinite(p.b)) {
    throw DomainError("beta parameters must be positive and finite (a = " +
                      std::to_string(p.a) + ", b = " + std::to_string(p.b) +
                      ")");
  }
}

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " +
                      std::to_string(x));
  }
}

// lgamma(x) - [(x - 1/2) log x - x + log sqrt(2 pi)], Stirling series.
// Only used for x >= 10, where seven terms reach double precision.
double lgamma_correction(double x) {
  const double z = 1.0 / (x * x);
  double s = -3617.0 / 122400.0;
  s = s * z + 1.0 / 156.0;
  s = s * z - 691.0 / 360360.0;
  s = s * z + 1.0 / 1188.0;
  s = s * z - 1.0 / 1680.0;
  s = s * z + 1.0 / 1260.0;
  s = s * z - 1.0 / 360.0;
  s = s * z + 1.0 / 12.0;
  return s / x;
}

// Modified Lentz evaluation of the continued fraction for I(x; a, b).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 2.0 * DBL_EPSILON;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxContinuedFractionTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  return h;
}

// x^a (1-x)^b / B(a, b) in the log domain.
double log_front(double x, double a, double b) {
  return a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
}

}  // namespace

double log_beta(double a, double b) {
  check_params({a, b});
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  if (p >= 10.0) {
    const double corr = lgamma_correction(p) + lgamma_correction(q) -
                        lgamma_correction(p + q);
    return -0.5 * std::log(q) + kLogSqrtTwoPi + corr +
           (p - 0.5) * std::log(p / (p + q)) + q * std::log1p(-p / (p + q));
  }
  if (q >= 10.0) {
    const double corr = lgamma_correction(q) - lgamma_correction(p + q);
    return std::lgamma(p) + corr + p - p * std::log(p + q) +
           (q - 0.5) * std::log1p(-p / (p + q));
  }
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

double reg_inc_beta(double x, BetaParams p) {
  check_params(p);
  check_unit(x, "x");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double a = p.a;
  const double b = p.b;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double front = std::exp(log_front(x, a, b));
    return std::clamp(front * beta_continued_fraction(x, a, b) / a, 0.0, 1.0);
  }
  const double y = 1.0 - x;
  const double front = std::exp(log_front(y, b, a));
  return std::clamp(1.0 - front * beta_continued_fraction(y, b, a) / b, 0.0,
                    1.0);
}

double inc_beta(double x, BetaParams p) {
  check_params(p);
  check_unit(x, "x");
  if (x == 0.0) return 0.0;
  return reg_inc_beta(x, p) * std::exp(log_beta(p.a, p.b));
}

double beta_pdf(double x, BetaParams p) {
  check_params(p);
  check_unit(x, "x");
  if (x == 0.0) {
    if (p.a < 1.0) return std::numeric_limits<double>::infinity();
    return p.a == 1.0 ? std::exp(-log_beta(p.a, p.b)) : 0.0;
  }
  if (x == 1.0) {
    if (p.b < 1.0) return std::numeric_limits<double>::infinity();
    return p.b == 1.0 ? std::exp(-log_beta(p.a, p.b)) : 0.0;
  }
  return std::exp((p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x) -
                  log_beta(p.a, p.b));
}

double inv_reg_inc_beta(double y, BetaParams p) {
  check_params(p);
  check_unit(y, "y");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;

  // Walk to the double with the smallest residual; I is monotone, so a
  // neighbour that does not improve ends the walk.
  auto polish = [&](double x) {
    double best = std::fabs(reg_inc_beta(x, p) - y);
    for (int step = 0; step < 256 && best > 0.0; ++step) {
      const double dir = reg_inc_beta(x, p) < y ? 1.0 : 0.0;
      const double cand = std::nextafter(x, dir);
      const double r = std::fabs(reg_inc_beta(cand, p) - y);
      if (!(r < best)) break;
      x = cand;
      best = r;
    }
    return x;
  };

  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(p.a / (p.a + p.b), 1e-3, 1.0 - 1e-3);
  for (int it = 0; it < kMaxInverseIterations; ++it) {
    const double f = reg_inc_beta(x, p) - y;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (std::fabs(f) <= 4.0 * DBL_EPSILON * std::max(y, 1e-300) ||
        hi - lo <= 4.0 * DBL_EPSILON * std::max(x, 1e-300)) {
      return polish(x);
    }
    const double pdf = beta_pdf(x, p);
    double next = (pdf > 0.0 && std::isfinite(pdf)) ? x - f / pdf : lo - 1.0;
    if (!(next > lo && next < hi)) {
      // Geometric midpoint keeps relative resolution for tiny quantiles.
      next = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 2.0 * DBL_EPSILON * std::fabs(x)) {
      return polish(next);
    }
    x = next;
  }
  return polish(x);
}

double scenario_confidence(double eps, std::size_t n_samples, std::size_t d) {
  check_unit(eps, "eps");
  if (n_samples < d + 1) {
    throw DomainError("scenario_confidence needs N >= d + 1 (N = " +
                      std::to_string(n_samples) +
                      ", d = " + std::to_string(d) + ")");
  }
  if (eps == 0.0) return 0.0;
  if (eps == 1.0) return 1.0;
  const double n = static_cast<double>(n_samples);
  const double log_eps = std::log(eps);
  const double log_keep = std::log1p(-eps);

  // log of C(N, j) eps^j (1-eps)^(N-j), built up from j = 0.
  double log_binom = 0.0;
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(d + 1);
  for (std::size_t j = 0; j <= d; ++j) {
    if (j > 0) {
      log_binom += std::log((n - static_cast<double>(j) + 1.0) /
                            static_cast<double>(j));
    }
    const double t = log_binom + static_cast<double>(j) * log_eps +
                     (n - static_cast<double>(j)) * log_keep;
    terms.push_back(t);
    max_term = std::max(max_term, t);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  const double tail = std::exp(max_term + std::log(acc));
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

}  // namespace bbjsr
