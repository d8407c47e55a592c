#include "bbjsr/sysmodel.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bbjsr/errors.h"

namespace bbjsr {
namespace {

std::vector<double> uniform_probs(std::size_t m) {
  return std::vector<double>(m, m == 0 ? 0.0 : 1.0 / static_cast<double>(m));
}

}  // namespace

SwitchedSystem::SwitchedSystem(std::vector<Eigen::MatrixXd> modes)
    : SwitchedSystem(modes, uniform_probs(modes.size())) {}

SwitchedSystem::SwitchedSystem(std::vector<Eigen::MatrixXd> modes,
                               std::vector<double> mode_probs)
    : modes_(std::move(modes)), probs_(std::move(mode_probs)) {
  if (modes_.empty()) {
    throw ValidationError("a switched system needs at least one mode");
  }
  n_ = static_cast<std::size_t>(modes_.front().rows());
  if (n_ == 0) throw DimensionError("mode matrices must be non-empty");
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& a = modes_[i];
    if (static_cast<std::size_t>(a.rows()) != n_ ||
        static_cast<std::size_t>(a.cols()) != n_) {
      throw DimensionError("mode " + std::to_string(i) + " is " +
                           std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + ", expected " +
                           std::to_string(n_) + "x" + std::to_string(n_));
    }
    if (!a.allFinite()) {
      throw ValidationError("mode " + std::to_string(i) +
                            " has non-finite entries");
    }
  }
  if (probs_.size() != modes_.size()) {
    throw DimensionError("got " + std::to_string(probs_.size()) +
                         " mode probabilities for " +
                         std::to_string(modes_.size()) + " modes");
  }
  for (double p : probs_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw ValidationError("mode probabilities must be positive");
    }
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::fabs(total - 1.0) > 1e-12) {
    throw ValidationError("mode probabilities sum to " +
                          std::to_string(total) + ", not 1");
  }
}

double SwitchedSystem::min_mode_prob() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

SwitchedSystem SwitchedSystem::scaled(double factor) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(modes_.size());
  for (const auto& a : modes_) out.push_back(factor * a);
  return SwitchedSystem(std::move(out), probs_);
}

void validate_sample(const SampleSet& sample, double unit_tol) {
  if (sample.traces.empty()) throw ValidationError("sample has no traces");
  if (sample.n == 0) throw DimensionError("sample dimension is zero");
  if (sample.l == 0) throw ValidationError("trace length must be >= 1");
  for (std::size_t i = 0; i < sample.traces.size(); ++i) {
    const Trace& t = sample.traces[i];
    const std::string where = "trace " + std::to_string(i) + ": ";
    if (static_cast<std::size_t>(t.x0.size()) != sample.n) {
      throw DimensionError(where + "x0 has dimension " +
                           std::to_string(t.x0.size()) + ", expected " +
                           std::to_string(sample.n));
    }
    if (t.states.size() != sample.l) {
      throw ValidationError(where + "length " +
                            std::to_string(t.states.size()) +
                            " differs from the sample length " +
                            std::to_string(sample.l));
    }
    for (const auto& s : t.states) {
      if (static_cast<std::size_t>(s.size()) != sample.n) {
        throw DimensionError(where + "state of dimension " +
                             std::to_string(s.size()) + ", expected " +
                             std::to_string(sample.n));
      }
      if (!s.allFinite()) throw ValidationError(where + "non-finite state");
    }
    if (std::fabs(t.x0.norm() - 1.0) > unit_tol) {
      throw ValidationError(where + "x0 is not on the unit sphere");
    }
    if (t.hidden_modes && t.hidden_modes->size() != sample.l) {
      throw ValidationError(where + "hidden mode list has wrong length");
    }
  }
}

Eigen::VectorXd sample_unit_sphere(std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("sphere dimension must be >= 1");
  Eigen::VectorXd x(n);
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
    norm = x.norm();
  } while (norm == 0.0);
  return x / norm;
}

Trace generate_trace(const SwitchedSystem& sys, std::size_t l, Rng& rng) {
  if (l == 0) throw ValidationError("trace length must be >= 1");
  Trace t;
  t.x0 = sample_unit_sphere(sys.n(), rng);
  t.states.reserve(l);
  std::vector<std::size_t> modes;
  modes.reserve(l);
  Eigen::VectorXd x = t.x0;
  for (std::size_t k = 0; k < l; ++k) {
    const std::size_t j = rng.categorical(sys.mode_probs());
    x = sys.mode(j) * x;
    t.states.push_back(x);
    modes.push_back(j);
  }
  t.hidden_modes = std::move(modes);
  return t;
}

SampleSet generate_sample(const SwitchedSystem& sys, std::size_t n_traces,
                          std::size_t l, Rng& rng) {
  if (n_traces == 0) throw ValidationError("sample size N must be >= 1");
  SampleSet s;
  s.n = sys.n();
  s.l = l;
  s.traces.reserve(n_traces);
  for (std::size_t i = 0; i < n_traces; ++i) {
    s.traces.push_back(generate_trace(sys, l, rng));
  }
  return s;
}

SampleSet strip_hidden(const SampleSet& sample) {
  SampleSet out = sample;
  for (auto& t : out.traces) t.hidden_modes.reset();
  return out;
}

Trace normalized(const Trace& trace) {
  const double r = trace.x0.norm();
  if (r == 0.0) throw ValidationError("trace starts at the origin");
  Trace out = trace;
  out.x0 /= r;
  for (auto& s : out.states) s /= r;
  return out;
}

SwitchedSystem random_gaussian_system(std::size_t n, std::size_t m, Rng& rng) {
  if (n == 0 || m == 0) throw DomainError("n and m must be >= 1");
  std::vector<Eigen::MatrixXd> modes;
  modes.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::MatrixXd a(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) a(r, c) = rng.normal();
    }
    modes.push_back(std::move(a));
  }
  return SwitchedSystem(std::move(modes));
}

}  // namespace bbjsr
