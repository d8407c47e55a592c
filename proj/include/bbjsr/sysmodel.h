#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bbjsr/rng.h"

namespace bbjsr {

/// x_{k+1} = A_{tau(k)} x_k with tau(k) drawn i.i.d. from mode_probs.
/// This is the hidden ground truth; the scenario engine never sees it.
class SwitchedSystem {
 public:
  /// Uniform mode distribution.
  explicit SwitchedSystem(std::vector<Eigen::MatrixXd> modes);
  SwitchedSystem(std::vector<Eigen::MatrixXd> modes,
                 std::vector<double> mode_probs);

  std::size_t n() const { return n_; }
  std::size_t m() const { return modes_.size(); }
  const std::vector<Eigen::MatrixXd>& modes() const { return modes_; }
  const Eigen::MatrixXd& mode(std::size_t i) const { return modes_.at(i); }
  const std::vector<double>& mode_probs() const { return probs_; }
  double min_mode_prob() const;

  /// Same switching distribution, every mode multiplied by `factor`.
  SwitchedSystem scaled(double factor) const;

 private:
  std::size_t n_ = 0;
  std::vector<Eigen::MatrixXd> modes_;
  std::vector<double> probs_;
};

/// One observed trajectory (x0, x1, ..., x_l). `hidden_modes[k]` is the
/// mode that produced states[k]; only the simulator fills it in.
struct Trace {
  Eigen::VectorXd x0;
  std::vector<Eigen::VectorXd> states;
  std::optional<std::vector<std::size_t>> hidden_modes;

  std::size_t length() const { return states.size(); }
  const Eigen::VectorXd& last() const { return states.back(); }
};

/// N traces of a common length l in dimension n.
struct SampleSet {
  std::vector<Trace> traces;
  std::size_t n = 0;
  std::size_t l = 0;
  std::optional<std::size_t> claimed_m;
  std::optional<double> claimed_min_prob;

  std::size_t size() const { return traces.size(); }
};

/// Throws ValidationError unless every trace has dimension n, length l,
/// a unit-norm x0 (within `unit_tol`), and hidden modes of matching length.
void validate_sample(const SampleSet& sample, double unit_tol = 1e-12);

Eigen::VectorXd sample_unit_sphere(std::size_t n, Rng& rng);

Trace generate_trace(const SwitchedSystem& sys, std::size_t l, Rng& rng);

SampleSet generate_sample(const SwitchedSystem& sys, std::size_t n_traces,
                          std::size_t l, Rng& rng);

/// Copy of `sample` with every hidden_modes field removed.
SampleSet strip_hidden(const SampleSet& sample);

/// Rescales a trace so that ||x0|| = 1 (valid by homogeneity).
Trace normalized(const Trace& trace);

/// m modes with i.i.d. standard normal entries, uniform switching, before
/// any rescaling.
SwitchedSystem random_gaussian_system(std::size_t n, std::size_t m, Rng& rng);

// File formats.
//
// System file (JSON):  {"n": 2, "m": 2, "modes": [[[a11, a12], [a21, a22]],
//                       ...], "probs": [0.5, 0.5]}
// Trace file (JSON lines), one trace per line:
//                      {"x0": [...], "states": [[...], ...], "modes": [...]}
//                      "modes" is optional and holds hidden mode indices.
// Trace CSV:           trace,step,x1,...,xn with step 0 holding x0.

SwitchedSystem load_system(const std::filesystem::path& path);
void save_system(const SwitchedSystem& sys, const std::filesystem::path& path);

struct TraceLoadOptions {
  /// Rescale traces whose x0 is not unit-norm instead of rejecting them.
  bool rescale = false;
  /// When false the "modes" field is skipped without being parsed.
  bool read_hidden = true;
};

SampleSet load_traces(const std::filesystem::path& path,
                      const TraceLoadOptions& options = {});
void save_traces(const SampleSet& sample, const std::filesystem::path& path);
void export_traces_csv(const SampleSet& sample,
                       const std::filesystem::path& path);

}  // namespace bbjsr
