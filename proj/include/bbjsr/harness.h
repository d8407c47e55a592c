#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bbjsr/scenario.h"
#include "bbjsr/sysmodel.h"
#include "bbjsr/whitebox.h"

namespace bbjsr {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 5;
  std::vector<std::size_t> n_grid;  // sample sizes N
  std::vector<std::size_t> l_list{1};
  std::size_t n_min = 2;
  std::size_t n_max = 2;
  std::size_t m_min = 2;
  std::size_t m_max = 2;
  /// Sample sizes for validate-beta are drawn uniformly from [N_min, N_max].
  std::size_t sample_min = 50;
  std::size_t sample_max = 400;
  /// Random systems are rescaled so their brute-force upper bound is drawn
  /// uniformly from [target_min, target_max].
  double target_min = 0.5;
  double target_max = 1.5;
  double beta = 0.95;
  double eta = 0.0;
  double alpha = 1e-3;
  std::size_t depth = 8;
  bool with_oracle = false;
  /// Fixed system for the sweep; random per trial when unset.
  std::optional<std::filesystem::path> system_file;
  std::optional<std::filesystem::path> out_csv;
  std::optional<std::filesystem::path> out_summary;
  std::size_t threads = 0;  // 0: hardware concurrency

  /// Throws ValidationError on empty grids or out-of-range values.
  void validate() const;
};

/// Keys match the field names; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// Runs fn(0), ..., fn(count - 1) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

struct SweepRow {
  std::size_t trial = 0;
  BoundsReport report;
  std::optional<RhoBracket> oracle;
};

struct SweepSummaryRow {
  std::size_t l = 0;
  std::size_t n_samples = 0;
  std::size_t trials = 0;
  std::size_t unbounded = 0;
  double gamma_star = 0.0;
  double epsilon = 0.0;
  double kappa = 0.0;
  double delta = 0.0;
  double lower = 0.0;
  double upper = 0.0;       // +inf if any trial was unbounded
  double upper_best = 0.0;  // +inf if any trial was unbounded
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (trial, l, N)
  std::vector<SweepSummaryRow> summary;  // sorted by (l, N)
};

/// For each trial: one system (fixed or random) and, for each l, one sample
/// of size max(N-grid); smaller N use its prefixes.
SweepResult run_experiment(const ExperimentConfig& cfg);

/// trial,N,l,gamma_star,...,status[,rho_lo,rho_hi]
std::string sweep_csv(const SweepResult& r, bool with_oracle);
/// l,N,trials,gamma_star,epsilon,kappa,delta,lower,upper,upper_best,unbounded
std::string summary_csv(const SweepResult& r);

struct ValidationCase {
  std::size_t trial = 0;
  std::size_t attempts = 0;  // systems drawn, including skipped ones
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t n_samples = 0;
  RhoBracket rho;
  double lower = 0.0;
  double upper_best = 0.0;
  bool valid = false;        // upper_best >= rho_lo
  bool lower_valid = false;  // lower <= rho_hi + 2 alpha
};

struct ValidationSummary {
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::size_t valid = 0;
  std::size_t lower_valid = 0;
  std::size_t unbounded = 0;
  double correctness = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  std::vector<ValidationCase> cases;
};

/// Wilson score interval for k successes in n trials at z = 1.96.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n);

/// `trials` accepted instances. Systems whose white-box bracket is too
/// loose (rho_hi - rho_lo > 0.02 rho_hi) are skipped and redrawn, up to
/// 50 attempts per trial.
ValidationSummary validate_beta(const ExperimentConfig& cfg);

nlohmann::json to_json(const ValidationSummary& s, bool with_cases);

/// kCompanion: single input, A in companion form for the poles
/// {0.45, 1.1}, B = (0, 1)^T, K = [1.055, -1.45] placing A + BK at
/// {0.8, -0.7}. Every single-input realization with these spectra is
/// similar to this one.
/// kModal: B = I and K moves each eigenvalue of A along its own
/// eigenvector, 0.45 -> 0.8 and 1.1 -> -0.7, so A and A + BK commute.
enum class NetctlRealization { kCompanion, kModal };

NetctlRealization parse_netctl_realization(const std::string& name);
const char* to_string(NetctlRealization r);

struct NetctlPlant {
  Eigen::Matrix2d a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd k;
  Eigen::Matrix2d ac;
};

NetctlPlant netctl_plant(
    NetctlRealization r = NetctlRealization::kCompanion);

/// {1/(u-1)^2, 1/(u(u-1)), 1/((u-1)u), 1/u^2}, normalized to sum to 1.
std::vector<double> netctl_probs(std::size_t users);

/// Modes A^2 Ac^2 A^4, Ac A Ac^2 A^4, A Ac^3 A^4, Ac^4 A^4.
SwitchedSystem netctl_system(
    std::size_t users, NetctlRealization r = NetctlRealization::kCompanion);

struct NetctlPoint {
  BoundsReport report;
};

/// Analyzes prefixes of one sample of size max(n_list) with
/// min_mode_prob taken from the normalized probabilities.
std::vector<NetctlPoint> run_netctl(std::size_t users,
                                    const std::vector<std::size_t>& n_list,
                                    double beta, std::uint64_t seed,
                                    double alpha = 1e-3,
                                    std::size_t threads = 0,
                                    NetctlRealization r =
                                        NetctlRealization::kCompanion);

}  // namespace bbjsr
