#include "bbjsr/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "bbjsr/errors.h"
#include "bbjsr/report.h"
#include "bbjsr/rng.h"

namespace bbjsr {
namespace {

constexpr double kWilsonZ = 1.959963984540054;
constexpr std::size_t kMaxAttempts = 50;

std::size_t worker_count(std::size_t requested, std::size_t count) {
  std::size_t t = requested;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, count));
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  const auto k = static_cast<std::size_t>(rng.uniform() * span);
  return lo + std::min(k, hi - lo);
}

SampleSet prefix(const SampleSet& s, std::size_t count) {
  SampleSet out;
  out.n = s.n;
  out.l = s.l;
  out.claimed_m = s.claimed_m;
  out.claimed_min_prob = s.claimed_min_prob;
  out.traces.assign(s.traces.begin(),
                    s.traces.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

BoundsConfig bounds_config(const ExperimentConfig& cfg, std::size_t m) {
  BoundsConfig b;
  b.beta = cfg.beta;
  b.eta = cfg.eta;
  b.alpha = cfg.alpha;
  b.m_claimed = m;
  return b;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials == 0) throw ValidationError("trials must be >= 1");
  if (n_grid.empty()) throw ValidationError("N grid must not be empty");
  if (l_list.empty()) throw ValidationError("l list must not be empty");
  for (std::size_t n : n_grid) {
    if (n == 0) throw ValidationError("N grid entries must be >= 1");
  }
  for (std::size_t l : l_list) {
    if (l == 0) throw ValidationError("l entries must be >= 1");
  }
  if (n_min == 0 || n_min > n_max) throw ValidationError("bad n range");
  if (m_min == 0 || m_min > m_max) throw ValidationError("bad m range");
  if (sample_min == 0 || sample_min > sample_max) {
    throw ValidationError("bad N range");
  }
  if (!(target_min > 0.0 && target_min <= target_max)) {
    throw ValidationError("bad target range");
  }
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must lie in [0, 1)");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  if (!(eta >= 0.0)) throw ValidationError("eta must be >= 0");
  if (depth == 0) throw ValidationError("depth must be >= 1");
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "trials") {
        c.trials = v.get<std::size_t>();
      } else if (key == "N" || key == "n_grid") {
        c.n_grid = v.get<std::vector<std::size_t>>();
      } else if (key == "l" || key == "l_list") {
        c.l_list = v.is_array() ? v.get<std::vector<std::size_t>>()
                                : std::vector<std::size_t>{v.get<std::size_t>()};
      } else if (key == "n_min") {
        c.n_min = v.get<std::size_t>();
      } else if (key == "n_max") {
        c.n_max = v.get<std::size_t>();
      } else if (key == "m_min") {
        c.m_min = v.get<std::size_t>();
      } else if (key == "m_max") {
        c.m_max = v.get<std::size_t>();
      } else if (key == "N_min") {
        c.sample_min = v.get<std::size_t>();
      } else if (key == "N_max") {
        c.sample_max = v.get<std::size_t>();
      } else if (key == "target_min") {
        c.target_min = v.get<double>();
      } else if (key == "target_max") {
        c.target_max = v.get<double>();
      } else if (key == "beta") {
        c.beta = v.get<double>();
      } else if (key == "eta") {
        c.eta = v.get<double>();
      } else if (key == "alpha" || key == "tol") {
        c.alpha = v.get<double>();
      } else if (key == "depth") {
        c.depth = v.get<std::size_t>();
      } else if (key == "with_oracle") {
        c.with_oracle = v.get<bool>();
      } else if (key == "system") {
        c.system_file = v.get<std::string>();
      } else if (key == "out") {
        c.out_csv = v.get<std::string>();
      } else if (key == "summary") {
        c.out_summary = v.get<std::string>();
      } else if (key == "threads") {
        c.threads = v.get<std::size_t>();
      } else {
        throw ParseError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config key '" + key + "': " + e.what());
    }
  }
  return c;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = worker_count(threads, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SweepResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<SwitchedSystem> fixed;
  if (cfg.system_file) fixed = load_system(*cfg.system_file);

  std::vector<std::size_t> grid = cfg.n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::size_t n_max_sample = grid.back();

  std::vector<std::vector<SweepRow>> per_trial(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
    Rng sys_rng(derive_seed(cfg.seed, {trial, 0}));
    SwitchedSystem sys = fixed ? *fixed : [&] {
      const std::size_t n = uniform_index(sys_rng, cfg.n_min, cfg.n_max);
      const std::size_t m = uniform_index(sys_rng, cfg.m_min, cfg.m_max);
      const double target =
          cfg.target_min + (cfg.target_max - cfg.target_min) * sys_rng.uniform();
      return random_system_with_bound(n, m, target, cfg.depth, sys_rng);
    }();
    std::optional<RhoBracket> oracle;
    if (cfg.with_oracle) {
      oracle = true_rho_for_validation(sys, cfg.depth, 1, cfg.alpha);
    }
    for (std::size_t li = 0; li < cfg.l_list.size(); ++li) {
      const std::size_t l = cfg.l_list[li];
      Rng rng(derive_seed(cfg.seed, {trial, 1, l}));
      const SampleSet full = generate_sample(sys, n_max_sample, l, rng);
      for (std::size_t n_samples : grid) {
        SweepRow row;
        row.trial = trial;
        row.report = analyze(strip_hidden(prefix(full, n_samples)),
                             bounds_config(cfg, sys.m()));
        row.oracle = oracle;
        per_trial[trial].push_back(std::move(row));
      }
    }
  });

  SweepResult out;
  for (auto& rows : per_trial) {
    for (auto& r : rows) out.rows.push_back(std::move(r));
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return std::tie(a.trial, a.report.l, a.report.n_traces) <
                            std::tie(b.trial, b.report.l, b.report.n_traces);
                   });

  std::map<std::pair<std::size_t, std::size_t>, std::vector<const SweepRow*>>
      groups;
  for (const auto& r : out.rows) {
    groups[{r.report.l, r.report.n_traces}].push_back(&r);
  }
  for (const auto& [key, rows] : groups) {
    SweepSummaryRow s;
    s.l = key.first;
    s.n_samples = key.second;
    s.trials = rows.size();
    std::vector<double> g, e, k, dl, lo, up, ub;
    for (const SweepRow* r : rows) {
      g.push_back(r->report.gamma_star);
      e.push_back(r->report.epsilon);
      k.push_back(r->report.kappa);
      dl.push_back(r->report.delta);
      lo.push_back(r->report.lower);
      up.push_back(r->report.upper);
      ub.push_back(r->report.upper_best);
      if (r->report.unbounded) ++s.unbounded;
    }
    s.gamma_star = mean(g);
    s.epsilon = mean(e);
    s.kappa = mean(k);
    s.delta = mean(dl);
    s.lower = mean(lo);
    s.upper = mean(up);
    s.upper_best = mean(ub);
    out.summary.push_back(s);
  }
  return out;
}

std::string sweep_csv(const SweepResult& r, bool with_oracle) {
  std::ostringstream os;
  os << "trial," << bounds_csv_header();
  if (with_oracle) os << ",rho_lo,rho_hi";
  os << "\n";
  for (const auto& row : r.rows) {
    os << row.trial << "," << bounds_csv_row(row.report);
    if (with_oracle) {
      os << "," << (row.oracle ? csv_number(row.oracle->rho_lo) : "") << ","
         << (row.oracle ? csv_number(row.oracle->rho_hi) : "");
    }
    os << "\n";
  }
  return os.str();
}

std::string summary_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "l,N,trials,gamma_star,epsilon,kappa,delta,lower,upper,upper_best,"
        "unbounded\n";
  for (const auto& s : r.summary) {
    os << s.l << "," << s.n_samples << "," << s.trials << ","
       << csv_number(s.gamma_star) << "," << csv_number(s.epsilon) << ","
       << csv_number(s.kappa) << "," << csv_number(s.delta) << ","
       << csv_number(s.lower) << "," << csv_number(s.upper) << ","
       << csv_number(s.upper_best) << "," << s.unbounded << "\n";
  }
  return os.str();
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      kWilsonZ * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ValidationSummary validate_beta(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t l = cfg.l_list.front();
  std::vector<ValidationCase> cases(cfg.trials);
  std::vector<std::size_t> skipped(cfg.trials, 0);

  parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
    for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Rng rng(derive_seed(cfg.seed, {trial, attempt}));
      const std::size_t n = uniform_index(rng, cfg.n_min, cfg.n_max);
      const std::size_t m = uniform_index(rng, cfg.m_min, cfg.m_max);
      const std::size_t n_samples =
          std::max(uniform_index(rng, cfg.sample_min, cfg.sample_max),
                   sym_dim(n) + 1);
      const double target =
          cfg.target_min + (cfg.target_max - cfg.target_min) * rng.uniform();
      const SwitchedSystem sys =
          random_system_with_bound(n, m, target, cfg.depth, rng);
      const RhoBracket rho = true_rho_for_validation(sys, cfg.depth, 1, cfg.alpha);
      if (!rho.usable()) {
        ++skipped[trial];
        continue;
      }
      const SampleSet sample =
          strip_hidden(generate_sample(sys, n_samples, l, rng));
      const BoundsReport rep = analyze(sample, bounds_config(cfg, m));
      ValidationCase& c = cases[trial];
      c.trial = trial;
      c.attempts = attempt + 1;
      c.n = n;
      c.m = m;
      c.n_samples = n_samples;
      c.rho = rho;
      c.lower = rep.lower;
      c.upper_best = rep.upper_best;
      c.valid = rep.upper_best >= rho.rho_lo;
      c.lower_valid = rep.lower <= rho.rho_hi + 2.0 * cfg.alpha;
      return;
    }
    throw std::runtime_error("trial " + std::to_string(trial) +
                             ": no system with a tight white-box bracket in " +
                             std::to_string(kMaxAttempts) + " attempts");
  });

  ValidationSummary s;
  s.trials = cfg.trials;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    s.skipped += skipped[i];
    if (cases[i].valid) ++s.valid;
    if (cases[i].lower_valid) ++s.lower_valid;
    if (!std::isfinite(cases[i].upper_best)) ++s.unbounded;
  }
  s.correctness = static_cast<double>(s.valid) / static_cast<double>(s.trials);
  std::tie(s.wilson_lo, s.wilson_hi) = wilson_interval(s.valid, s.trials);
  s.cases = std::move(cases);
  return s;
}

nlohmann::json to_json(const ValidationSummary& s, bool with_cases) {
  nlohmann::json j = {{"trials", s.trials},
                      {"skipped", s.skipped},
                      {"valid", s.valid},
                      {"lower_valid", s.lower_valid},
                      {"unbounded", s.unbounded},
                      {"correctness", s.correctness},
                      {"wilson95", {s.wilson_lo, s.wilson_hi}}};
  if (with_cases) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : s.cases) {
      arr.push_back({{"trial", c.trial},
                     {"attempts", c.attempts},
                     {"n", c.n},
                     {"m", c.m},
                     {"N", c.n_samples},
                     {"rho_lo", c.rho.rho_lo},
                     {"rho_hi", c.rho.rho_hi},
                     {"lower", c.lower},
                     {"upper_best", json_number(c.upper_best)},
                     {"valid", c.valid},
                     {"lower_valid", c.lower_valid}});
    }
    j["cases"] = std::move(arr);
  }
  return j;
}

NetctlRealization parse_netctl_realization(const std::string& name) {
  if (name == "companion") return NetctlRealization::kCompanion;
  if (name == "modal") return NetctlRealization::kModal;
  throw ValidationError("unknown realization '" + name +
                        "' (expected companion or modal)");
}

const char* to_string(NetctlRealization r) {
  return r == NetctlRealization::kModal ? "modal" : "companion";
}

NetctlPlant netctl_plant(NetctlRealization r) {
  NetctlPlant p;
  // Companion form of z^2 - 1.55 z + 0.495 = (z - 0.45)(z - 1.1).
  p.a << 0.0, 1.0, -0.495, 1.55;
  if (r == NetctlRealization::kCompanion) {
    p.b = Eigen::Vector2d(0.0, 1.0);
    // A + BK has characteristic polynomial z^2 - 0.1 z - 0.56.
    p.k = Eigen::RowVector2d(1.055, -1.45);
  } else {
    // Eigenvectors of a companion matrix are (1, z).
    Eigen::Matrix2d v;
    v << 1.0, 1.0, 0.45, 1.1;
    p.b = Eigen::Matrix2d::Identity();
    p.k = v * Eigen::Vector2d(0.8 - 0.45, -0.7 - 1.1).asDiagonal() *
          v.inverse();
  }
  p.ac = p.a + p.b * p.k;
  return p;
}

std::vector<double> netctl_probs(std::size_t users) {
  if (users < 2) throw ValidationError("netctl needs at least 2 users");
  const double u = static_cast<double>(users);
  std::vector<double> p{1.0 / ((u - 1.0) * (u - 1.0)), 1.0 / (u * (u - 1.0)),
                        1.0 / ((u - 1.0) * u), 1.0 / (u * u)};
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return p;
}

SwitchedSystem netctl_system(std::size_t users, NetctlRealization r) {
  const NetctlPlant pl = netctl_plant(r);
  const Eigen::Matrix2d& a = pl.a;
  const Eigen::Matrix2d& c = pl.ac;
  const Eigen::Matrix2d a4 = a * a * a * a;
  std::vector<Eigen::MatrixXd> modes{
      a * a * c * c * a4,
      c * a * c * c * a4,
      a * c * c * c * a4,
      c * c * c * c * a4,
  };
  return SwitchedSystem(std::move(modes), netctl_probs(users));
}

std::vector<NetctlPoint> run_netctl(std::size_t users,
                                    const std::vector<std::size_t>& n_list,
                                    double beta, std::uint64_t seed,
                                    double alpha, std::size_t threads,
                                    NetctlRealization r) {
  if (n_list.empty()) throw ValidationError("N list must not be empty");
  const SwitchedSystem sys = netctl_system(users, r);
  const std::size_t n_max =
      *std::max_element(n_list.begin(), n_list.end());
  Rng rng(derive_seed(seed, {0}));
  const SampleSet full = strip_hidden(generate_sample(sys, n_max, 1, rng));
  BoundsConfig cfg;
  cfg.beta = beta;
  cfg.alpha = alpha;
  cfg.min_mode_prob = sys.min_mode_prob();
  std::vector<NetctlPoint> out(n_list.size());
  parallel_for(n_list.size(), threads, [&](std::size_t i) {
    out[i].report = analyze(prefix(full, n_list[i]), cfg);
  });
  return out;
}

}  // namespace bbjsr
