// bbjsr: data-driven stability bounds for switched linear systems.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bbjsr/errors.h"
#include "bbjsr/harness.h"
#include "bbjsr/report.h"
#include "bbjsr/rng.h"
#include "bbjsr/scenario.h"
#include "bbjsr/sysmodel.h"
#include "bbjsr/whitebox.h"

namespace {

using bbjsr::ValidationError;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const char* const kCsvHelp = R"(CSV schemas:
  analyze --csv, experiment rows:
    [trial,]N,l,gamma_star,epsilon,kappa,delta,lower,upper,upper_alt,
    upper_best,status[,rho_lo,rho_hi]
    infinite bounds are empty cells; status is ok|undecided|unbounded.
  experiment summary (mean over trials per l and N):
    l,N,trials,gamma_star,epsilon,kappa,delta,lower,upper,upper_best,unbounded
  simulate --csv:
    trace,step,x1,...,xn  (step 0 holds x0)
Floats use the shortest round-trip decimal form.)";

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw std::runtime_error("cannot write " + *path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + *path);
}

nlohmann::json read_config(const std::optional<std::string>& path) {
  if (!path) return nlohmann::json::object();
  std::ifstream in(*path);
  if (!in) throw bbjsr::ParseError("cannot open " + *path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw bbjsr::ParseError(*path + ": " + e.what());
  }
}

struct Common {
  std::uint64_t seed = 1;
  std::optional<std::string> out;
  bool csv = false;
  bool json = false;
};

void add_common(CLI::App* app, Common& c, bool with_format) {
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--out", c.out, "Output path (stdout when omitted)");
  if (with_format) {
    auto* j = app->add_flag("--json", c.json, "JSON output (default)");
    auto* k = app->add_flag("--csv", c.csv, "CSV output");
    j->excludes(k);
  }
}

// Flags shared by experiment and validate-beta; each overrides --config.
struct HarnessFlags {
  std::optional<std::string> config;
  std::optional<std::size_t> trials;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> l_list;
  std::optional<std::size_t> n_min, n_max, m_min, m_max;
  std::optional<std::size_t> sample_min, sample_max;
  std::optional<double> beta, eta, tol;
  std::optional<std::size_t> depth, threads;
  bool seed_given = false;
};

void add_harness(CLI::App* app, HarnessFlags& h) {
  app->add_option("--config", h.config, "JSON config file");
  app->add_option("--trials", h.trials, "Number of trials");
  app->add_option("--l", h.l_list, "Trace lengths");
  app->add_option("--n-min", h.n_min, "Smallest state dimension");
  app->add_option("--n-max", h.n_max, "Largest state dimension");
  app->add_option("--m-min", h.m_min, "Smallest mode count");
  app->add_option("--m-max", h.m_max, "Largest mode count");
  app->add_option("--beta", h.beta, "Confidence level in [0, 1)");
  app->add_option("--eta", h.eta, "Regularization eta >= 0");
  app->add_option("--tol", h.tol, "Bisection tolerance alpha");
  app->add_option("--depth", h.depth, "Product depth of the white-box oracle");
  app->add_option("--threads", h.threads, "Worker threads (0: all cores)");
}

bbjsr::ExperimentConfig harness_config(const HarnessFlags& h,
                                       const Common& c) {
  bbjsr::ExperimentConfig cfg =
      bbjsr::experiment_config_from_json(read_config(h.config));
  if (h.seed_given) cfg.seed = c.seed;
  if (h.trials) cfg.trials = *h.trials;
  if (!h.n_grid.empty()) cfg.n_grid = h.n_grid;
  if (!h.l_list.empty()) cfg.l_list = h.l_list;
  if (h.n_min) cfg.n_min = *h.n_min;
  if (h.n_max) cfg.n_max = *h.n_max;
  if (h.m_min) cfg.m_min = *h.m_min;
  if (h.m_max) cfg.m_max = *h.m_max;
  if (h.sample_min) cfg.sample_min = *h.sample_min;
  if (h.sample_max) cfg.sample_max = *h.sample_max;
  if (h.beta) cfg.beta = *h.beta;
  if (h.eta) cfg.eta = *h.eta;
  if (h.tol) cfg.alpha = *h.tol;
  if (h.depth) cfg.depth = *h.depth;
  if (h.threads) cfg.threads = *h.threads;
  return cfg;
}

std::string gnuplot_script(const std::string& summary_path) {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'N'\n"
         "set logscale x\n"
         "plot '" + summary_path + "' using 2:8 with linespoints title 'lower', \\\n"
         "     '" + summary_path + "' using 2:10 with linespoints title 'upper_best', \\\n"
         "     '" + summary_path + "' using 2:7 with linespoints title 'delta'\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Data-driven bounds on the joint spectral radius of switched "
               "linear systems"};
  app.footer(kCsvHelp);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // simulate
  Common sim_c;
  std::string sim_system;
  std::size_t sim_n = 0;
  std::size_t sim_l = 1;
  bool sim_keep = false;
  auto* sim = app.add_subcommand("simulate", "Write a black-box trace file");
  add_common(sim, sim_c, true);
  sim->add_option("--system", sim_system, "System file (JSON)")->required();
  sim->add_option("--N", sim_n, "Number of traces")->required();
  sim->add_option("--l", sim_l, "Trace length");
  sim->add_flag("--keep-modes", sim_keep, "Keep hidden mode indices");

  // analyze
  Common an_c;
  std::string an_traces;
  double an_beta = 0.95;
  double an_eta = 0.0;
  double an_tol = 1e-3;
  std::optional<std::size_t> an_m;
  std::optional<std::size_t> an_l;
  std::optional<double> an_pmin;
  std::optional<double> an_bracket;
  bool an_rescale = false;
  auto* an = app.add_subcommand("analyze", "Bound the JSR from a trace file");
  add_common(an, an_c, true);
  an->add_option("traces,--traces", an_traces, "Trace file (JSON lines)")
      ->required();
  an->add_option("--beta", an_beta, "Confidence level in [0, 1)");
  an->add_option("--m", an_m, "Upper bound on the number of modes");
  an->add_option("--l", an_l, "Expected trace length");
  an->add_option("--eta", an_eta, "Regularization eta >= 0");
  an->add_option("--tol", an_tol, "Bisection tolerance alpha");
  an->add_option("--min-mode-prob", an_pmin,
                 "Lower bound on every mode's probability");
  an->add_option("--bracket", an_bracket, "Upper end U of the gamma bracket");
  an->add_flag("--rescale", an_rescale, "Normalize traces to |x0| = 1");

  // whitebox
  Common wb_c;
  std::string wb_system;
  std::size_t wb_depth = 8;
  std::size_t wb_l = 1;
  double wb_tol = 1e-3;
  auto* wb = app.add_subcommand("whitebox", "JSR bracket for a known system");
  add_common(wb, wb_c, false);
  wb->add_option("--system", wb_system, "System file (JSON)")->required();
  wb->add_option("--depth", wb_depth, "Product depth");
  wb->add_option("--l", wb_l, "Product length of the CQF bound");
  wb->add_option("--tol", wb_tol, "Bisection tolerance alpha");

  // experiment
  Common ex_c;
  HarnessFlags ex_h;
  std::optional<std::string> ex_system;
  std::optional<std::string> ex_summary;
  std::optional<std::string> ex_gnuplot;
  bool ex_oracle = false;
  auto* ex = app.add_subcommand("experiment", "Sweep N and l over trials");
  add_common(ex, ex_c, false);
  add_harness(ex, ex_h);
  ex->add_option("--N", ex_h.n_grid, "Sample sizes");
  ex->add_option("--system", ex_system,
                 "Fixed system file (random systems otherwise)");
  ex->add_option("--summary", ex_summary, "Per-N averaged summary CSV");
  ex->add_option("--gnuplot", ex_gnuplot,
                 "Write a gnuplot script for the summary");
  ex->add_flag("--with-oracle", ex_oracle, "Add white-box rho_lo, rho_hi");

  // validate-beta
  Common vb_c;
  HarnessFlags vb_h;
  bool vb_cases = false;
  auto* vb = app.add_subcommand("validate-beta",
                                "Empirical correctness of the upper bound");
  add_common(vb, vb_c, false);
  add_harness(vb, vb_h);
  vb->add_option("--N-min", vb_h.sample_min, "Smallest sample size");
  vb->add_option("--N-max", vb_h.sample_max, "Largest sample size");
  vb->add_flag("--cases", vb_cases, "Include per-trial records");

  // netctl
  Common nc_c;
  std::size_t nc_users = 3;
  std::vector<std::size_t> nc_n{100, 200, 500, 1000, 2000, 5000};
  double nc_beta = 0.95;
  double nc_tol = 1e-3;
  std::string nc_real = "companion";
  auto* nc = app.add_subcommand("netctl", "Networked control demo");
  add_common(nc, nc_c, true);
  nc->add_option("--users", nc_users, "Channel users, controller included");
  nc->add_option("--N", nc_n, "Sample sizes");
  nc->add_option("--beta", nc_beta, "Confidence level in [0, 1)");
  nc->add_option("--tol", nc_tol, "Bisection tolerance alpha");
  nc->add_option("--realization", nc_real, "companion | modal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*sim) {
    if (sim_n == 0) throw ValidationError("--N must be >= 1");
    if (sim_l == 0) throw ValidationError("--l must be >= 1");
    const bbjsr::SwitchedSystem sys = bbjsr::load_system(sim_system);
    bbjsr::Rng rng(sim_c.seed);
    bbjsr::SampleSet s = bbjsr::generate_sample(sys, sim_n, sim_l, rng);
    if (!sim_keep) s = bbjsr::strip_hidden(s);
    const std::string path = sim_c.out.value_or("/dev/stdout");
    if (sim_c.csv) {
      bbjsr::export_traces_csv(s, path);
    } else {
      bbjsr::save_traces(s, path);
    }
    return 0;
  }

  if (*an) {
    bbjsr::TraceLoadOptions opts;
    opts.rescale = an_rescale;
    opts.read_hidden = false;
    const bbjsr::SampleSet s = bbjsr::load_traces(an_traces, opts);
    bbjsr::BoundsConfig cfg;
    cfg.beta = an_beta;
    cfg.eta = an_eta;
    cfg.alpha = an_tol;
    cfg.l = an_l;
    cfg.m_claimed = an_m;
    cfg.min_mode_prob = an_pmin;
    cfg.bracket_hint = an_bracket;
    const bbjsr::BoundsReport rep = bbjsr::analyze(s, cfg);
    if (an_c.csv) {
      write_text(an_c.out, bbjsr::bounds_csv_header() + "\n" +
                               bbjsr::bounds_csv_row(rep) + "\n");
    } else {
      write_text(an_c.out, bbjsr::to_json(rep).dump(2) + "\n");
    }
    std::cerr << "verdict: " << rep.verdict() << "\n";
    return 0;
  }

  if (*wb) {
    const bbjsr::SwitchedSystem sys = bbjsr::load_system(wb_system);
    const bbjsr::JsrBracket bf = bbjsr::jsr_bruteforce(sys, wb_depth);
    const double cqf = bbjsr::jsr_cqf_upper(sys, wb_l, wb_tol);
    bbjsr::RhoBracket rho;
    rho.rho_lo = bf.lower;
    rho.bf_upper = bf.upper;
    rho.cqf_upper = cqf;
    rho.rho_hi = std::min(bf.upper, cqf);
    nlohmann::json j = {{"bruteforce", bbjsr::to_json(bf)},
                        {"cqf_upper", cqf},
                        {"cqf_l", wb_l},
                        {"rho", bbjsr::to_json(rho)}};
    write_text(wb_c.out, j.dump(2) + "\n");
    return 0;
  }

  if (*ex) {
    ex_h.seed_given = ex->count("--seed") > 0;
    bbjsr::ExperimentConfig cfg = harness_config(ex_h, ex_c);
    if (ex_system) cfg.system_file = *ex_system;
    if (ex_oracle) cfg.with_oracle = true;
    if (ex_c.out) cfg.out_csv = *ex_c.out;
    if (ex_summary) cfg.out_summary = *ex_summary;
    const bbjsr::SweepResult r = bbjsr::run_experiment(cfg);
    write_text(cfg.out_csv ? std::optional<std::string>(cfg.out_csv->string())
                           : std::nullopt,
               bbjsr::sweep_csv(r, cfg.with_oracle));
    if (cfg.out_summary) {
      write_text(cfg.out_summary->string(), bbjsr::summary_csv(r));
      if (ex_gnuplot) {
        write_text(*ex_gnuplot, gnuplot_script(cfg.out_summary->string()));
      }
    } else if (ex_gnuplot) {
      throw ValidationError("--gnuplot needs --summary");
    }
    return 0;
  }

  if (*vb) {
    vb_h.seed_given = vb->count("--seed") > 0;
    bbjsr::ExperimentConfig cfg = harness_config(vb_h, vb_c);
    if (cfg.n_grid.empty()) cfg.n_grid = {cfg.sample_min};
    const bbjsr::ValidationSummary s = bbjsr::validate_beta(cfg);
    write_text(vb_c.out, bbjsr::to_json(s, vb_cases).dump(2) + "\n");
    std::cerr << "correctness " << s.correctness << " (" << s.valid << "/"
              << s.trials << "), Wilson 95% [" << s.wilson_lo << ", "
              << s.wilson_hi << "]\n";
    return 0;
  }

  if (*nc) {
    const auto real = bbjsr::parse_netctl_realization(nc_real);
    const bbjsr::NetctlPlant plant = bbjsr::netctl_plant(real);
    const auto probs = bbjsr::netctl_probs(nc_users);
    const auto pts =
        bbjsr::run_netctl(nc_users, nc_n, nc_beta, nc_c.seed, nc_tol, 0, real);
    std::optional<std::size_t> crossing;
    for (const auto& p : pts) {
      if (!crossing && p.report.verdict() == "stable") {
        crossing = p.report.n_traces;
      }
    }
    if (nc_c.csv) {
      std::string text = bbjsr::bounds_csv_header() + "\n";
      for (const auto& p : pts) text += bbjsr::bounds_csv_row(p.report) + "\n";
      write_text(nc_c.out, text);
    } else {
      auto eig = [](const Eigen::Matrix2d& m) {
        const Eigen::Vector2cd e = m.eigenvalues();
        return nlohmann::json{{e[0].real(), e[0].imag()},
                              {e[1].real(), e[1].imag()}};
      };
      nlohmann::json reports = nlohmann::json::array();
      for (const auto& p : pts) reports.push_back(bbjsr::to_json(p.report));
      nlohmann::json j = {
          {"users", nc_users},
          {"realization", bbjsr::to_string(real)},
          {"probs", probs},
          {"min_mode_prob", *std::min_element(probs.begin(), probs.end())},
          {"eig_A", eig(plant.a)},
          {"eig_Ac", eig(plant.ac)},
          {"reports", reports},
          {"first_stable_N",
           crossing ? nlohmann::json(*crossing) : nlohmann::json()}};
      write_text(nc_c.out, j.dump(2) + "\n");
    }
    std::cerr << "verdict at N = " << pts.back().report.n_traces << ": "
              << pts.back().report.verdict() << "\n";
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
