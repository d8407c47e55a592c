#include "bbjsr/report.h"

#include <cmath>

#include "bbjsr/numfmt.h"

namespace bbjsr {

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

nlohmann::json to_json(const BoundsReport& r) {
  nlohmann::json p = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.p.matrix().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < r.p.matrix().cols(); ++j) {
      row.push_back(r.p.matrix()(i, j));
    }
    p.push_back(std::move(row));
  }
  nlohmann::json j = {
      {"N", r.n_traces},
      {"n", r.n},
      {"l", r.l},
      {"m", r.m},
      {"d", r.d},
      {"beta", r.beta},
      {"eta", r.eta},
      {"alpha", r.alpha},
      {"gamma_star", r.gamma_star},
      {"gamma_lo", r.gamma_lo},
      {"level", r.level},
      {"P", std::move(p)},
      {"kappa", json_number(r.kappa)},
      {"epsilon", r.epsilon},
      {"eps_sphere", r.eps_sphere},
      {"delta", r.delta},
      {"violation_alt", r.violation_alt},
      {"delta_alt", r.delta_alt},
      {"lower", r.lower},
      {"upper", json_number(r.upper)},
      {"upper_alt", json_number(r.upper_alt)},
      {"upper_best", json_number(r.upper_best)},
      {"solver_undecided", r.solver_undecided},
      {"opt_retried", r.opt_retried},
      {"unbounded", r.unbounded},
      {"status", r.status()},
      {"verdict", r.verdict()},
  };
  j["min_mode_prob"] =
      r.min_mode_prob ? nlohmann::json(*r.min_mode_prob) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const JsrBracket& b) {
  return {{"lower", b.lower},
          {"upper", json_number(b.upper)},
          {"depth", b.depth},
          {"lower_method", b.lower_method},
          {"upper_method", b.upper_method}};
}

nlohmann::json to_json(const RhoBracket& b) {
  return {{"rho_lo", b.rho_lo},
          {"rho_hi", b.rho_hi},
          {"bruteforce_upper", json_number(b.bf_upper)},
          {"cqf_upper", b.cqf_upper},
          {"usable", b.usable()}};
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  return shortest(v);
}

std::string bounds_csv_header() {
  return "N,l,gamma_star,epsilon,kappa,delta,lower,upper,upper_alt,"
         "upper_best,status";
}

std::string bounds_csv_row(const BoundsReport& r) {
  std::string s = std::to_string(r.n_traces) + "," + std::to_string(r.l);
  for (double v : {r.gamma_star, r.epsilon, r.kappa, r.delta, r.lower,
                   r.upper, r.upper_alt, r.upper_best}) {
    s += "," + csv_number(v);
  }
  s += "," + r.status();
  return s;
}

}  // namespace bbjsr
