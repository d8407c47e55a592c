#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bbjsr/errors.h"
#include "bbjsr/numfmt.h"
#include "bbjsr/sysmodel.h"

namespace bbjsr {
namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + "expected a JSON object");
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw ParseError(where + "missing field '" + name + "'");
  }
  return *it;
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + "expected a number");
  return v.get<double>();
}

Eigen::VectorXd as_vector(const json& v, std::size_t expected,
                          const std::string& where) {
  if (!v.is_array()) throw ParseError(where + "expected an array");
  if (expected != 0 && v.size() != expected) {
    throw DimensionError(where + "has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(expected));
  }
  Eigen::VectorXd x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = as_real(v[i], where + "[" + std::to_string(i) + "]: ");
  }
  return x;
}

json to_json(const Eigen::VectorXd& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

}  // namespace

SwitchedSystem load_system(const std::filesystem::path& path) {
  auto in = open_in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  const std::string where = path.string() + ": ";
  const auto n_json = field(doc, "n", where);
  const auto m_json = field(doc, "m", where);
  if (!n_json.is_number_integer() || n_json.get<long long>() < 1) {
    throw ParseError(where + "field 'n' must be a positive integer");
  }
  if (!m_json.is_number_integer() || m_json.get<long long>() < 1) {
    throw ParseError(where + "field 'm' must be a positive integer");
  }
  const auto n = n_json.get<std::size_t>();
  const auto m = m_json.get<std::size_t>();
  const json& modes_json = field(doc, "modes", where);
  if (!modes_json.is_array() || modes_json.size() != m) {
    throw DimensionError(where + "field 'modes' must hold " +
                         std::to_string(m) + " matrices");
  }
  std::vector<Eigen::MatrixXd> modes;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string mw = where + "modes[" + std::to_string(i) + "]";
    const json& rows = modes_json[i];
    if (!rows.is_array() || rows.size() != n) {
      throw DimensionError(mw + " must have " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXd a(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      a.row(r) = as_vector(rows[r], n,
                           mw + "[" + std::to_string(r) + "] ").transpose();
    }
    modes.push_back(std::move(a));
  }
  std::vector<double> probs;
  if (auto it = doc.find("probs"); it != doc.end()) {
    Eigen::VectorXd p = as_vector(*it, m, where + "probs ");
    probs.assign(p.data(), p.data() + p.size());
    return SwitchedSystem(std::move(modes), std::move(probs));
  }
  return SwitchedSystem(std::move(modes));
}

void save_system(const SwitchedSystem& sys, const std::filesystem::path& path) {
  json doc;
  doc["n"] = sys.n();
  doc["m"] = sys.m();
  json modes = json::array();
  for (const auto& a : sys.modes()) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      rows.push_back(to_json(a.row(r).transpose()));
    }
    modes.push_back(std::move(rows));
  }
  doc["modes"] = std::move(modes);
  doc["probs"] = sys.mode_probs();
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

SampleSet load_traces(const std::filesystem::path& path,
                      const TraceLoadOptions& options) {
  auto in = open_in(path);
  SampleSet sample;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where =
        path.string() + ":" + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + e.what());
    }
    Trace t;
    t.x0 = as_vector(field(obj, "x0", where), sample.n, where + "x0 ");
    if (t.x0.size() == 0) throw DimensionError(where + "x0 is empty");
    const json& states = field(obj, "states", where);
    if (!states.is_array() || states.empty()) {
      throw ParseError(where + "field 'states' must be a non-empty array");
    }
    for (std::size_t k = 0; k < states.size(); ++k) {
      t.states.push_back(as_vector(states[k], t.x0.size(),
                                   where + "states[" + std::to_string(k) +
                                       "] "));
    }
    if (auto it = obj.find("modes"); options.read_hidden && it != obj.end()) {
      if (!it->is_array() || it->size() != t.states.size()) {
        throw ParseError(where + "field 'modes' must have one entry per state");
      }
      std::vector<std::size_t> modes;
      for (const auto& j : *it) {
        if (!j.is_number_integer() || j.get<long long>() < 0) {
          throw ParseError(where + "mode indices must be non-negative integers");
        }
        modes.push_back(j.get<std::size_t>());
      }
      t.hidden_modes = std::move(modes);
    }
    if (sample.traces.empty()) {
      sample.n = static_cast<std::size_t>(t.x0.size());
      sample.l = t.states.size();
    } else if (t.states.size() != sample.l) {
      throw ValidationError(where + "trace length " +
                            std::to_string(t.states.size()) +
                            " differs from the first trace's length " +
                            std::to_string(sample.l));
    }
    if (options.rescale) t = normalized(t);
    sample.traces.push_back(std::move(t));
  }
  if (sample.traces.empty()) {
    throw ParseError(path.string() + ": no traces found");
  }
  validate_sample(sample);
  return sample;
}

void save_traces(const SampleSet& sample, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const Trace& t : sample.traces) {
    json obj;
    obj["x0"] = to_json(t.x0);
    json states = json::array();
    for (const auto& s : t.states) states.push_back(to_json(s));
    obj["states"] = std::move(states);
    if (t.hidden_modes) obj["modes"] = *t.hidden_modes;
    out << obj.dump() << "\n";
  }
}

void export_traces_csv(const SampleSet& sample,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "trace,step";
  for (std::size_t i = 0; i < sample.n; ++i) out << ",x" << (i + 1);
  out << "\n";
  for (std::size_t i = 0; i < sample.traces.size(); ++i) {
    const Trace& t = sample.traces[i];
    auto row = [&](std::size_t step, const Eigen::VectorXd& x) {
      out << i << "," << step;
      for (Eigen::Index k = 0; k < x.size(); ++k) out << "," << shortest(x[k]);
      out << "\n";
    };
    row(0, t.x0);
    for (std::size_t k = 0; k < t.states.size(); ++k) row(k + 1, t.states[k]);
  }
}

}  // namespace bbjsr
