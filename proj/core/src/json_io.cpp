#include "covqec/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace covqec {

namespace {

Complex entry_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw InputError("matrix entry must be a number or [re, im], got " + e.dump());
}

bool is_entry(const json& e) {
  return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
}

int require_count(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw InputError(std::string("missing or non-integer field '") + key + "'");
  int v = j[key].get<int>();
  if (v <= 0) throw InputError(std::string("field '") + key + "' must be positive");
  return v;
}

// JSON has no infinity; non-finite numbers become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

ComplexMatrix matrix_from_json(const json& j, int rows, int cols) {
  if (!j.is_array()) throw InputError("matrix must be an array");
  ComplexMatrix m(rows, cols);
  // Flat row-major list of entries.
  if (j.size() == static_cast<std::size_t>(rows) * cols && (j.empty() || is_entry(j[0]))) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = entry_from_json(j[r * cols + c]);
    return m;
  }
  if (j.size() != static_cast<std::size_t>(rows))
    throw InputError("matrix has " + std::to_string(j.size()) + " entries, expected " +
                     std::to_string(rows * cols) + " or " + std::to_string(rows) + " rows");
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols))
      throw InputError("matrix row " + std::to_string(r) + " must hold " + std::to_string(cols) +
                       " entries");
    for (int c = 0; c < cols; ++c) m(r, c) = entry_from_json(row[c]);
  }
  return m;
}

json channel_to_json(const Channel& ch) {
  json kraus = json::array();
  for (const auto& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
  return {{"d_in", ch.d_in()}, {"d_out", ch.d_out()}, {"kraus", kraus}};
}

Channel channel_from_json(const json& j) {
  if (!j.is_object()) throw InputError("channel document must be an object");
  int d_in = require_count(j, "d_in");
  int d_out = require_count(j, "d_out");
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
    throw InputError("channel needs a non-empty 'kraus' list");
  std::vector<ComplexMatrix> kraus;
  for (const auto& k : j["kraus"]) kraus.push_back(matrix_from_json(k, d_out, d_in));
  try {
    return Channel(std::move(kraus));
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid channel: ") + e.what());
  }
}

json hamiltonian_to_json(const Hamiltonian& h) {
  return {{"d", h.dim()}, {"matrix", matrix_to_json(h.matrix())}};
}

Hamiltonian hamiltonian_from_json(const json& j) {
  if (!j.is_object()) throw InputError("Hamiltonian document must be an object");
  int d = require_count(j, "d");
  if (!j.contains("matrix")) throw InputError("Hamiltonian needs a 'matrix' field");
  ComplexMatrix m = matrix_from_json(j["matrix"], d, d);
  try {
    return Hamiltonian(m);
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid Hamiltonian: ") + e.what());
  }
}

json code_to_json(const CodeDocument& doc) {
  if (doc.thermo) return {{"kind", "thermo"}, {"n", doc.thermo->n}, {"m", doc.thermo->m}};
  if (!doc.code) throw std::invalid_argument("code_to_json: empty document");
  const auto& c = *doc.code;
  json out = {{"kind", "explicit"},
              {"d_s", c.d_s()},
              {"d_l", c.d_l()},
              {"isometry", matrix_to_json(c.isometry)},
              {"h_l", hamiltonian_to_json(c.h_l)},
              {"h_s", hamiltonian_to_json(c.h_s)}};
  if (c.period) out["period"] = *c.period;
  return out;
}

CodeDocument code_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InputError("code document needs a string 'kind'");
  const std::string kind = j["kind"];
  CodeDocument doc;
  if (kind == "thermo") {
    int n = require_count(j, "n");
    int m = require_count(j, "m");
    try {
      doc.thermo.emplace(n, m);
    } catch (const std::exception& e) {
      throw InputError(std::string("invalid thermo code: ") + e.what());
    }
    return doc;
  }
  if (kind != "explicit") throw InputError("unknown code kind '" + kind + "'");
  if (!j.contains("h_l") || !j.contains("h_s") || !j.contains("isometry"))
    throw InputError("explicit code needs 'isometry', 'h_l' and 'h_s'");
  Hamiltonian h_l = hamiltonian_from_json(j["h_l"]);
  Hamiltonian h_s = hamiltonian_from_json(j["h_s"]);
  ComplexMatrix v = matrix_from_json(j["isometry"], h_s.dim(), h_l.dim());
  std::optional<double> period;
  if (j.contains("period") && j["period"].is_number()) period = j["period"].get<double>();
  try {
    doc.code = make_code(std::move(v), std::move(h_l), std::move(h_s), period);
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid code: ") + e.what());
  }
  return doc;
}

json qfi_to_json(const QfiValue& q, const std::string& kind_label) {
  json out;
  if (q.is_finite()) {
    out["kind"] = "finite";
    out["value"] = q.value();
  } else {
    out["kind"] = "infinite";
    out["value"] = nullptr;
  }
  if (!kind_label.empty()) out["qfi_kind"] = kind_label;
  if (q.certificate().size() > 0) {
    out["certificate"] = {{"rows", q.certificate().rows()},
                          {"cols", q.certificate().cols()},
                          {"matrix", matrix_to_json(q.certificate())}};
  }
  if (q.sdp()) {
    const auto& s = *q.sdp();
    out["sdp"] = {{"objective", s.objective},
                  {"primal_residual", s.primal_residual},
                  {"dual_gap", s.dual_gap},
                  {"newton_steps", s.newton_steps},
                  {"converged", s.converged}};
  }
  return out;
}

json bound_report_to_json(const BoundReport& r) {
  std::string qfi_kind = "none";
  if (r.qfi_used) {
    qfi_kind = (r.theorem == BoundTheorem::T2Worst || r.theorem == BoundTheorem::T2Choi) ? "rld"
                                                                                         : "sld-reg";
  }
  json qfi = nullptr;
  if (r.qfi_used) {
    qfi = r.qfi_used->is_finite() ? json(r.qfi_used->value()) : json("infinite");
  }
  return {{"theorem", to_string(r.theorem)},
          {"x", number(r.argument_x)},
          {"epsilon_lower", r.epsilon_lower},
          {"qfi", qfi},
          {"qfi_kind", qfi_kind},
          {"flags", r.flags},
          {"inputs", r.inputs}};
}

json estimate_to_json(const InfidelityEstimate& e) {
  json candidates = json::array();
  for (const auto& c : e.candidates) {
    candidates.push_back({{"label", c.label},
                          {"choi_infidelity", c.choi_infidelity},
                          {"worst_infidelity", c.worst_infidelity},
                          {"dispersion", c.dispersion},
                          {"closed_form", c.closed_form}});
  }
  json out = {{"choi_infidelity", e.choi_infidelity},
              {"choi_lower_bound", e.choi_lower_bound},
              {"worst_lower", e.worst_lower},
              {"worst_upper", e.worst_upper},
              {"recovery_label", e.recovery_label},
              {"candidates", candidates},
              {"log", e.log}};
  out["recovery"] = e.recovery ? channel_to_json(*e.recovery) : json(nullptr);
  return out;
}

Channel parse_channel_shorthand(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 4)
    throw InputError("channel shorthand must look like name:dim:p, got '" + text + "'");

  auto to_number = [&](const std::string& s, const char* what) {
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double v = 0.0;
    if (!(in >> v) || !(in >> std::ws).eof())
      throw InputError(std::string("bad ") + what + " '" + s + "' in '" + text + "'");
    return v;
  };
  const std::string& name = parts[0];
  double dim_value = to_number(parts[1], "dimension");
  int d = static_cast<int>(dim_value);
  if (d < 1 || d != dim_value) throw InputError("dimension must be a positive integer in '" + text + "'");
  double p = parts.size() >= 3 ? to_number(parts[2], "probability") : 0.0;
  if (p < 0.0 || p > 1.0) throw InputError("probability outside [0, 1] in '" + text + "'");
  if (parts.size() == 4 && name != "dephasing")
    throw InputError("only dephasing takes an angle, in '" + text + "'");

  if (name == "identity") return identity_channel(d);
  if (parts.size() < 3) throw InputError("missing probability in '" + text + "'");
  if (name == "erasure") return erasure(d, p);
  if (name == "depolarizing") return depolarizing(d, p);
  if (name == "dephasing") {
    if (d != 2) throw InputError("dephasing is a qubit channel, in '" + text + "'");
    double phi = parts.size() == 4 ? to_number(parts[3], "angle") : 0.0;
    return rotated_dephasing(p, phi);
  }
  throw InputError("unknown channel '" + name + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("parse error in '" + path + "': " + e.what());
  }
}

Channel load_channel(const std::string& arg) {
  if (arg.find(':') != std::string::npos && !std::ifstream(arg)) return parse_channel_shorthand(arg);
  return channel_from_json(read_json_file(arg));
}

Hamiltonian load_hamiltonian(const std::string& arg, int d) {
  if (arg == "sz") {
    std::vector<double> e(d);
    for (int i = 0; i < d; ++i) e[i] = d - 1 - 2.0 * i;
    return Hamiltonian::diagonal(e);
  }
  if (arg == "zero") return Hamiltonian::zero(d);
  if (arg.rfind("diag:", 0) == 0) {
    std::vector<double> e;
    std::stringstream ss(arg.substr(5));
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::istringstream in(item);
      in.imbue(std::locale::classic());
      double v = 0.0;
      if (!(in >> v)) throw InputError("bad diagonal entry '" + item + "'");
      e.push_back(v);
    }
    if (static_cast<int>(e.size()) != d)
      throw InputError("diagonal has " + std::to_string(e.size()) + " entries, channel input has " +
                       std::to_string(d));
    return Hamiltonian::diagonal(e);
  }
  Hamiltonian h = hamiltonian_from_json(read_json_file(arg));
  if (h.dim() != d)
    throw InputError("Hamiltonian dimension " + std::to_string(h.dim()) + " does not match " +
                     std::to_string(d));
  return h;
}

CodeDocument load_code(const std::string& arg) {
  // thermo:n:m is accepted as a shorthand.
  if (arg.rfind("thermo:", 0) == 0 && !std::ifstream(arg)) {
    int n = 0, m = 0;
    char sep = 0;
    std::istringstream in(arg.substr(7));
    if (!(in >> n >> sep >> m) || sep != ':') throw InputError("expected thermo:n:m, got '" + arg + "'");
    return code_from_json(json{{"kind", "thermo"}, {"n", n}, {"m", m}});
  }
  return code_from_json(read_json_file(arg));
}

} // namespace covqec
