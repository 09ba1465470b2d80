#include "satreg/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace satreg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InvalidArgument("config: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

cplx get_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {get_number(j, where), 0.0};
  if (j.is_array() && j.size() == 2) return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]")};
  fail(where, "expected a number or [re, im]");
}

CVec get_cvec(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = get_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

json complex_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

json cvec_json(const CVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v[i]));
  return a;
}

double get_frequency(const json& j, const std::string& where) {
  if (j.is_number()) return get_number(j, where);
  if (j.is_string()) {
    try {
      return parse_frequency(j.get<std::string>());
    } catch (const InvalidArgument& e) {
      fail(where, e.what());
    }
  }
  fail(where, "expected a number or an expression such as \"3pi\"");
}

ModelConfig parse_model(const json& j) {
  const std::string w = "model";
  if (!j.is_object() || !j.contains("type")) fail(w, "missing 'type'");
  ModelConfig m;
  const std::string type = get_string(j["type"], w + ".type");
  if (type == "heat2d") {
    check_keys(j, w, {"type", "modes_per_axis", "coefficient_modes_per_axis"});
    m.kind = ModelConfig::Kind::Heat2d;
    m.modes = j.contains("modes_per_axis") ? get_int(j["modes_per_axis"], w + ".modes_per_axis") : 31;
    if (j.contains("coefficient_modes_per_axis")) {
      m.coefficient_modes = get_int(j["coefficient_modes_per_axis"], w + ".coefficient_modes_per_axis");
    }
  } else if (type == "wave1d") {
    check_keys(j, w, {"type", "n_modes", "coefficient_n_modes", "rho", "tension"});
    m.kind = ModelConfig::Kind::Wave1d;
    m.modes = j.contains("n_modes") ? get_int(j["n_modes"], w + ".n_modes") : 30;
    if (j.contains("coefficient_n_modes")) m.coefficient_modes = get_int(j["coefficient_n_modes"], w + ".coefficient_n_modes");
    if (j.contains("rho")) m.rho = get_number(j["rho"], w + ".rho");
    if (j.contains("tension")) m.tension = get_number(j["tension"], w + ".tension");
    if (!(m.rho > 0.0) || !(m.tension > 0.0)) fail(w, "rho and tension must be positive");
  } else if (type == "toy") {
    check_keys(j, w, {"type", "a"});
    m.kind = ModelConfig::Kind::Toy;
    if (j.contains("a")) m.a = get_number(j["a"], w + ".a");
    if (!(m.a < 0.0)) fail(w + ".a", "must be negative");
  } else if (type == "matrix-file") {
    check_keys(j, w, {"type", "path", "coefficient_path"});
    m.kind = ModelConfig::Kind::MatrixFile;
    if (!j.contains("path")) fail(w, "matrix-file needs 'path'");
    m.path = get_string(j["path"], w + ".path");
    if (j.contains("coefficient_path")) m.coefficient_path = get_string(j["coefficient_path"], w + ".coefficient_path");
  } else {
    fail(w + ".type", "unknown model type '" + type + "' (heat2d, wave1d, toy, matrix-file)");
  }
  if ((m.kind == ModelConfig::Kind::Heat2d || m.kind == ModelConfig::Kind::Wave1d) &&
      (m.modes < 1 || m.coefficient_modes < 0)) {
    fail(w, "resolutions must be positive");
  }
  return m;
}

json model_json(const ModelConfig& m) {
  json j;
  j["type"] = model_kind_name(m.kind);
  switch (m.kind) {
    case ModelConfig::Kind::Heat2d:
      j["modes_per_axis"] = m.modes;
      if (m.coefficient_modes) j["coefficient_modes_per_axis"] = m.coefficient_modes;
      break;
    case ModelConfig::Kind::Wave1d:
      j["n_modes"] = m.modes;
      if (m.coefficient_modes) j["coefficient_n_modes"] = m.coefficient_modes;
      j["rho"] = m.rho;
      j["tension"] = m.tension;
      break;
    case ModelConfig::Kind::Toy:
      j["a"] = m.a;
      break;
    case ModelConfig::Kind::MatrixFile:
      j["path"] = m.path;
      if (!m.coefficient_path.empty()) j["coefficient_path"] = m.coefficient_path;
      break;
  }
  return j;
}

SaturationSpec parse_saturation(const json& j) {
  const std::string w = "saturation";
  check_keys(j, w, {"channels", "centers", "radii"});
  std::vector<SaturationChannel> channels;
  if (j.contains("channels")) {
    if (j.contains("centers") || j.contains("radii")) fail(w, "use either 'channels' or 'centers'/'radii'");
    if (!j["channels"].is_array()) fail(w + ".channels", "expected an array");
    for (std::size_t i = 0; i < j["channels"].size(); ++i) {
      const std::string wi = w + ".channels[" + std::to_string(i) + "]";
      const json& c = j["channels"][i];
      check_keys(c, wi, {"center", "radius"});
      if (!c.contains("center") || !c.contains("radius")) fail(wi, "needs 'center' and 'radius'");
      channels.push_back({get_cvec(c["center"], wi + ".center"), get_number(c["radius"], wi + ".radius")});
    }
  } else {
    if (!j.contains("centers") || !j.contains("radii")) fail(w, "needs 'channels' or both 'centers' and 'radii'");
    const CVec centers = get_cvec(j["centers"], w + ".centers");
    if (!j["radii"].is_array() || j["radii"].size() != std::size_t(centers.size())) {
      fail(w + ".radii", "expected an array with one radius per center");
    }
    for (Eigen::Index i = 0; i < centers.size(); ++i) {
      channels.push_back({CVec::Constant(1, centers[i]), get_number(j["radii"][i], w + ".radii")});
    }
  }
  try {
    return SaturationSpec(std::move(channels));
  } catch (const Error& e) {
    fail(w, e.what());
  }
}

json saturation_json(const SaturationSpec& s) {
  json ch = json::array();
  for (const auto& c : s.channels()) ch.push_back({{"center", cvec_json(c.center)}, {"radius", c.radius}});
  return {{"channels", ch}};
}

SignalSpec parse_signals(const json& j) {
  const std::string w = "signals";
  check_keys(j, w, {"a0", "c0", "harmonics"});
  SignalSpec s;
  if (j.contains("a0")) s.a0 = get_cvec(j["a0"], w + ".a0");
  if (j.contains("c0")) s.c0 = get_cvec(j["c0"], w + ".c0");
  if (j.contains("harmonics")) {
    if (!j["harmonics"].is_array()) fail(w + ".harmonics", "expected an array");
    for (std::size_t k = 0; k < j["harmonics"].size(); ++k) {
      const std::string wk = w + ".harmonics[" + std::to_string(k) + "]";
      const json& h = j["harmonics"][k];
      check_keys(h, wk, {"omega", "a", "b", "c", "d"});
      if (!h.contains("omega")) fail(wk, "missing 'omega'");
      Harmonic hk;
      hk.omega = get_frequency(h["omega"], wk + ".omega");
      if (h.contains("a")) hk.a = get_cvec(h["a"], wk + ".a");
      if (h.contains("b")) hk.b = get_cvec(h["b"], wk + ".b");
      if (h.contains("c")) hk.c = get_cvec(h["c"], wk + ".c");
      if (h.contains("d")) hk.d = get_cvec(h["d"], wk + ".d");
      s.harmonics.push_back(std::move(hk));
    }
  }
  return s;
}

json signals_json(const SignalSpec& s) {
  json j = json::object();
  if (s.a0.size()) j["a0"] = cvec_json(s.a0);
  if (s.c0.size()) j["c0"] = cvec_json(s.c0);
  json hs = json::array();
  for (const auto& h : s.harmonics) {
    json hj = {{"omega", h.omega}};
    if (h.a.size()) hj["a"] = cvec_json(h.a);
    if (h.b.size()) hj["b"] = cvec_json(h.b);
    if (h.c.size()) hj["c"] = cvec_json(h.c);
    if (h.d.size()) hj["d"] = cvec_json(h.d);
    hs.push_back(hj);
  }
  j["harmonics"] = hs;
  return j;
}

InitialStateConfig parse_initial(const json& j) {
  InitialStateConfig ic;
  if (j.is_array()) {
    ic.kind = InitialStateConfig::Kind::Explicit;
    for (std::size_t i = 0; i < j.size(); ++i) ic.values.push_back(get_number(j[i], "initial_state"));
    return ic;
  }
  const std::string s = get_string(j, "initial_state");
  if (s == "zero") ic.kind = InitialStateConfig::Kind::Zero;
  else if (s == "paper") ic.kind = InitialStateConfig::Kind::Paper;
  else if (s == "steady-state") ic.kind = InitialStateConfig::Kind::SteadyState;
  else fail("initial_state", "expected \"zero\", \"paper\", \"steady-state\" or an array");
  return ic;
}

json initial_json(const InitialStateConfig& ic) {
  switch (ic.kind) {
    case InitialStateConfig::Kind::Zero:
      return "zero";
    case InitialStateConfig::Kind::Paper:
      return "paper";
    case InitialStateConfig::Kind::SteadyState:
      return "steady-state";
    case InitialStateConfig::Kind::Explicit:
      return ic.values;
  }
  return "zero";
}

SimulationSettings parse_simulation(const json& j) {
  const std::string w = "simulation";
  check_keys(j, w, {"t_end", "dt", "record_stride", "scheme"});
  SimulationSettings s;
  if (j.contains("t_end")) s.t_end = get_number(j["t_end"], w + ".t_end");
  if (j.contains("dt")) s.dt = get_number(j["dt"], w + ".dt");
  if (j.contains("record_stride")) s.record_stride = get_int(j["record_stride"], w + ".record_stride");
  if (j.contains("scheme")) {
    try {
      s.scheme = parse_scheme(get_string(j["scheme"], w + ".scheme"));
    } catch (const InvalidArgument& e) {
      fail(w + ".scheme", e.what());
    }
  }
  if (!(s.t_end > 0.0) || !(s.dt > 0.0) || s.dt > s.t_end) fail(w, "need 0 < dt <= t_end");
  if (s.record_stride < 0) fail(w + ".record_stride", "must be >= 0");
  return s;
}

json simulation_json(const SimulationSettings& s) {
  return {{"t_end", s.t_end}, {"dt", s.dt}, {"record_stride", s.record_stride}, {"scheme", scheme_name(s.scheme)}};
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["model"] = model_json(c.model);
  j["kappa"] = c.kappa;
  j["saturation"] = saturation_json(c.saturation);
  j["signals"] = signals_json(c.signals);
  j["initial_state"] = initial_json(c.initial_state);
  j["simulation"] = simulation_json(c.simulation);
  json lam = json::array();
  for (cplx z : c.lambdas) lam.push_back(complex_json(z));
  j["lambdas"] = lam;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
  check_keys(j, "top level",
             {"model", "kappa", "saturation", "signals", "initial_state", "simulation", "lambdas", "output_dir"});
  ExperimentConfig c;
  c.base_dir = base_dir;
  if (!j.contains("model")) fail("top level", "missing 'model'");
  c.model = parse_model(j["model"]);
  if (j.contains("kappa")) c.kappa = get_number(j["kappa"], "kappa");
  if (c.kappa < 0.0) fail("kappa", "must be >= 0");
  if (!j.contains("saturation")) fail("top level", "missing 'saturation'");
  c.saturation = parse_saturation(j["saturation"]);
  if (j.contains("signals")) c.signals = parse_signals(j["signals"]);
  if (j.contains("initial_state")) c.initial_state = parse_initial(j["initial_state"]);
  if (j.contains("simulation")) c.simulation = parse_simulation(j["simulation"]);
  if (j.contains("lambdas")) {
    if (!j["lambdas"].is_array()) fail("lambdas", "expected an array");
    for (std::size_t i = 0; i < j["lambdas"].size(); ++i) {
      c.lambdas.push_back(get_complex(j["lambdas"][i], "lambdas[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  return c;
}

bool same_cvec(const CVec& a, const CVec& b) { return a.size() == b.size() && (a.size() == 0 || a == b); }

}  // namespace

const char* model_kind_name(ModelConfig::Kind k) {
  switch (k) {
    case ModelConfig::Kind::Heat2d:
      return "heat2d";
    case ModelConfig::Kind::Wave1d:
      return "wave1d";
    case ModelConfig::Kind::Toy:
      return "toy";
    case ModelConfig::Kind::MatrixFile:
      return "matrix-file";
  }
  return "?";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (!(a.model == b.model) || a.kappa != b.kappa || !(a.initial_state == b.initial_state) ||
      !(a.simulation == b.simulation) || a.lambdas != b.lambdas || a.output_dir != b.output_dir) {
    return false;
  }
  const auto& ca = a.saturation.channels();
  const auto& cb = b.saturation.channels();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!same_cvec(ca[i].center, cb[i].center) || ca[i].radius != cb[i].radius) return false;
  }
  const auto& sa = a.signals;
  const auto& sb = b.signals;
  if (!same_cvec(sa.a0, sb.a0) || !same_cvec(sa.c0, sb.c0) || sa.harmonics.size() != sb.harmonics.size()) {
    return false;
  }
  for (std::size_t k = 0; k < sa.harmonics.size(); ++k) {
    const auto& ha = sa.harmonics[k];
    const auto& hb = sb.harmonics[k];
    if (ha.omega != hb.omega || !same_cvec(ha.a, hb.a) || !same_cvec(ha.b, hb.b) || !same_cvec(ha.c, hb.c) ||
        !same_cvec(ha.d, hb.d)) {
      return false;
    }
  }
  return true;
}

double parse_frequency(const std::string& text) {
  static const std::regex re(R"(^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)?\s*(\*?\s*pi)?\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched)) {
    throw InvalidArgument("cannot parse frequency '" + text + "'");
  }
  double v = m[1].matched ? std::stod(m[1].str()) : 1.0;
  if (m[2].matched) v *= M_PI;
  if (m[3].matched) {
    const double den = std::stod(m[3].str());
    if (den == 0.0) throw InvalidArgument("frequency '" + text + "' divides by zero");
    v /= den;
  }
  return v;
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: not valid JSON: ") + e.what());
  }
  return config_from_json(j, base_dir);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto parent = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

std::string serialize_config(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::string serialize_signals(const SignalSpec& s) { return signals_json(s).dump(2) + "\n"; }

ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value) {
  json j = config_json(cfg);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  json* node = &j;
  std::stringstream keys(dotted_key);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  if (parts.empty()) throw InvalidArgument("config: empty override key");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw InvalidArgument("config: override '" + dotted_key + "': '" + p + "' is not an array index");
      }
      if (idx >= node->size()) throw InvalidArgument("config: override '" + dotted_key + "': index out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (!last && !node->contains(p)) {
        throw InvalidArgument("config: override '" + dotted_key + "': no key '" + p + "'");
      }
      node = &(*node)[p];
    } else {
      throw InvalidArgument("config: override '" + dotted_key + "' descends into a scalar");
    }
  }
  *node = v;
  return config_from_json(j, cfg.base_dir);
}

SignalSpec resolve_signals(const SignalSpec& spec, Eigen::Index nu, Eigen::Index nd) {
  SignalSpec s = spec;
  auto fill = [](CVec& v, Eigen::Index n) {
    if (v.size() == 0) v = CVec::Zero(n);
  };
  fill(s.a0, nu);
  fill(s.c0, nd);
  for (auto& h : s.harmonics) {
    fill(h.a, nu);
    fill(h.b, nu);
    fill(h.c, nd);
    fill(h.d, nd);
  }
  return s;
}

}  // namespace satreg
