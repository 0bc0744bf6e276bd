#include "nhlattice/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "nhlattice/error.hpp"

namespace nhl {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw InvalidArgument("config key '" + key + "': " + what, key);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) bad(join(path, key), "unknown key");
  }
}

bool present(const json& obj, const char* key) { return obj.contains(key) && !obj.at(key).is_null(); }

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(key, "must be finite");
  return x;
}

double get_phase(const json& v, const std::string& key) {
  if (v.is_number()) return get_number(v, key);
  if (!v.is_string()) bad(key, "expected a phase (number or pi expression)");
  try {
    return parse_phase(v.get<std::string>());
  } catch (const InvalidArgument& e) {
    bad(key, e.what());
  }
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

template <typename Enum, std::size_t N>
Enum get_enum(const json& v, const std::string& key, const std::pair<const char*, Enum> (&options)[N]) {
  const std::string s = get_string(v, key);
  std::string names;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  bad(key, "'" + s + "' is not one of {" + names + "}");
}

std::vector<double> get_number_list(const json& v, const std::string& key, bool phases = false) {
  if (!v.is_array()) bad(key, "expected a list");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string item = key + "[" + std::to_string(k) + "]";
    out.push_back(phases ? get_phase(v[k], item) : get_number(v[k], item));
  }
  return out;
}

TimeWindow get_window(const json& v, const std::string& key) {
  const auto list = get_number_list(v, key);
  if (list.size() != 2) bad(key, "expected [start, end]");
  if (list[0] > list[1]) bad(key, "window start exceeds end");
  return {list[0], list[1]};
}

SiteInterval get_interval(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) bad(key, "expected [first, last]");
  SiteInterval s{get_int(v[0], key + "[0]"), get_int(v[1], key + "[1]")};
  if (s.first > s.last) bad(key, "interval first exceeds last");
  return s;
}

constexpr std::pair<const char*, Experiment> kExperiments[] = {
    {"dispersion_scan", Experiment::dispersion_scan},
    {"transport_single_site", Experiment::transport_single_site},
    {"transport_gaussian", Experiment::transport_gaussian},
    {"storage", Experiment::storage},
    {"reduction_check", Experiment::reduction_check}};
constexpr std::pair<const char*, Boundary> kBoundaries[] = {{"open", Boundary::open},
                                                            {"periodic", Boundary::periodic}};
constexpr std::pair<const char*, ExcitationKind> kExcitations[] = {
    {"single_site", ExcitationKind::single_site}, {"gaussian", ExcitationKind::gaussian}};
constexpr std::pair<const char*, Method> kMethods[] = {{"rk4", Method::rk4}, {"exact", Method::exact}};
constexpr std::pair<const char*, RetrievalPhase> kRetrievals[] = {
    {"forward", RetrievalPhase::forward}, {"reversed", RetrievalPhase::reversed}};
constexpr std::pair<const char*, Incidence> kIncidences[] = {{"left", Incidence::left},
                                                             {"right", Incidence::right}};
constexpr std::pair<const char*, ReductionDynamics> kDynamics[] = {
    {"slow_manifold", ReductionDynamics::slow_manifold}, {"direct", ReductionDynamics::direct}};
constexpr std::pair<const char*, BInit> kBInits[] = {{"slaved", BInit::slaved}, {"zero", BInit::zero}};
constexpr std::pair<const char*, UbMode> kUbModes[] = {{"tied", UbMode::tied}, {"real", UbMode::real}};

void read_lattice(const json& j, LatticeParams& l) {
  const std::string p = "lattice";
  check_keys(j, p, {"kappa", "beta", "gamma", "phi", "boundary", "defects", "chain_length", "index_origin"});
  if (present(j, "kappa")) l.kappa = get_number(j["kappa"], p + ".kappa");
  if (present(j, "beta")) l.beta = get_number(j["beta"], p + ".beta");
  if (present(j, "gamma")) l.gamma = get_number(j["gamma"], p + ".gamma");
  if (present(j, "phi")) l.phi = get_phase(j["phi"], p + ".phi");
  if (present(j, "boundary")) l.boundary = get_enum(j["boundary"], p + ".boundary", kBoundaries);
  if (present(j, "chain_length")) l.chain_length = get_int(j["chain_length"], p + ".chain_length");
  if (present(j, "index_origin")) l.index_origin = get_int(j["index_origin"], p + ".index_origin");
  if (present(j, "defects")) {
    const json& d = j["defects"];
    if (!d.is_array()) bad(p + ".defects", "expected a list");
    l.defects.clear();
    for (std::size_t k = 0; k < d.size(); ++k) {
      const std::string q = p + ".defects[" + std::to_string(k) + "]";
      check_keys(d[k], q, {"site", "v_real", "xi_imag"});
      if (!present(d[k], "site")) bad(q + ".site", "missing");
      DefectSpec spec;
      spec.site = get_int(d[k]["site"], q + ".site");
      if (present(d[k], "v_real")) spec.v_real = get_number(d[k]["v_real"], q + ".v_real");
      if (present(d[k], "xi_imag")) spec.xi_imag = get_number(d[k]["xi_imag"], q + ".xi_imag");
      l.defects.push_back(spec);
    }
  }
}

void read_excitation(const json& j, ExcitationSpec& e) {
  const std::string p = "excitation";
  check_keys(j, p, {"type", "n0", "w0", "q0", "normalize"});
  if (present(j, "type")) e.kind = get_enum(j["type"], p + ".type", kExcitations);
  if (present(j, "n0")) e.n0 = get_int(j["n0"], p + ".n0");
  if (present(j, "w0")) e.w0 = get_number(j["w0"], p + ".w0");
  if (present(j, "q0")) e.q0 = get_phase(j["q0"], p + ".q0");
  if (present(j, "normalize")) e.normalize = get_bool(j["normalize"], p + ".normalize");
}

void read_timing(const json& j, TimingParams& t) {
  const std::string p = "timing";
  check_keys(j, p, {"t_final", "dt", "sample_dt", "t_prime", "method"});
  if (present(j, "t_final")) t.t_final = get_number(j["t_final"], p + ".t_final");
  if (present(j, "dt")) t.dt = get_number(j["dt"], p + ".dt");
  if (present(j, "sample_dt")) t.sample_dt = get_number(j["sample_dt"], p + ".sample_dt");
  if (present(j, "t_prime")) t.t_prime = get_number(j["t_prime"], p + ".t_prime");
  if (present(j, "method")) t.method = get_enum(j["method"], p + ".method", kMethods);
}

void read_transport(const json& j, TransportParams& t) {
  const std::string p = "transport";
  check_keys(j, p, {"velocity_window", "reflection_margin", "barrier", "t_eval"});
  if (present(j, "velocity_window")) t.velocity_window = get_window(j["velocity_window"], p + ".velocity_window");
  if (present(j, "reflection_margin")) t.reflection_margin = get_int(j["reflection_margin"], p + ".reflection_margin");
  if (present(j, "barrier")) t.barrier = get_interval(j["barrier"], p + ".barrier");
  if (present(j, "t_eval")) t.t_eval = get_number(j["t_eval"], p + ".t_eval");
}

void read_storage(const json& j, StorageParams& s) {
  const std::string p = "storage";
  check_keys(j, p, {"N", "V_c", "xi", "retrieval", "incidence", "xi_sweep", "release_settle", "capture_window"});
  if (present(j, "N")) s.N = get_int(j["N"], p + ".N");
  if (present(j, "V_c")) s.V_c = get_number(j["V_c"], p + ".V_c");
  if (present(j, "xi")) s.xi = get_number(j["xi"], p + ".xi");
  if (present(j, "retrieval")) s.retrieval = get_enum(j["retrieval"], p + ".retrieval", kRetrievals);
  if (present(j, "incidence")) s.incidence = get_enum(j["incidence"], p + ".incidence", kIncidences);
  if (present(j, "xi_sweep")) s.xi_sweep = get_number_list(j["xi_sweep"], p + ".xi_sweep");
  if (present(j, "release_settle")) s.release_settle = get_number(j["release_settle"], p + ".release_settle");
  if (present(j, "capture_window")) s.capture_window = get_window(j["capture_window"], p + ".capture_window");
}

void read_dispersion(const json& j, DispersionParams& d) {
  const std::string p = "dispersion";
  check_keys(j, p, {"phi_list", "q_points"});
  if (present(j, "phi_list")) d.phi_list = get_number_list(j["phi_list"], p + ".phi_list", true);
  if (present(j, "q_points")) d.q_points = get_int(j["q_points"], p + ".q_points");
}

void read_reduction(const json& j, ReductionParams& r) {
  const std::string p = "reduction";
  check_keys(j, p, {"J_list", "n_cells", "index_origin", "dynamics", "b_init", "ub_mode", "real_ub_per_j2"});
  if (present(j, "J_list")) r.J_list = get_number_list(j["J_list"], p + ".J_list");
  if (present(j, "n_cells")) r.n_cells = get_int(j["n_cells"], p + ".n_cells");
  if (present(j, "index_origin")) r.index_origin = get_int(j["index_origin"], p + ".index_origin");
  if (present(j, "dynamics")) r.dynamics = get_enum(j["dynamics"], p + ".dynamics", kDynamics);
  if (present(j, "b_init")) r.b_init = get_enum(j["b_init"], p + ".b_init", kBInits);
  if (present(j, "ub_mode")) r.ub_mode = get_enum(j["ub_mode"], p + ".ub_mode", kUbModes);
  if (present(j, "real_ub_per_j2")) r.real_ub_per_j2 = get_number(j["real_ub_per_j2"], p + ".real_ub_per_j2");
}

template <typename Enum, std::size_t N>
const char* name_of(Enum value, const std::pair<const char*, Enum> (&options)[N]) {
  for (const auto& [name, v] : options) {
    if (v == value) return name;
  }
  return "?";
}

}  // namespace

double parse_phase(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw InvalidArgument("empty phase");
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw InvalidArgument("cannot parse phase '" + text + "'");
    return v;
  }
  double sign = 1.0;
  std::string head = s.substr(0, pos);
  if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
    if (head[0] == '-') sign = -1.0;
    head.erase(0, 1);
  }
  double coef = 1.0;
  if (!head.empty()) {
    if (head.back() != '*') throw InvalidArgument("cannot parse phase '" + text + "'");
    head.pop_back();
    std::size_t used = 0;
    try {
      coef = std::stod(head, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != head.size()) throw InvalidArgument("cannot parse phase '" + text + "'");
  }
  std::string tail = s.substr(pos + 2);
  double den = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') throw InvalidArgument("cannot parse phase '" + text + "'");
    tail.erase(0, 1);
    std::size_t used = 0;
    try {
      den = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tail.size() || den == 0.0) {
      throw InvalidArgument("cannot parse phase '" + text + "'");
    }
  }
  return sign * (coef * std::numbers::pi) / den;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["units"] = kUnitsDeclaration;
  j["experiment"] = name_of(c.experiment, kExperiments);
  j["preset"] = c.preset;

  const auto& l = c.lattice;
  json lat{{"kappa", l.kappa}, {"beta", l.beta}, {"gamma", l.gamma}, {"phi", l.phi},
           {"boundary", name_of(l.boundary, kBoundaries)}};
  json defects = json::array();
  for (const auto& d : l.defects) defects.push_back({{"site", d.site}, {"v_real", d.v_real}, {"xi_imag", d.xi_imag}});
  lat["defects"] = defects;
  if (l.chain_length) lat["chain_length"] = *l.chain_length;
  if (l.index_origin) lat["index_origin"] = *l.index_origin;
  j["lattice"] = lat;

  const auto& e = c.excitation;
  j["excitation"] = {{"type", name_of(e.kind, kExcitations)}, {"n0", e.n0}, {"w0", e.w0},
                     {"q0", e.q0}, {"normalize", e.normalize}};
  const auto& t = c.timing;
  j["timing"] = {{"t_final", t.t_final}, {"dt", t.dt}, {"sample_dt", t.sample_dt},
                 {"t_prime", t.t_prime}, {"method", name_of(t.method, kMethods)}};

  const auto& tr = c.transport;
  json transport{{"reflection_margin", tr.reflection_margin}};
  if (tr.velocity_window) transport["velocity_window"] = *tr.velocity_window;
  if (tr.barrier) transport["barrier"] = {tr.barrier->first, tr.barrier->last};
  if (tr.t_eval) transport["t_eval"] = *tr.t_eval;
  j["transport"] = transport;

  const auto& s = c.storage;
  json storage{{"N", s.N},
               {"V_c", s.V_c},
               {"xi", s.xi},
               {"retrieval", name_of(s.retrieval, kRetrievals)},
               {"incidence", name_of(s.incidence, kIncidences)},
               {"xi_sweep", s.xi_sweep},
               {"release_settle", s.release_settle}};
  if (s.capture_window) storage["capture_window"] = *s.capture_window;
  j["storage"] = storage;

  j["dispersion"] = {{"phi_list", c.dispersion.phi_list}, {"q_points", c.dispersion.q_points}};
  const auto& r = c.reduction;
  j["reduction"] = {{"J_list", r.J_list},
                    {"n_cells", r.n_cells},
                    {"index_origin", r.index_origin},
                    {"dynamics", name_of(r.dynamics, kDynamics)},
                    {"b_init", name_of(r.b_init, kBInits)},
                    {"ub_mode", name_of(r.ub_mode, kUbModes)},
                    {"real_ub_per_j2", r.real_ub_per_j2}};
  return j;
}

ExperimentConfig config_from_json(const json& doc) {
  check_keys(doc, "", {"units", "experiment", "preset", "lattice", "excitation", "timing", "transport",
                       "storage", "dispersion", "reduction"});
  if (present(doc, "units") && get_string(doc["units"], "units") != kUnitsDeclaration) {
    bad("units", std::string("must be \"") + kUnitsDeclaration + "\"");
  }
  if (!present(doc, "experiment")) bad("experiment", "missing");
  ExperimentConfig c;
  c.experiment = get_enum(doc["experiment"], "experiment", kExperiments);
  if (present(doc, "preset")) c.preset = get_string(doc["preset"], "preset");
  if (present(doc, "lattice")) read_lattice(doc["lattice"], c.lattice);
  if (present(doc, "excitation")) read_excitation(doc["excitation"], c.excitation);
  if (present(doc, "timing")) read_timing(doc["timing"], c.timing);
  if (present(doc, "transport")) read_transport(doc["transport"], c.transport);
  if (present(doc, "storage")) read_storage(doc["storage"], c.storage);
  if (present(doc, "dispersion")) read_dispersion(doc["dispersion"], c.dispersion);
  if (present(doc, "reduction")) read_reduction(doc["reduction"], c.reduction);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path.string() + "'", "config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config file '" + path.string() + "' is not valid JSON: " + e.what(), "config");
  }
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (!doc.contains("config")) bad("config", "manifest has no config member");
    return config_from_json(doc["config"]);
  }
  return config_from_json(doc);
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nhl
