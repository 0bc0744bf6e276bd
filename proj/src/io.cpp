#include "nhlattice/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "nhlattice/config.hpp"
#include "nhlattice/error.hpp"
#include "nhlattice/heatmap.hpp"

#ifndef NHL_VERSION
#define NHL_VERSION "0.0.0"
#endif

namespace nhl {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("cannot parse number '" + text + "'");
  return v;
}

namespace {

int parse_int(const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("cannot parse integer '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) s += ',';
    s += format_double(xs[k]);
  }
  return s;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item));
  return out;
}

template <typename T, typename F>
std::string format_each(const std::vector<T>& xs, F f) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) s += ',';
    s += f(xs[k]);
  }
  return s;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw InvalidArgument("cannot parse boolean '" + text + "'");
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,site,re,im\n";
  out.reserve(out.size() + traj.n_samples() * traj.n_sites() * 64);
  for (std::size_t s = 0; s < traj.n_samples(); ++s) {
    const std::string t = format_double(traj.times[s]);
    const StateVector& c = traj.states[s];
    for (std::size_t k = 0; k < c.size(); ++k) {
      out += t;
      out += ',';
      out += std::to_string(c.site_labels[k]);
      out += ',';
      out += format_double(c.amplitudes[k].real());
      out += ',';
      out += format_double(c.amplitudes[k].imag());
      out += '\n';
    }
  }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,site,re,im") {
    throw InvalidArgument("trajectory csv must start with the header t,site,re,im");
  }
  Trajectory traj;
  std::string last_t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 4) throw InvalidArgument("malformed trajectory row '" + line + "'");
    if (traj.states.empty() || cols[0] != last_t) {
      traj.times.push_back(parse_double(cols[0]));
      traj.states.emplace_back();
      last_t = cols[0];
    }
    StateVector& c = traj.states.back();
    c.site_labels.push_back(parse_int(cols[1]));
    c.amplitudes.emplace_back(parse_double(cols[2]), parse_double(cols[3]));
  }
  for (const auto& c : traj.states) {
    if (c.site_labels != traj.states.front().site_labels) {
      throw InvalidArgument("trajectory samples do not share one site list");
    }
    traj.norm_series.push_back(c.norm());
  }
  return traj;
}

std::string dispersion_csv(const std::vector<DispersionRow>& rows) {
  std::string out = "phi,q,reE,imE,vg\n";
  for (const auto& r : rows) {
    out += format_double(r.phi) + ',' + format_double(r.q) + ',' + format_double(r.energy.real()) + ',' +
           format_double(r.energy.imag()) + ',' + format_double(r.group_velocity) + '\n';
  }
  return out;
}

std::string reduction_csv(const ReductionMetrics& metrics) {
  std::string out = "J,reUb,imUb,error,adiabaticity_ratio,adiabaticity_flag,manifold_iterations\n";
  for (const auto& p : metrics.points) {
    out += format_double(p.J) + ',' + format_double(p.U_b.real()) + ',' + format_double(p.U_b.imag()) + ',' +
           format_double(p.error) + ',' + format_double(p.adiabaticity_ratio) + ',' +
           bool_text(p.adiabaticity_flag) + ',' + std::to_string(p.manifold_iterations) + '\n';
  }
  return out;
}

std::string profiles_csv(const std::vector<StorageProfile>& profiles) {
  std::string out = "xi,site,incoming,outgoing\n";
  for (const auto& p : profiles) {
    out += format_double(p.xi) + ',' + std::to_string(p.site) + ',' + format_double(p.incoming) + ',' +
           format_double(p.outgoing) + '\n';
  }
  return out;
}

std::string format_metrics(const MetricsRecord& record) {
  std::string out;
  for (const auto& [key, value] : record) {
    if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw InvalidArgument("metric '" + key + "' cannot be written as a key=value line");
    }
    out += key + '=' + value + '\n';
  }
  return out;
}

MetricsRecord parse_metrics(const std::string& text) {
  MetricsRecord record;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto pos = line.find('=');
    if (pos == std::string::npos) throw InvalidArgument("malformed metrics line '" + line + "'");
    record.emplace_back(line.substr(0, pos), line.substr(pos + 1));
  }
  return record;
}

const std::string& metric(const MetricsRecord& record, const std::string& key) {
  for (const auto& [k, v] : record) {
    if (k == key) return v;
  }
  throw InvalidArgument("metric '" + key + "' is missing", key);
}

MetricsRecord metrics_record(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  MetricsRecord r;
  r.emplace_back("experiment", to_string(c.experiment));
  r.emplace_back("preset", c.preset);
  r.emplace_back("config_hash", config_hash(c));
  if (c.experiment == Experiment::dispersion_scan) {
    r.emplace_back("q_points", std::to_string(c.dispersion.q_points));
    r.emplace_back("phi_list", format_list(c.dispersion.phi_list));
    std::vector<double> max_im, argmax;
    for (double phi : c.dispersion.phi_list) {
      double best = -1e300, at = 0.0;
      for (const auto& row : result.scan) {
        if (row.phi == phi && row.energy.imag() > best) {
          best = row.energy.imag();
          at = row.q;
        }
      }
      max_im.push_back(best);
      argmax.push_back(at);
    }
    r.emplace_back("max_imag_energy", format_list(max_im));
    r.emplace_back("argmax_q", format_list(argmax));
  }
  if (result.transport) {
    const auto& m = *result.transport;
    r.emplace_back("velocity_estimate", format_double(m.velocity_estimate));
    r.emplace_back("reflection_fraction", format_double(m.reflection_fraction));
    r.emplace_back("transmission_fraction", format_double(m.transmission_fraction));
    r.emplace_back("interior_fraction", format_double(m.interior_fraction));
    r.emplace_back("edge_norm_max", format_double(m.edge_norm_max));
    r.emplace_back("centroid_series", format_list(m.centroid_series));
  }
  if (result.storage) {
    const auto& m = *result.storage;
    r.emplace_back("efficiency", format_double(m.efficiency));
    r.emplace_back("shape_fidelity", format_double(m.shape_fidelity));
    r.emplace_back("release_velocity", format_double(m.release_velocity));
    r.emplace_back("release_direction", to_string(m.release_direction));
    r.emplace_back("incident_velocity", format_double(m.incident_velocity));
    r.emplace_back("capture_fraction", format_double(m.capture_fraction));
    r.emplace_back("fit_n0", format_double(m.fit_n0));
    r.emplace_back("fit_w0", format_double(m.fit_w0));
    r.emplace_back("edge_norm_max", format_double(m.edge_norm_max));
    r.emplace_back("sweep_xi", format_list(m.sweep_xi));
    r.emplace_back("sweep_efficiency", format_list(m.sweep_efficiency));
  }
  if (result.reduction) {
    const auto& pts = result.reduction->points;
    r.emplace_back("J", format_each(pts, [](const ReductionPoint& p) { return format_double(p.J); }));
    r.emplace_back("U_b_re", format_each(pts, [](const ReductionPoint& p) { return format_double(p.U_b.real()); }));
    r.emplace_back("U_b_im", format_each(pts, [](const ReductionPoint& p) { return format_double(p.U_b.imag()); }));
    r.emplace_back("error", format_each(pts, [](const ReductionPoint& p) { return format_double(p.error); }));
    r.emplace_back("adiabaticity_ratio",
                   format_each(pts, [](const ReductionPoint& p) { return format_double(p.adiabaticity_ratio); }));
    r.emplace_back("adiabaticity_flag",
                   format_each(pts, [](const ReductionPoint& p) { return std::string(bool_text(p.adiabaticity_flag)); }));
    r.emplace_back("manifold_iterations",
                   format_each(pts, [](const ReductionPoint& p) { return std::to_string(p.manifold_iterations); }));
    r.emplace_back("monotone", bool_text(result.reduction->monotone));
  }
  std::string warnings;
  for (const auto& w : result.warnings) {
    if (!warnings.empty()) warnings += " | ";
    warnings += w;
  }
  r.emplace_back("warnings", warnings);
  return r;
}

TransportMetrics transport_metrics_from(const MetricsRecord& r) {
  TransportMetrics m;
  m.velocity_estimate = parse_double(metric(r, "velocity_estimate"));
  m.reflection_fraction = parse_double(metric(r, "reflection_fraction"));
  m.transmission_fraction = parse_double(metric(r, "transmission_fraction"));
  m.interior_fraction = parse_double(metric(r, "interior_fraction"));
  m.edge_norm_max = parse_double(metric(r, "edge_norm_max"));
  m.centroid_series = parse_list(metric(r, "centroid_series"));
  return m;
}

StorageMetrics storage_metrics_from(const MetricsRecord& r) {
  StorageMetrics m;
  m.efficiency = parse_double(metric(r, "efficiency"));
  m.shape_fidelity = parse_double(metric(r, "shape_fidelity"));
  m.release_velocity = parse_double(metric(r, "release_velocity"));
  const std::string& dir = metric(r, "release_direction");
  if (dir == "forward") {
    m.release_direction = RetrievalPhase::forward;
  } else if (dir == "reversed") {
    m.release_direction = RetrievalPhase::reversed;
  } else {
    throw InvalidArgument("unknown release_direction '" + dir + "'", "release_direction");
  }
  m.incident_velocity = parse_double(metric(r, "incident_velocity"));
  m.capture_fraction = parse_double(metric(r, "capture_fraction"));
  m.fit_n0 = parse_double(metric(r, "fit_n0"));
  m.fit_w0 = parse_double(metric(r, "fit_w0"));
  m.edge_norm_max = parse_double(metric(r, "edge_norm_max"));
  m.sweep_xi = parse_list(metric(r, "sweep_xi"));
  m.sweep_efficiency = parse_list(metric(r, "sweep_efficiency"));
  return m;
}

ReductionMetrics reduction_metrics_from(const MetricsRecord& r) {
  const auto J = parse_list(metric(r, "J"));
  const auto re = parse_list(metric(r, "U_b_re"));
  const auto im = parse_list(metric(r, "U_b_im"));
  const auto err = parse_list(metric(r, "error"));
  const auto ratio = parse_list(metric(r, "adiabaticity_ratio"));
  const auto flags = split(metric(r, "adiabaticity_flag"), ',');
  const auto iters = split(metric(r, "manifold_iterations"), ',');
  const std::size_t n = J.size();
  if (re.size() != n || im.size() != n || err.size() != n || ratio.size() != n || flags.size() != n ||
      iters.size() != n) {
    throw InvalidArgument("reduction metrics lists differ in length", "J");
  }
  ReductionMetrics m;
  for (std::size_t k = 0; k < n; ++k) {
    m.points.push_back({J[k], Complex(re[k], im[k]), err[k], ratio[k], parse_bool(flags[k]), parse_int(iters[k])});
  }
  m.monotone = parse_bool(metric(r, "monotone"));
  return m;
}

nlohmann::json manifest_json(const ExperimentResult& result, const std::vector<std::string>& artifacts) {
  nlohmann::json methods;
  methods["integrator"] = to_string(result.config.timing.method);
  if (result.trajectory) {
    methods["exact_route"] = to_string(result.trajectory->exact_route);
  }
  if (result.config.experiment == Experiment::reduction_check) {
    methods["reduction_dynamics"] = to_string(result.config.reduction.dynamics);
  }
  return {{"manifest_version", kManifestVersion},
          {"tool", "nhlattice"},
          {"version", NHL_VERSION},
          {"config_hash", config_hash(result.config)},
          {"config", to_json(result.config)},
          {"methods", methods},
          {"artifacts", artifacts},
          {"warnings", result.warnings}};
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::vector<std::string> write_outputs(const ExperimentResult& result, const fs::path& out_dir,
                                       OutputFormat format) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory '" + out_dir.string() + "'", "out");

  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    atomic_write(out_dir / name, content);
    written.push_back(name);
  };
  if (!result.scan.empty()) put("dispersion.csv", dispersion_csv(result.scan));
  if (result.trajectory) put("trajectory.csv", trajectory_csv(*result.trajectory));
  if (!result.profiles.empty()) put("profiles.csv", profiles_csv(result.profiles));
  if (result.reduction) put("reduction.csv", reduction_csv(*result.reduction));
  put("metrics.txt", format_metrics(metrics_record(result)));
  if (format == OutputFormat::csv_svg && result.trajectory) {
    const std::string title = result.config.preset.empty() ? to_string(result.config.experiment)
                                                           : result.config.preset;
    put("heatmap.svg", render_heatmap(*result.trajectory, title));
  }
  put("manifest.json", manifest_json(result, written).dump(2) + "\n");
  return written;
}

}  // namespace nhl
