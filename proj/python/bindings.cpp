#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nhlattice/config.hpp"
#include "nhlattice/error.hpp"
#include "nhlattice/heatmap.hpp"
#include "nhlattice/io.hpp"
#include "nhlattice/protocols.hpp"

namespace py = pybind11;
using namespace nhl;

namespace {

std::vector<DefectSpec> defects_from(const std::vector<std::tuple<int, double, double>>& raw) {
  std::vector<DefectSpec> out;
  for (const auto& [site, v, xi] : raw) out.push_back({site, v, xi});
  return out;
}

Boundary boundary_from(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw InvalidArgument("boundary must be 'open' or 'periodic'", "boundary");
}

StateVector state_from(const Eigen::VectorXcd& c, const std::vector<int>& labels) {
  StateVector s;
  s.amplitudes.assign(c.data(), c.data() + c.size());
  if (labels.empty()) {
    for (Eigen::Index k = 0; k < c.size(); ++k) s.site_labels.push_back(static_cast<int>(k));
  } else {
    if (labels.size() != static_cast<std::size_t>(c.size())) {
      throw InvalidArgument("labels and amplitudes differ in length", "labels");
    }
    s.site_labels = labels;
  }
  return s;
}

// (samples x sites) complex array
Eigen::MatrixXcd amplitudes_of(const Trajectory& t) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(t.n_samples()), static_cast<Eigen::Index>(t.n_sites()));
  for (std::size_t s = 0; s < t.n_samples(); ++s) {
    for (std::size_t k = 0; k < t.n_sites(); ++k) {
      m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = t.states[s].amplitudes[k];
    }
  }
  return m;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["times"] = t.times;
  d["amplitudes"] = amplitudes_of(t);
  d["site_labels"] = t.n_samples() ? t.site_labels() : std::vector<int>{};
  d["norm"] = t.norm_series;
  d["method"] = to_string(t.method);
  d["exact_route"] = to_string(t.exact_route);
  return d;
}

ExperimentConfig config_from_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what(), "config");
  }
  if (doc.is_object() && doc.contains("manifest_version")) return config_from_json(doc.at("config"));
  return config_from_json(doc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Non-Hermitian tight-binding lattice simulator";
  m.attr("__version__") = NHL_VERSION;

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("dispersion", &dispersion, py::arg("kappa"), py::arg("beta"), py::arg("gamma"), py::arg("phi"),
        py::arg("q"));
  m.def("group_velocity", &group_velocity, py::arg("kappa"), py::arg("q"));
  m.def("parse_phase", &parse_phase, py::arg("text"));

  m.def(
      "chain_hamiltonian",
      [](double kappa, double beta, double gamma, double phi, int n_sites, int index_origin,
         const std::string& boundary, const std::vector<std::tuple<int, double, double>>& defects) {
        ChainSpec spec{kappa, beta, gamma, phi, n_sites, index_origin, boundary_from(boundary), defects_from(defects)};
        const Hamiltonian H = build_chain_hamiltonian(spec);
        return py::make_tuple(H.dense(), H.site_labels());
      },
      py::arg("kappa") = 1.0, py::arg("beta") = 0.0, py::arg("gamma") = 0.0, py::arg("phi") = 0.0,
      py::arg("n_sites"), py::arg("index_origin") = 0, py::arg("boundary") = "open",
      py::arg("defects") = std::vector<std::tuple<int, double, double>>{},
      "Dense chain matrix and its site labels; defects are (site, v_real, xi_imag).");

  m.def(
      "sandwich_hamiltonian",
      [](double kappa, double beta, double gamma, int n_sites, int index_origin, int N, double q0, double V_c,
         double xi) {
        SandwichSpec spec;
        spec.chain = ChainSpec{kappa, beta, gamma, 0.0, n_sites, index_origin, Boundary::open, {}};
        spec.N = N;
        spec.q0 = q0;
        spec.V_c = V_c;
        spec.xi = xi;
        const Hamiltonian H = build_sandwich_hamiltonian(spec);
        return py::make_tuple(H.dense(), H.site_labels());
      },
      py::arg("kappa") = 1.0, py::arg("beta"), py::arg("gamma"), py::arg("n_sites"), py::arg("index_origin"),
      py::arg("N"), py::arg("q0"), py::arg("V_c"), py::arg("xi"));

  m.def(
      "sawtooth_hamiltonian",
      [](double kappa, double J, double theta, double Gamma, std::complex<double> U_b, int n_cells,
         int index_origin) {
        SawtoothSpec spec;
        spec.kappa = kappa;
        spec.J = J;
        spec.theta = theta;
        spec.Gamma = Gamma;
        spec.U_b = U_b;
        spec.n_cells = n_cells;
        spec.index_origin = index_origin;
        return build_sawtooth_hamiltonian(spec).dense();
      },
      py::arg("kappa") = 1.0, py::arg("J"), py::arg("theta"), py::arg("Gamma"), py::arg("U_b"),
      py::arg("n_cells"), py::arg("index_origin") = 0, "Dense matrix in the interleaved basis a1, b1, a2, b2, ...");

  m.def(
      "adiabatic_reduce",
      [](double kappa, double J, double theta, double Gamma, std::complex<double> U_b) {
        SawtoothSpec spec;
        spec.kappa = kappa;
        spec.J = J;
        spec.theta = theta;
        spec.Gamma = Gamma;
        spec.U_b = U_b;
        const AdiabaticReduction r = adiabatic_reduce(spec);
        py::dict d;
        d["J1"] = r.J1;
        d["J2"] = r.J2;
        d["U_eff"] = r.U_eff.empty() ? Complex{} : r.U_eff.front();
        d["adiabaticity_ratio"] = r.adiabaticity_ratio;
        d["adiabaticity_warning"] = r.adiabaticity_warning;
        if (r.chain) {
          d["phi"] = r.chain->phi;
          d["gamma"] = r.chain->gamma;
          d["beta"] = r.chain->beta;
        }
        return d;
      },
      py::arg("kappa") = 1.0, py::arg("J"), py::arg("theta"), py::arg("Gamma"), py::arg("U_b"));

  m.def(
      "evolve",
      [](const Eigen::MatrixXcd& H, const Eigen::VectorXcd& c0, double t_final, double dt, double sample_dt,
         const std::string& method, const std::vector<int>& labels) {
        if (H.rows() != H.cols() || H.rows() != c0.size()) {
          throw InvalidArgument("H must be square and match the state length", "H");
        }
        const StateVector s = state_from(c0, labels);
        Trajectory t;
        if (method == "exact") {
          t = evolve_exact(H, s, t_final, sample_dt);
        } else if (method == "rk4") {
          Eigen::Index lo = 0, hi = 0;
          for (Eigen::Index r = 0; r < H.rows(); ++r) {
            for (Eigen::Index c = 0; c < H.cols(); ++c) {
              if (H(r, c) == Complex{}) continue;
              lo = std::max(lo, r - c);
              hi = std::max(hi, c - r);
            }
          }
          BandMatrix band(static_cast<std::size_t>(H.rows()), static_cast<std::size_t>(lo),
                          static_cast<std::size_t>(hi));
          for (Eigen::Index r = 0; r < H.rows(); ++r) {
            for (Eigen::Index c = 0; c < H.cols(); ++c) {
              if (H(r, c) != Complex{}) band.add(static_cast<std::size_t>(r), static_cast<std::size_t>(c), H(r, c));
            }
          }
          t = evolve_rk4(band, s, t_final, dt, sample_dt);
        } else {
          throw InvalidArgument("method must be 'rk4' or 'exact'", "method");
        }
        return trajectory_dict(t);
      },
      py::arg("H"), py::arg("c0"), py::arg("t_final"), py::arg("dt") = 1e-3, py::arg("sample_dt") = 0.25,
      py::arg("method") = "rk4", py::arg("labels") = std::vector<int>{});

  m.def(
      "fit_gaussian",
      [](const Eigen::VectorXcd& c, const std::vector<int>& labels) {
        const GaussianFit f = fit_gaussian(state_from(c, labels));
        py::dict d;
        d["n0"] = f.n0;
        d["w0"] = f.w0;
        d["amplitude"] = f.amplitude;
        d["fidelity"] = f.fidelity;
        d["degenerate"] = f.degenerate;
        return d;
      },
      py::arg("c"), py::arg("labels") = std::vector<int>{});

  m.def("preset_names", &preset_names);
  m.def(
      "preset_config", [](const std::string& name) { return to_json(preset(name)).dump(); }, py::arg("name"),
      "Preset as a JSON config document.");
  m.def(
      "resolve_config", [](const std::string& text) { return to_json(resolve(config_from_text(text))).dump(); },
      py::arg("config"));
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(config_from_text(text)); }, py::arg("config"));

  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& out_dir, const std::string& format) {
        const ExperimentConfig cfg = config_from_text(text);
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(cfg);
        }
        py::dict d;
        py::dict metrics;
        for (const auto& [k, v] : metrics_record(result)) metrics[py::str(k)] = v;
        d["metrics"] = metrics;
        d["warnings"] = result.warnings;
        d["config"] = to_json(result.config).dump();
        d["trajectory"] = result.trajectory ? py::object(trajectory_dict(*result.trajectory)) : py::none();
        if (!out_dir.empty()) {
          if (format != "csv" && format != "csv+svg") throw InvalidArgument("format must be csv or csv+svg", "format");
          d["artifacts"] = write_outputs(result, out_dir, format == "csv" ? OutputFormat::csv : OutputFormat::csv_svg);
        }
        return d;
      },
      py::arg("config"), py::arg("out_dir") = "", py::arg("format") = "csv+svg",
      "Runs a JSON config (or manifest); writes artifacts when out_dir is given.");
}
