#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nhlattice/analysis.hpp"
#include "nhlattice/dynamics.hpp"
#include "nhlattice/lattice.hpp"

namespace nhl {

enum class Experiment { dispersion_scan, transport_single_site, transport_gaussian, storage, reduction_check };
// forward: release phase phi = -q0; reversed: phi = +q0.
enum class RetrievalPhase { forward, reversed };
enum class Incidence { left, right };
enum class ReductionDynamics { slow_manifold, direct };
enum class BInit { slaved, zero };
// tied: U_b = i J^2 / beta, the effective chain stays fixed while J grows.
// real: U_b = real_ub_per_j2 * J^2 (Hermitian-limit check).
enum class UbMode { tied, real };

using TimeWindow = std::array<double, 2>;

struct LatticeParams {
  double kappa = 1.0;
  double beta = 0.4;
  double gamma = 0.8;
  double phi = 0.0;
  Boundary boundary = Boundary::open;
  std::vector<DefectSpec> defects;
  // Auto-sized from the excitation and t_final when absent.
  std::optional<int> chain_length;
  std::optional<int> index_origin;
};

struct TimingParams {
  double t_final = 60.0;
  double dt = 1e-3;
  double sample_dt = 0.25;
  double t_prime = 30.0;  // storage only
  Method method = Method::rk4;
};

struct TransportParams {
  std::optional<TimeWindow> velocity_window;  // default [2, t_final]
  int reflection_margin = 3;
  std::optional<SiteInterval> barrier;        // default: defect span, or [n0, n0]
  std::optional<double> t_eval;               // default t_final
};

struct StorageParams {
  int N = 3;
  double V_c = 1.0;
  double xi = 0.4;
  RetrievalPhase retrieval = RetrievalPhase::forward;
  Incidence incidence = Incidence::left;
  std::vector<double> xi_sweep;
  double release_settle = 10.0;
  std::optional<TimeWindow> capture_window;  // default [arrival + 1.5, t_prime]
};

struct DispersionParams {
  std::vector<double> phi_list;  // default {0, pi/4, pi/2}
  int q_points = 257;
};

struct ReductionParams {
  std::vector<double> J_list{4.0, 8.0};
  int n_cells = 81;
  int index_origin = -40;
  ReductionDynamics dynamics = ReductionDynamics::slow_manifold;
  BInit b_init = BInit::slaved;
  UbMode ub_mode = UbMode::tied;
  double real_ub_per_j2 = 2.5;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::transport_single_site;
  std::string preset;
  LatticeParams lattice;
  ExcitationSpec excitation;
  TimingParams timing;
  TransportParams transport;
  StorageParams storage;
  DispersionParams dispersion;
  ReductionParams reduction;
};

const char* to_string(Experiment e);
const char* to_string(RetrievalPhase r);
const char* to_string(Incidence i);
const char* to_string(ReductionDynamics d);
const char* to_string(BInit b);
const char* to_string(UbMode m);

// Fills every defaulted field (chain size, windows, barrier) and checks that
// all referenced sites lie on the chain. Idempotent.
ExperimentConfig resolve(const ExperimentConfig& config);

// Chain site range covering n0 -+ (4 w0 + 2 kappa t_final + 10 + 8 (kappa t_final)^(1/3)).
SiteInterval auto_chain_range(const ExcitationSpec& excitation, double kappa, double t_final);

// --- results ---------------------------------------------------------------

struct DispersionRow {
  double phi = 0.0;
  double q = 0.0;
  Complex energy;
  double group_velocity = 0.0;
};

// Normalized norm on either side of the barrier (margin excluded) and in
// between, all from the snapshot at t_eval.
struct TransportMetrics {
  std::vector<double> centroid_series;
  double velocity_estimate = 0.0;
  double reflection_fraction = 0.0;
  double transmission_fraction = 0.0;
  double interior_fraction = 0.0;
  double edge_norm_max = 0.0;

  bool operator==(const TransportMetrics&) const = default;
};

struct StorageMetrics {
  double efficiency = 0.0;
  double shape_fidelity = 0.0;
  double release_velocity = 0.0;
  RetrievalPhase release_direction = RetrievalPhase::forward;
  double incident_velocity = 0.0;
  double capture_fraction = 0.0;  // min over the capture window of the norm in [-N-2, N+2]
  double fit_n0 = 0.0;
  double fit_w0 = 0.0;
  double edge_norm_max = 0.0;
  std::vector<double> sweep_xi;
  std::vector<double> sweep_efficiency;

  bool operator==(const StorageMetrics&) const = default;
};

struct ReductionPoint {
  double J = 0.0;
  Complex U_b;
  double error = 0.0;
  double adiabaticity_ratio = 0.0;
  bool adiabaticity_flag = false;
  int manifold_iterations = 0;

  bool operator==(const ReductionPoint&) const = default;
};

struct ReductionMetrics {
  std::vector<ReductionPoint> points;
  bool monotone = false;

  bool operator==(const ReductionMetrics&) const = default;
};

// |c_n| of the incoming packet at t = 0 and the outgoing one at t_final.
struct StorageProfile {
  double xi = 0.0;
  int site = 0;
  double incoming = 0.0;
  double outgoing = 0.0;
};

inline constexpr double kEdgeNormLimit = 1e-6;

struct ExperimentResult {
  ExperimentConfig config;  // resolved
  std::optional<Trajectory> trajectory;
  std::vector<DispersionRow> scan;
  std::optional<TransportMetrics> transport;
  std::optional<StorageMetrics> storage;
  std::optional<ReductionMetrics> reduction;
  std::vector<StorageProfile> profiles;
  std::vector<std::string> warnings;
};

// --- runners ---------------------------------------------------------------

std::vector<double> uniform_q_grid(int points);
std::vector<DispersionRow> run_dispersion_scan(double kappa, double beta, double gamma,
                                               const std::vector<double>& phi_list,
                                               const std::vector<double>& q_grid);

// Chain (with defects) for a transport config, and the two storage stages.
Hamiltonian transport_hamiltonian(const ExperimentConfig& resolved);
Hamiltonian storage_capture_hamiltonian(const ExperimentConfig& resolved, double xi);
Hamiltonian storage_release_hamiltonian(const ExperimentConfig& resolved);

ExperimentResult run_transport(const ExperimentConfig& config);
ExperimentResult run_storage(const ExperimentConfig& config);
ExperimentResult run_reduction_check(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

// Slow invariant subspace B = X A of a sawtooth operator with uniform U_b.
struct SlowManifold {
  Eigen::MatrixXcd X;
  Eigen::MatrixXcd hamiltonian;  // H_AA + H_AB X, acting on A amplitudes
  int iterations = 0;
};
SlowManifold slow_manifold(const SawtoothOperator& op, Complex U_b);

// Error between the sawtooth A-profiles and the effective chain for one J.
ReductionPoint reduction_point(const ExperimentConfig& resolved, double J);

// --- presets ---------------------------------------------------------------

std::vector<std::string> preset_names();
// Throws InvalidArgument("unknown preset ...", "preset").
ExperimentConfig preset(const std::string& name);

}  // namespace nhl
