#include "nhlattice/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nhlattice/error.hpp"

namespace nhl {
namespace {

constexpr double kPi = std::numbers::pi;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double edge_norm_max(const Trajectory& traj) {
  double m = 0.0;
  for (const auto& s : traj.states) {
    const double total = s.norm();
    if (!(total > 0.0)) continue;
    m = std::max({m, std::norm(s.amplitudes.front()) / total, std::norm(s.amplitudes.back()) / total});
  }
  return m;
}

ChainSpec chain_from(const ExperimentConfig& c) {
  ChainSpec spec;
  spec.kappa = c.lattice.kappa;
  spec.beta = c.lattice.beta;
  spec.gamma = c.lattice.gamma;
  spec.phi = c.lattice.phi;
  spec.n_sites = *c.lattice.chain_length;
  spec.index_origin = *c.lattice.index_origin;
  spec.boundary = c.lattice.boundary;
  spec.defects = c.lattice.defects;
  return spec;
}

Trajectory evolve(const Hamiltonian& H, const StateVector& c0, const TimingParams& t) {
  return t.method == Method::rk4 ? evolve_rk4(H, c0, t.t_final, t.dt, t.sample_dt)
                                 : evolve_exact(H, c0, t.t_final, t.sample_dt);
}

void require_on_chain(int site, const ExperimentConfig& c, const char* key) {
  const int lo = *c.lattice.index_origin;
  const int hi = lo + *c.lattice.chain_length - 1;
  if (site < lo || site > hi) {
    throw InvalidArgument(std::string(key) + "=" + std::to_string(site) + " lies outside the chain [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]",
                          key);
  }
}

// Wave number used in the sandwich hoppings; a right-incident packet sees the
// mirror structure, i.e. q0 -> -q0.
double sandwich_q(const ExperimentConfig& c) {
  return c.storage.incidence == Incidence::left ? c.excitation.q0 : -c.excitation.q0;
}

double release_phi(const ExperimentConfig& c) {
  return c.storage.retrieval == RetrievalPhase::forward ? -c.excitation.q0 : c.excitation.q0;
}

bool is_transport(Experiment e) {
  return e == Experiment::transport_single_site || e == Experiment::transport_gaussian;
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::dispersion_scan:
      return "dispersion_scan";
    case Experiment::transport_single_site:
      return "transport_single_site";
    case Experiment::transport_gaussian:
      return "transport_gaussian";
    case Experiment::storage:
      return "storage";
    case Experiment::reduction_check:
      return "reduction_check";
  }
  return "?";
}
const char* to_string(RetrievalPhase r) { return r == RetrievalPhase::forward ? "forward" : "reversed"; }
const char* to_string(Incidence i) { return i == Incidence::left ? "left" : "right"; }
const char* to_string(ReductionDynamics d) {
  return d == ReductionDynamics::slow_manifold ? "slow_manifold" : "direct";
}
const char* to_string(BInit b) { return b == BInit::slaved ? "slaved" : "zero"; }
const char* to_string(UbMode m) { return m == UbMode::tied ? "tied" : "real"; }

SiteInterval auto_chain_range(const ExcitationSpec& excitation, double kappa, double t_final) {
  // The ballistic front carries an Airy tail of width ~ (kappa t)^(1/3) past
  // the light cone at 2 kappa t.
  const double kt = std::abs(kappa) * t_final;
  const double reach = 4.0 * excitation.width() + 2.0 * kt + 10.0 + 8.0 * std::cbrt(kt);
  const int r = static_cast<int>(std::ceil(reach));
  return {excitation.n0 - r, excitation.n0 + r};
}

ExperimentConfig resolve(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  auto& lat = c.lattice;
  auto& tm = c.timing;
  for (auto [v, key] : {std::pair{lat.kappa, "lattice.kappa"}, {lat.beta, "lattice.beta"},
                        {lat.gamma, "lattice.gamma"}, {lat.phi, "lattice.phi"},
                        {tm.t_final, "timing.t_final"}, {tm.dt, "timing.dt"},
                        {tm.sample_dt, "timing.sample_dt"}, {tm.t_prime, "timing.t_prime"}}) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(key) + " must be finite", key);
  }
  if (lat.kappa <= 0.0) throw InvalidArgument("kappa must be positive", "lattice.kappa");
  if (lat.beta < 0.0) throw InvalidArgument("beta must be non-negative", "lattice.beta");
  if (tm.t_final < 0.0) throw InvalidArgument("t_final must be non-negative", "timing.t_final");
  if (tm.dt <= 0.0) throw InvalidArgument("dt must be positive", "timing.dt");
  if (tm.sample_dt <= 0.0) throw InvalidArgument("sample_dt must be positive", "timing.sample_dt");
  lat.phi = reduce_phase(lat.phi);
  c.excitation.q0 = reduce_phase(c.excitation.q0);

  if (c.experiment == Experiment::dispersion_scan) {
    if (c.dispersion.phi_list.empty()) c.dispersion.phi_list = {0.0, kPi / 4.0, kPi / 2.0};
    for (auto& p : c.dispersion.phi_list) p = reduce_phase(p);
    if (c.dispersion.q_points < 2) {
      throw InvalidArgument("q_points must be at least 2", "dispersion.q_points");
    }
    return c;
  }

  if (c.experiment == Experiment::reduction_check) {
    auto& r = c.reduction;
    if (r.J_list.empty()) throw InvalidArgument("J_list must not be empty", "reduction.J_list");
    for (double J : r.J_list) {
      if (!(J > 0.0) || !std::isfinite(J)) throw InvalidArgument("J must be positive", "reduction.J_list");
    }
    if (r.n_cells < 2) throw InvalidArgument("n_cells must be at least 2", "reduction.n_cells");
    if (r.ub_mode == UbMode::tied && !(lat.beta > 0.0)) {
      throw InvalidArgument("tied U_b = iJ^2/beta needs beta > 0", "lattice.beta");
    }
    if (r.ub_mode == UbMode::real && !(r.real_ub_per_j2 != 0.0 && std::isfinite(r.real_ub_per_j2))) {
      throw InvalidArgument("real_ub_per_j2 must be non-zero", "reduction.real_ub_per_j2");
    }
    if (!lat.defects.empty()) {
      throw InvalidArgument("reduction check does not take defects", "lattice.defects");
    }
    lat.chain_length = r.n_cells;
    lat.index_origin = r.index_origin;
    require_on_chain(c.excitation.n0, c, "excitation.n0");
    return c;
  }

  if (c.experiment == Experiment::transport_single_site &&
      c.excitation.kind != ExcitationKind::single_site) {
    throw InvalidArgument("transport_single_site needs a single_site excitation", "excitation.type");
  }
  if ((c.experiment == Experiment::transport_gaussian || c.experiment == Experiment::storage) &&
      c.excitation.kind != ExcitationKind::gaussian) {
    throw InvalidArgument("experiment needs a gaussian excitation", "excitation.type");
  }
  if (c.excitation.kind == ExcitationKind::gaussian && !(c.excitation.w0 > 0.0)) {
    throw InvalidArgument("w0 must be positive", "excitation.w0");
  }

  if (!lat.chain_length || !lat.index_origin) {
    SiteInterval range = auto_chain_range(c.excitation, lat.kappa, tm.t_final);
    for (const auto& d : lat.defects) {
      range.first = std::min(range.first, d.site - 10);
      range.last = std::max(range.last, d.site + 10);
    }
    if (c.experiment == Experiment::storage) {
      range.first = std::min(range.first, -c.storage.N - 10);
      range.last = std::max(range.last, c.storage.N + 10);
    }
    if (!lat.chain_length && !lat.index_origin) {
      lat.index_origin = range.first;
      lat.chain_length = range.last - range.first + 1;
    } else if (!lat.index_origin) {
      lat.index_origin = -(*lat.chain_length - 1) / 2;
    } else {
      lat.chain_length = std::max(range.last, *lat.index_origin + 1) - *lat.index_origin + 1;
    }
  }
  if (*lat.chain_length < 2) throw InvalidArgument("chain_length must be at least 2", "lattice.chain_length");
  require_on_chain(c.excitation.n0, c, "excitation.n0");
  for (const auto& d : lat.defects) require_on_chain(d.site, c, "lattice.defects.site");

  if (is_transport(c.experiment)) {
    auto& t = c.transport;
    if (!t.velocity_window) t.velocity_window = TimeWindow{std::min(2.0, tm.t_final), tm.t_final};
    if (!t.t_eval) t.t_eval = tm.t_final;
    if (!t.barrier) {
      if (lat.defects.empty()) {
        t.barrier = SiteInterval{c.excitation.n0, c.excitation.n0};
      } else {
        const auto [lo, hi] = std::minmax_element(
            lat.defects.begin(), lat.defects.end(),
            [](const DefectSpec& a, const DefectSpec& b) { return a.site < b.site; });
        t.barrier = SiteInterval{lo->site, hi->site};
      }
    }
    if (t.barrier->first > t.barrier->last) {
      throw InvalidArgument("barrier interval is reversed", "transport.barrier");
    }
    const auto& w = *t.velocity_window;
    if (!(w[0] >= 0.0 && w[0] < w[1] && w[1] <= tm.t_final)) {
      throw InvalidArgument("velocity_window must satisfy 0 <= start < end <= t_final", "transport.velocity_window");
    }
    if (!(*t.t_eval >= 0.0 && *t.t_eval <= tm.t_final)) {
      throw InvalidArgument("t_eval must lie in [0, t_final]", "transport.t_eval");
    }
    if (t.reflection_margin < 0) {
      throw InvalidArgument("reflection_margin must be non-negative", "transport.reflection_margin");
    }
    return c;
  }

  // storage
  auto& s = c.storage;
  if (s.N < 1) throw InvalidArgument("N must be positive", "storage.N");
  if (lat.boundary != Boundary::open) {
    throw InvalidArgument("storage needs an open chain", "lattice.boundary");
  }
  require_on_chain(-s.N - 1, c, "storage.N");
  require_on_chain(s.N + 1, c, "storage.N");
  if (!(tm.t_prime > 0.0 && tm.t_prime < tm.t_final)) {
    throw InvalidArgument("t_prime must lie in (0, t_final)", "timing.t_prime");
  }
  for (auto [v, key] : {std::pair{s.V_c, "storage.V_c"}, {s.xi, "storage.xi"},
                        {s.release_settle, "storage.release_settle"}}) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(key) + " must be finite", key);
  }
  for (double x : s.xi_sweep) {
    if (!std::isfinite(x)) throw InvalidArgument("xi_sweep entries must be finite", "storage.xi_sweep");
  }
  const double speed = std::abs(group_velocity(lat.kappa, c.excitation.q0));
  if (!(speed > 0.0)) throw InvalidArgument("incident packet has zero group velocity", "excitation.q0");
  if (!s.capture_window) {
    const double distance = s.incidence == Incidence::left ? (-s.N - c.excitation.n0)
                                                           : (c.excitation.n0 - s.N);
    const double start = std::clamp(distance / speed + 1.5, 0.0, tm.t_prime);
    s.capture_window = TimeWindow{start, tm.t_prime};
  }
  if (tm.t_prime + s.release_settle >= tm.t_final) {
    throw InvalidArgument("release window [t_prime + release_settle, t_final] is empty",
                          "storage.release_settle");
  }
  return c;
}

std::vector<double> uniform_q_grid(int points) {
  if (points < 2) throw InvalidArgument("q grid needs at least 2 points", "dispersion.q_points");
  std::vector<double> q(static_cast<std::size_t>(points));
  const double intervals = points - 1;
  for (int k = 0; k < points; ++k) {
    q[static_cast<std::size_t>(k)] = kPi * (2.0 * k - intervals) / intervals;
  }
  return q;
}

std::vector<DispersionRow> run_dispersion_scan(double kappa, double beta, double gamma,
                                               const std::vector<double>& phi_list,
                                               const std::vector<double>& q_grid) {
  for (double q : q_grid) {
    if (!(q >= -kPi && q <= kPi)) throw InvalidArgument("q grid must lie in [-pi, pi]", "dispersion.q_points");
  }
  std::vector<DispersionRow> rows;
  rows.reserve(phi_list.size() * q_grid.size());
  for (double phi : phi_list) {
    for (double q : q_grid) {
      rows.push_back({phi, q, dispersion(kappa, beta, gamma, phi, q), group_velocity(kappa, q)});
    }
  }
  return rows;
}

Hamiltonian transport_hamiltonian(const ExperimentConfig& resolved) {
  return build_chain_hamiltonian(chain_from(resolved));
}

Hamiltonian storage_capture_hamiltonian(const ExperimentConfig& resolved, double xi) {
  SandwichSpec spec;
  spec.chain = chain_from(resolved);
  spec.N = resolved.storage.N;
  spec.q0 = sandwich_q(resolved);
  spec.V_c = resolved.storage.V_c;
  spec.xi = xi;
  return build_sandwich_hamiltonian(spec);
}

Hamiltonian storage_release_hamiltonian(const ExperimentConfig& resolved) {
  ChainSpec spec = chain_from(resolved);
  spec.phi = release_phi(resolved);
  for (int site : {-resolved.storage.N, resolved.storage.N}) {
    auto it = std::find_if(spec.defects.begin(), spec.defects.end(),
                           [&](const DefectSpec& d) { return d.site == site; });
    if (it != spec.defects.end()) {
      it->v_real += resolved.storage.V_c;
    } else {
      spec.defects.push_back({site, resolved.storage.V_c, 0.0});
    }
  }
  return build_chain_hamiltonian(spec);
}

ExperimentResult run_transport(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = resolve(config);
  const auto& c = result.config;
  if (!is_transport(c.experiment)) throw InvalidArgument("not a transport experiment", "experiment");

  const Hamiltonian H = transport_hamiltonian(c);
  const Excitation ex = make_excitation(c.excitation, H.site_labels());
  if (ex.clearance_warning) result.warnings.push_back("excitation closer than 4 w0 to a chain end");
  Trajectory traj = evolve(H, ex.state, c.timing);

  TransportMetrics m;
  m.centroid_series.reserve(traj.n_samples());
  for (const auto& s : traj.states) m.centroid_series.push_back(centroid(s));
  const auto& window = *c.transport.velocity_window;
  m.velocity_estimate = centroid_velocity(traj, window[0], window[1]);

  const StateVector& snap = traj.states[traj.nearest_sample(*c.transport.t_eval)];
  const int lo = *c.lattice.index_origin;
  const int hi = lo + *c.lattice.chain_length - 1;
  const int margin = c.transport.reflection_margin;
  const int refl_last = c.transport.barrier->first - margin;
  const int trans_first = c.transport.barrier->last + margin;
  m.reflection_fraction = refl_last >= lo ? region_norm_fraction(snap, {lo, refl_last}) : 0.0;
  m.transmission_fraction = trans_first <= hi ? region_norm_fraction(snap, {trans_first, hi}) : 0.0;
  const SiteInterval interior{std::max(lo, refl_last + 1), std::min(hi, trans_first - 1)};
  m.interior_fraction = interior.first <= interior.last ? region_norm_fraction(snap, interior) : 0.0;
  m.edge_norm_max = edge_norm_max(traj);
  if (m.edge_norm_max >= kEdgeNormLimit) {
    result.warnings.push_back("normalized norm at a chain end reached " + std::to_string(m.edge_norm_max));
  }
  result.transport = std::move(m);
  result.trajectory = std::move(traj);
  return result;
}

namespace {

struct StorageRun {
  Trajectory traj;
  double efficiency = 0.0;
};

Trajectory storage_trajectory(const ExperimentConfig& c, double xi, const StateVector& c0) {
  Schedule schedule({{0.0, storage_capture_hamiltonian(c, xi)},
                     {c.timing.t_prime, storage_release_hamiltonian(c)}});
  return c.timing.method == Method::rk4
             ? evolve_schedule(schedule, c0, c.timing.t_final, c.timing.dt, c.timing.sample_dt)
             : evolve_exact(schedule, c0, c.timing.t_final, c.timing.sample_dt);
}

}  // namespace

ExperimentResult run_storage(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = resolve(config);
  const auto& c = result.config;
  if (c.experiment != Experiment::storage) throw InvalidArgument("not a storage experiment", "experiment");
  const auto& s = c.storage;

  const int lo = *c.lattice.index_origin;
  const int hi = lo + *c.lattice.chain_length - 1;
  const ChainSpec chain = chain_from(c);
  const Excitation ex = make_excitation(c.excitation, chain.site_labels());
  if (ex.clearance_warning) result.warnings.push_back("excitation closer than 4 w0 to a chain end");

  const double v_in = group_velocity(c.lattice.kappa, c.excitation.q0);
  const int expected_sign = s.retrieval == RetrievalPhase::forward ? sign_of(v_in) : -sign_of(v_in);
  const SiteInterval left_side{lo, -s.N - 1};
  const SiteInterval right_side{s.N + 1, hi};
  const SiteInterval in_region = s.incidence == Incidence::left ? left_side : right_side;
  const SiteInterval out_region = expected_sign > 0 ? right_side : left_side;

  Trajectory traj = storage_trajectory(c, s.xi, ex.state);

  StorageMetrics m;
  m.incident_velocity = v_in;
  m.capture_fraction = 1.0;
  const auto& cw = *s.capture_window;
  for (std::size_t k = 0; k < traj.n_samples(); ++k) {
    if (traj.times[k] >= cw[0] - 1e-9 && traj.times[k] <= cw[1] + 1e-9) {
      m.capture_fraction = std::min(m.capture_fraction,
                                    region_norm_fraction(traj.states[k], {-s.N - 2, s.N + 2}));
    }
  }
  m.release_velocity = centroid_velocity(traj, c.timing.t_prime + s.release_settle, traj.times.back());
  m.release_direction = sign_of(m.release_velocity) == sign_of(v_in) ? RetrievalPhase::forward
                                                                      : RetrievalPhase::reversed;
  const double t_end = traj.times.back();
  m.efficiency = storage_efficiency(traj, 0.0, t_end, in_region, out_region);
  const GaussianFit fit = fit_gaussian(restrict_to(traj.states.back(), out_region));
  m.shape_fidelity = fit.fidelity;
  m.fit_n0 = fit.n0;
  m.fit_w0 = fit.w0;
  if (fit.degenerate) result.warnings.push_back("gaussian fit of the released packet is degenerate");
  m.edge_norm_max = edge_norm_max(traj);
  if (m.edge_norm_max >= kEdgeNormLimit) {
    result.warnings.push_back("normalized norm at a chain end reached " + std::to_string(m.edge_norm_max));
  }

  auto add_profile = [&](double xi, const Trajectory& t) {
    const auto& first = t.states.front();
    const auto& last = t.states.back();
    for (std::size_t k = 0; k < first.size(); ++k) {
      result.profiles.push_back({xi, first.site_labels[k], std::abs(first.amplitudes[k]),
                                 std::abs(last.amplitudes[k])});
    }
  };
  if (!s.xi_sweep.empty()) {
    for (double xi : s.xi_sweep) {
      const Trajectory t = xi == s.xi ? traj : storage_trajectory(c, xi, ex.state);
      m.sweep_xi.push_back(xi);
      m.sweep_efficiency.push_back(storage_efficiency(t, 0.0, t.times.back(), in_region, out_region));
      add_profile(xi, t);
    }
  }
  result.storage = std::move(m);
  result.trajectory = std::move(traj);
  return result;
}

SlowManifold slow_manifold(const SawtoothOperator& op, Complex U_b) {
  const Eigen::MatrixXcd D = op.dense();
  const Eigen::Index n = op.n_cells();
  Eigen::MatrixXcd A(n, n), B(n, n), C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      A(i, j) = D(2 * i, 2 * j);
      B(i, j) = D(2 * i, 2 * j + 1);
      C(i, j) = D(2 * i + 1, 2 * j);
      const Complex expected = i == j ? U_b : Complex{};
      if (D(2 * i + 1, 2 * j + 1) != expected) {
        throw InvalidArgument("slow manifold needs a uniform, uncoupled B sublattice");
      }
    }
  }
  // Invariance of b = X a: X (A + B X) = C + U_b X.
  SlowManifold sm;
  sm.X = -C / U_b;
  for (sm.iterations = 1; sm.iterations <= 500; ++sm.iterations) {
    Eigen::MatrixXcd next = (sm.X * (A + B * sm.X) - C) / U_b;
    const double change = (next - sm.X).norm();
    sm.X = std::move(next);
    if (!sm.X.allFinite()) break;
    if (change <= 1e-14 * sm.X.norm()) {
      sm.hamiltonian = A + B * sm.X;
      return sm;
    }
  }
  throw NumericalError("slow-manifold iteration did not converge; |U_b| too small for adiabatic elimination");
}

ReductionPoint reduction_point(const ExperimentConfig& c, double J) {
  const auto& r = c.reduction;
  const auto& lat = c.lattice;
  SawtoothSpec spec;
  spec.kappa = lat.kappa;
  spec.J = J;
  spec.theta = lat.phi / 2.0;
  spec.n_cells = r.n_cells;
  spec.index_origin = r.index_origin;
  if (r.ub_mode == UbMode::tied) {
    spec.U_b = Complex{0.0, J * J / lat.beta};
    spec.Gamma = lat.gamma + 2.0 * lat.beta;
  } else {
    spec.U_b = Complex{r.real_ub_per_j2 * J * J, 0.0};
    spec.Gamma = lat.gamma;
  }

  const SawtoothOperator op = build_sawtooth_hamiltonian(spec);
  const AdiabaticReduction red = adiabatic_reduce(spec);
  const Hamiltonian effective = build_effective_hamiltonian(red);
  const StateVector a0 = make_excitation(c.excitation, op.cell_labels()).state;
  const auto& tm = c.timing;

  ReductionPoint p;
  p.J = J;
  p.U_b = spec.U_b;
  p.adiabaticity_ratio = red.adiabaticity_ratio;
  p.adiabaticity_flag = red.adiabaticity_warning;

  std::vector<StateVector> full_a;
  if (r.dynamics == ReductionDynamics::slow_manifold) {
    const SlowManifold sm = slow_manifold(op, spec.U_b);
    p.manifold_iterations = sm.iterations;
    full_a = evolve_exact(sm.hamiltonian, a0, tm.t_final, tm.sample_dt).states;
  } else {
    StateVector full;
    full.amplitudes.assign(op.dim(), Complex{});
    full.site_labels = op.interleaved_labels();
    const Complex up = std::exp(Complex{0.0, spec.theta});
    const Complex down = std::exp(Complex{0.0, -spec.theta});
    for (int k = 0; k < spec.n_cells; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const Complex a = a0.amplitudes[ku];
      const Complex a_next = k + 1 < spec.n_cells ? a0.amplitudes[ku + 1] : Complex{};
      full.amplitudes[2 * ku] = a;
      if (r.b_init == BInit::slaved) {
        full.amplitudes[2 * ku + 1] = -J * (up * a_next + down * a) / spec.U_b;
      }
    }
    const Trajectory t = evolve_exact(op.dense(), full, tm.t_final, tm.sample_dt);
    for (const auto& s : t.states) {
      StateVector a;
      a.site_labels = a0.site_labels;
      for (std::size_t k = 0; k < a0.size(); ++k) a.amplitudes.push_back(s.amplitudes[2 * k]);
      full_a.push_back(std::move(a));
    }
  }
  const Trajectory eff = evolve_exact(effective, a0, tm.t_final, tm.sample_dt);

  for (std::size_t k = 0; k < eff.n_samples(); ++k) {
    const auto r1 = normalized_profile(full_a[k]);
    const auto r2 = normalized_profile(eff.states[k]);
    for (std::size_t i = 0; i < r1.size(); ++i) p.error = std::max(p.error, std::abs(r1[i] - r2[i]));
  }
  return p;
}

ExperimentResult run_reduction_check(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = resolve(config);
  const auto& c = result.config;
  if (c.experiment != Experiment::reduction_check) {
    throw InvalidArgument("not a reduction_check experiment", "experiment");
  }
  ReductionMetrics m;
  for (double J : c.reduction.J_list) {
    m.points.push_back(reduction_point(c, J));
    if (m.points.back().adiabaticity_flag) {
      result.warnings.push_back("J=" + std::to_string(J) + " violates the adiabaticity guard");
    }
  }
  std::vector<ReductionPoint> sorted = m.points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::abs(a.U_b) < std::abs(b.U_b);
  });
  m.monotone = true;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (!(sorted[k].error < sorted[k - 1].error)) m.monotone = false;
  }
  result.reduction = std::move(m);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::dispersion_scan: {
      ExperimentResult result;
      result.config = resolve(config);
      const auto& c = result.config;
      result.scan = run_dispersion_scan(c.lattice.kappa, c.lattice.beta, c.lattice.gamma,
                                        c.dispersion.phi_list, uniform_q_grid(c.dispersion.q_points));
      return result;
    }
    case Experiment::transport_single_site:
    case Experiment::transport_gaussian:
      return run_transport(config);
    case Experiment::storage:
      return run_storage(config);
    case Experiment::reduction_check:
      return run_reduction_check(config);
  }
  throw InvalidArgument("unknown experiment", "experiment");
}

// --- presets -----------------------------------------------------------------

namespace {

ExperimentConfig fig3(const char* name, bool hermitian, double phi, bool defects) {
  ExperimentConfig c;
  c.experiment = Experiment::transport_single_site;
  c.preset = name;
  c.lattice.beta = hermitian ? 0.0 : 0.4;
  c.lattice.gamma = hermitian ? 0.0 : 0.8;
  c.lattice.phi = phi;
  if (defects) c.lattice.defects = {{10, 2.0, 0.0}, {20, 2.0, 0.0}};
  c.excitation = ExcitationSpec::single_site(0);
  c.transport.velocity_window = TimeWindow{10.0, 30.0};
  return c;
}

ExperimentConfig fig4(const char* name, bool hermitian, double phi) {
  ExperimentConfig c;
  c.experiment = Experiment::transport_gaussian;
  c.preset = name;
  c.lattice.beta = hermitian ? 0.0 : 0.4;
  c.lattice.gamma = hermitian ? 0.0 : 0.8;
  c.lattice.phi = phi;
  c.lattice.defects = {{-5, 2.0, 0.0}, {5, 2.0, 0.0}};
  c.excitation = ExcitationSpec::gaussian(-30, 5.0, -kPi / 2.0);
  c.transport.t_eval = 40.0;
  return c;
}

ExperimentConfig fig6(const char* name, RetrievalPhase retrieval) {
  ExperimentConfig c;
  c.experiment = Experiment::storage;
  c.preset = name;
  c.lattice.beta = 0.4;
  c.lattice.gamma = 0.8;
  c.excitation = ExcitationSpec::gaussian(-30, 5.0, -kPi / 2.0);
  c.timing.t_prime = 30.0;
  c.storage.N = 3;
  c.storage.V_c = 1.0;
  c.storage.xi = 0.4;
  c.storage.retrieval = retrieval;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2",  "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f",     "fig4a",
          "fig4b", "fig4c", "fig4d", "fig6a", "fig6b", "fig7",  "reduction", "reduction-hermitian"};
}

ExperimentConfig preset(const std::string& name) {
  if (name == "fig2") {
    ExperimentConfig c;
    c.experiment = Experiment::dispersion_scan;
    c.preset = name;
    c.dispersion.phi_list = {0.0, kPi / 4.0, kPi / 2.0};
    return c;
  }
  if (name == "fig3a") return fig3("fig3a", true, 0.0, false);
  if (name == "fig3b") return fig3("fig3b", false, 0.0, false);
  if (name == "fig3c") return fig3("fig3c", false, kPi / 4.0, false);
  if (name == "fig3d") return fig3("fig3d", false, kPi / 2.0, false);
  if (name == "fig3e") return fig3("fig3e", true, 0.0, true);
  if (name == "fig3f") return fig3("fig3f", false, kPi / 2.0, true);
  if (name == "fig4a") return fig4("fig4a", true, 0.0);
  if (name == "fig4b") return fig4("fig4b", false, 0.0);
  if (name == "fig4c") return fig4("fig4c", false, kPi / 4.0);
  if (name == "fig4d") return fig4("fig4d", false, kPi / 2.0);
  if (name == "fig6a") return fig6("fig6a", RetrievalPhase::forward);
  if (name == "fig6b") return fig6("fig6b", RetrievalPhase::reversed);
  if (name == "fig7") {
    ExperimentConfig c = fig6("fig7", RetrievalPhase::forward);
    c.storage.xi_sweep = {0.4, 0.6, 0.8};
    return c;
  }
  if (name == "reduction" || name == "reduction-hermitian") {
    ExperimentConfig c;
    c.experiment = Experiment::reduction_check;
    c.preset = name;
    c.excitation = ExcitationSpec::gaussian(-10, 5.0, -kPi / 2.0);
    c.timing.t_final = 10.0;
    c.reduction.J_list = {4.0, 8.0};
    if (name == "reduction") {
      c.lattice.phi = kPi / 2.0;
    } else {
      c.lattice.beta = 0.0;
      c.lattice.gamma = 0.0;
      c.reduction.ub_mode = UbMode::real;
    }
    return c;
  }
  throw InvalidArgument("unknown preset '" + name + "'", "preset");
}

}  // namespace nhl
