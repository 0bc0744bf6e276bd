#include "nhlattice/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "nhlattice/error.hpp"

namespace nhl {
namespace {

constexpr Complex kMinusI{0.0, -1.0};

void require_finite_state(const StateVector& c0, std::size_t dim) {
  if (c0.amplitudes.size() != dim) {
    throw InvalidArgument("initial state has " + std::to_string(c0.amplitudes.size()) +
                          " amplitudes, Hamiltonian has dimension " + std::to_string(dim));
  }
  if (!c0.site_labels.empty() && c0.site_labels.size() != dim) {
    throw InvalidArgument("initial state site_labels length mismatch");
  }
  for (const auto& a : c0.amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvalidArgument("initial state has non-finite amplitudes");
    }
  }
}

void require_times(double t_final, double sample_dt) {
  if (!std::isfinite(t_final) || t_final < 0.0) {
    throw InvalidArgument("t_final must be finite and non-negative", "t_final");
  }
  if (!std::isfinite(sample_dt) || sample_dt <= 0.0) {
    throw InvalidArgument("sample_dt must be positive", "sample_dt");
  }
}

std::size_t sample_count(double t_final, double sample_dt) {
  return static_cast<std::size_t>(std::floor(t_final / sample_dt + 1e-9)) + 1;
}

void record(Trajectory& traj, double t, const Eigen::VectorXcd& c,
            const std::vector<int>& labels) {
  StateVector s;
  s.amplitudes.assign(c.data(), c.data() + c.size());
  s.site_labels = labels;
  traj.norm_series.push_back(s.norm());
  traj.times.push_back(t);
  traj.states.push_back(std::move(s));
}

void check_runaway(std::span<const Complex> c, double t) {
  for (const auto& v : c) {
    const double m = std::abs(v);
    if (!(m <= kRunawayAmplitude)) {
      throw NumericalError("gain runaway at t=" + std::to_string(t) +
                           ": amplitude exceeded 1e150 or became non-finite");
    }
  }
}

std::vector<int> labels_or_default(const StateVector& c0) {
  if (!c0.site_labels.empty()) return c0.site_labels;
  std::vector<int> labels(c0.size());
  for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = static_cast<int>(k);
  return labels;
}

Eigen::VectorXcd to_eigen(const StateVector& c) {
  return Eigen::Map<const Eigen::VectorXcd>(c.amplitudes.data(),
                                            static_cast<Eigen::Index>(c.size()));
}

struct StepGrid {
  long long steps;
  long long stride;
};

StepGrid make_grid(double t_final, double dt, double sample_dt) {
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidArgument("dt must be positive", "dt");
  require_times(t_final, sample_dt);
  const double ratio = sample_dt / dt;
  const long long stride = std::llround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
    throw InvalidArgument("sample_dt must be an integer multiple of dt", "sample_dt");
  }
  const long long total = std::llround(t_final / dt);
  return {(total / stride) * stride, stride};
}

void check_stability(double dt, double max_entry) {
  if (max_entry > 0.0 && dt > kStabilityFactor / max_entry) {
    throw InvalidArgument("dt=" + std::to_string(dt) + " exceeds the stability limit 0.05/" +
                              std::to_string(max_entry),
                          "dt");
  }
}

// One classical RK4 step in place; k1..k4 and tmp are scratch.
struct Rk4Workspace {
  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
  std::vector<Complex> k1, k2, k3, k4, tmp;
};

void rk4_step(const BandMatrix& H, std::vector<Complex>& c, double dt, Rk4Workspace& w) {
  const std::size_t n = c.size();
  const Complex h{0.0, -dt};  // dc = -i H c dt
  H.apply(c, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = c[i] + 0.5 * h * w.k1[i];
  H.apply(w.tmp, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = c[i] + 0.5 * h * w.k2[i];
  H.apply(w.tmp, w.k3);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = c[i] + h * w.k3[i];
  H.apply(w.tmp, w.k4);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] += (h / 6.0) * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
  }
}

// Integrates over a list of (first step index, operator) pieces.
Trajectory integrate_rk4(const std::vector<std::pair<long long, const BandMatrix*>>& pieces,
                         const StateVector& c0, double t_final, double dt, double sample_dt) {
  const std::size_t dim = pieces.front().second->dim();
  require_finite_state(c0, dim);
  const StepGrid grid = make_grid(t_final, dt, sample_dt);
  for (const auto& p : pieces) check_stability(dt, p.second->max_abs_entry());

  const auto labels = labels_or_default(c0);
  Trajectory traj;
  traj.method = Method::rk4;
  std::vector<Complex> c = c0.amplitudes;
  Rk4Workspace work(dim);
  const auto snapshot = [&](long long step) {
    StateVector s{c, labels};
    traj.norm_series.push_back(s.norm());
    traj.times.push_back(static_cast<double>(step) * dt);
    traj.states.push_back(std::move(s));
  };
  snapshot(0);
  std::size_t piece = 0;
  for (long long step = 0; step < grid.steps; ++step) {
    while (piece + 1 < pieces.size() && pieces[piece + 1].first <= step) ++piece;
    rk4_step(*pieces[piece].second, c, dt, work);
    check_runaway(c, static_cast<double>(step + 1) * dt);
    if ((step + 1) % grid.stride == 0) snapshot(step + 1);
  }
  return traj;
}

}  // namespace

double squared_norm(std::span<const Complex> c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

double StateVector::norm() const { return squared_norm(amplitudes); }

const char* to_string(Method m) { return m == Method::rk4 ? "rk4" : "exact"; }

const char* to_string(ExactRoute r) {
  switch (r) {
    case ExactRoute::eigen:
      return "eigen";
    case ExactRoute::expm:
      return "expm";
    default:
      return "none";
  }
}

std::size_t Trajectory::nearest_sample(double t) const {
  if (times.empty()) throw InvalidArgument("empty trajectory");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto k = static_cast<std::size_t>(it - times.begin());
  return (t - times[k - 1] <= times[k] - t) ? k - 1 : k;
}

Schedule::Schedule(std::vector<ScheduleSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidArgument("schedule needs at least one segment");
  if (segments_.front().t_start != 0.0) throw InvalidArgument("first segment must start at t=0");
  const auto& first = segments_.front().hamiltonian;
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    if (!(segments_[k].t_start > segments_[k - 1].t_start) ||
        !std::isfinite(segments_[k].t_start)) {
      throw InvalidArgument("segment start times must be strictly increasing");
    }
    const auto& h = segments_[k].hamiltonian;
    if (h.dim() != first.dim() || h.site_labels() != first.site_labels()) {
      throw InvalidArgument("schedule segments must share dimension and site labels");
    }
  }
}

Trajectory evolve_exact(const Eigen::MatrixXcd& H, const StateVector& c0, double t_final,
                        double sample_dt) {
  require_times(t_final, sample_dt);
  require_finite_state(c0, static_cast<std::size_t>(H.rows()));
  if (!H.allFinite()) throw InvalidArgument("Hamiltonian has non-finite entries");
  const auto labels = labels_or_default(c0);
  const std::size_t samples = sample_count(t_final, sample_dt);
  const Eigen::VectorXcd v0 = to_eigen(c0);

  Trajectory traj;
  traj.method = Method::exact;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(H, true);
  // Strongly non-normal matrices can overflow the eigenvector back-substitution.
  bool use_eigen = solver.info() == Eigen::Success && solver.eigenvectors().allFinite() &&
                   solver.eigenvalues().allFinite();
  traj.eigen_condition = std::numeric_limits<double>::infinity();
  if (use_eigen) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(solver.eigenvectors());
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin > 0.0 && std::isfinite(sv(0))) traj.eigen_condition = sv(0) / smin;
    use_eigen = traj.eigen_condition <= kEigenConditionLimit;
  }

  if (use_eigen) {
    traj.exact_route = ExactRoute::eigen;
    const auto& V = solver.eigenvectors();
    const auto& lambda = solver.eigenvalues();
    const Eigen::VectorXcd coeff = V.partialPivLu().solve(v0);
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = static_cast<double>(k) * sample_dt;
      const Eigen::VectorXcd phases = (kMinusI * t * lambda.array()).exp().matrix();
      const Eigen::VectorXcd c =
          k == 0 ? v0 : Eigen::VectorXcd(V * coeff.cwiseProduct(phases));
      check_runaway({c.data(), static_cast<std::size_t>(c.size())}, t);
      record(traj, t, c, labels);
    }
    return traj;
  }

  traj.exact_route = ExactRoute::expm;
  const Eigen::MatrixXcd step = (Complex{0.0, -sample_dt} * H).exp();
  Eigen::VectorXcd c = v0;
  record(traj, 0.0, c, labels);
  for (std::size_t k = 1; k < samples; ++k) {
    c = step * c;
    const double t = static_cast<double>(k) * sample_dt;
    check_runaway({c.data(), static_cast<std::size_t>(c.size())}, t);
    record(traj, t, c, labels);
  }
  return traj;
}

Trajectory evolve_exact(const Hamiltonian& H, const StateVector& c0, double t_final,
                        double sample_dt) {
  return evolve_exact(H.dense(), c0, t_final, sample_dt);
}

Trajectory evolve_exact(const Schedule& schedule, const StateVector& c0, double t_final,
                        double sample_dt) {
  require_times(t_final, sample_dt);
  const auto& segs = schedule.segments();
  require_finite_state(c0, schedule.dim());
  if (t_final < segs.back().t_start) {
    throw InvalidArgument("t_final precedes the last schedule switch", "t_final");
  }
  const auto labels = labels_or_default(c0);
  const std::size_t samples = sample_count(t_final, sample_dt);

  std::vector<Eigen::MatrixXcd> dense;
  std::vector<Eigen::MatrixXcd> full_step;
  for (const auto& s : segs) {
    dense.push_back(s.hamiltonian.dense());
    full_step.push_back((Complex{0.0, -sample_dt} * dense.back()).exp());
  }
  auto segment_at = [&](double t) {
    std::size_t k = 0;
    while (k + 1 < segs.size() && segs[k + 1].t_start <= t) ++k;
    return k;
  };

  Trajectory traj;
  traj.method = Method::exact;
  traj.exact_route = ExactRoute::expm;
  Eigen::VectorXcd c = to_eigen(c0);
  record(traj, 0.0, c, labels);
  for (std::size_t k = 1; k < samples; ++k) {
    const double t0 = static_cast<double>(k - 1) * sample_dt;
    const double t1 = static_cast<double>(k) * sample_dt;
    const std::size_t s0 = segment_at(t0);
    if (s0 + 1 >= segs.size() || segs[s0 + 1].t_start >= t1) {
      c = full_step[s0] * c;
    } else {
      double t = t0;
      std::size_t s = s0;
      while (t < t1) {
        const double next = (s + 1 < segs.size()) ? std::min(t1, segs[s + 1].t_start) : t1;
        if (next > t) c = (Complex{0.0, -(next - t)} * dense[s]).exp() * c;
        t = next;
        if (s + 1 < segs.size() && segs[s + 1].t_start <= t) ++s;
      }
    }
    check_runaway({c.data(), static_cast<std::size_t>(c.size())}, t1);
    record(traj, t1, c, labels);
  }
  return traj;
}

Trajectory evolve_rk4(const BandMatrix& H, const StateVector& c0, double t_final, double dt,
                      double sample_dt) {
  return integrate_rk4({{0, &H}}, c0, t_final, dt, sample_dt);
}

Trajectory evolve_rk4(const Hamiltonian& H, const StateVector& c0, double t_final, double dt,
                      double sample_dt) {
  const BandMatrix band = H.band();
  return evolve_rk4(band, c0, t_final, dt, sample_dt);
}

Trajectory evolve_schedule(const Schedule& schedule, const StateVector& c0, double t_final,
                           double dt, double sample_dt) {
  const auto& segs = schedule.segments();
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidArgument("dt must be positive", "dt");
  if (t_final < segs.back().t_start) {
    throw InvalidArgument("t_final precedes the last schedule switch", "t_final");
  }
  std::vector<BandMatrix> bands;
  bands.reserve(segs.size());
  for (const auto& s : segs) bands.push_back(s.hamiltonian.band());
  std::vector<std::pair<long long, const BandMatrix*>> pieces;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    pieces.emplace_back(std::llround(segs[k].t_start / dt), &bands[k]);
  }
  return integrate_rk4(pieces, c0, t_final, dt, sample_dt);
}

std::vector<double> normalized_profile(const StateVector& c) {
  const double s = c.norm();
  if (!(s > 0.0)) throw InvalidArgument("normalized profile of a zero-norm state");
  std::vector<double> rho(c.size());
  for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = std::sqrt(std::norm(c.amplitudes[k]) / s);
  return rho;
}

}  // namespace nhl
