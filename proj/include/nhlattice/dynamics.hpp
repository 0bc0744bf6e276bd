#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhlattice/band_matrix.hpp"
#include "nhlattice/lattice.hpp"

namespace nhl {

struct StateVector {
  std::vector<Complex> amplitudes;
  std::vector<int> site_labels;

  std::size_t size() const noexcept { return amplitudes.size(); }
  // S = sum |c_n|^2
  double norm() const;
};

double squared_norm(std::span<const Complex> c);

enum class Method { rk4, exact };
// How an exact trajectory was computed: eigendecomposition, or the
// scaling-and-squaring matrix exponential when the eigenvector matrix is
// ill-conditioned.
enum class ExactRoute { none, eigen, expm };

const char* to_string(Method m);
const char* to_string(ExactRoute r);

inline constexpr double kEigenConditionLimit = 1e8;
inline constexpr double kRunawayAmplitude = 1e150;
inline constexpr double kStabilityFactor = 0.05;

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norm_series;
  Method method = Method::rk4;
  ExactRoute exact_route = ExactRoute::none;
  double eigen_condition = 0.0;  // condition estimate of the eigenvector matrix, when computed

  std::size_t n_samples() const noexcept { return times.size(); }
  std::size_t n_sites() const noexcept { return states.empty() ? 0 : states.front().size(); }
  const std::vector<int>& site_labels() const { return states.front().site_labels; }
  // Index of the sample closest to t.
  std::size_t nearest_sample(double t) const;
};

struct ScheduleSegment {
  double t_start = 0.0;
  Hamiltonian hamiltonian;
};

// Piecewise-constant sequence of Hamiltonians. The state is continuous across
// switches (instantaneous quench).
class Schedule {
 public:
  explicit Schedule(std::vector<ScheduleSegment> segments);

  const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
  std::size_t dim() const noexcept { return segments_.front().hamiltonian.dim(); }

 private:
  std::vector<ScheduleSegment> segments_;
};

// Reference propagator: snapshots exp(-i H t_k) c0 at t_k = k sample_dt.
Trajectory evolve_exact(const Eigen::MatrixXcd& H, const StateVector& c0, double t_final,
                        double sample_dt);
Trajectory evolve_exact(const Hamiltonian& H, const StateVector& c0, double t_final,
                        double sample_dt);
// Piecewise exact propagation; switches at the segment start times.
Trajectory evolve_exact(const Schedule& schedule, const StateVector& c0, double t_final,
                        double sample_dt);

// Classical fixed-step RK4 for dc/dt = -i H c using banded products only.
// sample_dt must be an integer multiple of dt; integration stops at the last
// sample time not exceeding t_final.
Trajectory evolve_rk4(const BandMatrix& H, const StateVector& c0, double t_final, double dt,
                      double sample_dt);
Trajectory evolve_rk4(const Hamiltonian& H, const StateVector& c0, double t_final, double dt,
                      double sample_dt);

// Switch times are snapped onto the dt grid.
Trajectory evolve_schedule(const Schedule& schedule, const StateVector& c0, double t_final,
                           double dt, double sample_dt);

// rho_n = sqrt(|c_n|^2 / S)
std::vector<double> normalized_profile(const StateVector& c);

}  // namespace nhl
