#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhlattice/dynamics.hpp"

namespace nhl {

// --- excitations -----------------------------------------------------------

enum class ExcitationKind { single_site, gaussian };

// Single-site delta at n0, or c_n ∝ exp(-(n - n0)^2 / w0^2 + i q0 n).
struct ExcitationSpec {
  ExcitationKind kind = ExcitationKind::single_site;
  int n0 = 0;
  double w0 = 5.0;
  double q0 = 0.0;
  bool normalize = true;

  static ExcitationSpec single_site(int n0) { return {ExcitationKind::single_site, n0, 0.0, 0.0, true}; }
  static ExcitationSpec gaussian(int n0, double w0, double q0) {
    return {ExcitationKind::gaussian, n0, w0, q0, true};
  }
  // Spatial extent used for lattice sizing: 0 for a single site, w0 otherwise.
  double width() const noexcept { return kind == ExcitationKind::gaussian ? w0 : 0.0; }
};

// Gaussian with fewer than 4 w0 sites to either end triggers a warning.
struct Excitation {
  StateVector state;
  bool clearance_warning = false;
};

Excitation make_excitation(const ExcitationSpec& spec, const std::vector<int>& site_labels);

// --- observables -----------------------------------------------------------

struct SiteInterval {
  int first = 0;
  int last = 0;
  bool contains(int n) const noexcept { return n >= first && n <= last; }
};

// sum n |c_n|^2 / S over the site labels.
double centroid(const StateVector& c);

// Least-squares slope of the centroid over samples with t in [t_a, t_b].
double centroid_velocity(const Trajectory& traj, double t_a, double t_b);

// sum_{n in region} |c_n|^2 / S
double region_norm_fraction(const StateVector& c, SiteInterval region);

// Normalized norm on sites <= barrier_site - margin in the snapshot nearest t_eval.
double measure_reflection(const Trajectory& traj, int barrier_site, double t_eval, int margin = 3);

struct GaussianFit {
  double n0 = 0.0;
  double w0 = 0.0;
  double amplitude = 0.0;
  double fidelity = 0.0;  // 1 - RSS / sum |c_n|^2, clamped to [0, 1]
  bool degenerate = false;
};

// Fits |c_n| to A exp(-(n - n0)^2 / w^2). Profiles with fewer than three
// significant sites, or fitted widths below one site or beyond the lattice
// span, come back degenerate with fidelity 0.
GaussianFit fit_gaussian(const StateVector& c);

// Un-normalized norm in out_region at t_out over that in in_region at t_in.
double storage_efficiency(const Trajectory& traj, double t_in, double t_out,
                          SiteInterval in_region, SiteInterval out_region);

// Sub-vector of a state restricted to a site interval.
StateVector restrict_to(const StateVector& c, SiteInterval region);

}  // namespace nhl
