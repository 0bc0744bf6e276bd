#include "nhlattice/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/NonLinearOptimization>

#include "nhlattice/error.hpp"

namespace nhl {

Excitation make_excitation(const ExcitationSpec& spec, const std::vector<int>& site_labels) {
  if (site_labels.empty()) throw InvalidArgument("empty lattice");
  const auto [lo, hi] = std::minmax_element(site_labels.begin(), site_labels.end());
  if (spec.n0 < *lo || spec.n0 > *hi) {
    throw InvalidArgument("excitation site n0=" + std::to_string(spec.n0) + " outside lattice",
                          "excitation.n0");
  }
  Excitation out;
  out.state.site_labels = site_labels;
  out.state.amplitudes.assign(site_labels.size(), Complex{});
  if (spec.kind == ExcitationKind::single_site) {
    const auto it = std::find(site_labels.begin(), site_labels.end(), spec.n0);
    out.state.amplitudes[static_cast<std::size_t>(it - site_labels.begin())] = 1.0;
    return out;
  }
  if (!(spec.w0 > 0.0) || !std::isfinite(spec.w0)) {
    throw InvalidArgument("gaussian width w0 must be positive", "excitation.w0");
  }
  if (!std::isfinite(spec.q0)) throw InvalidArgument("q0 must be finite", "excitation.q0");
  const double clearance = 4.0 * spec.w0;
  out.clearance_warning = (spec.n0 - *lo) < clearance || (*hi - spec.n0) < clearance;
  for (std::size_t k = 0; k < site_labels.size(); ++k) {
    const double n = site_labels[k];
    const double x = (n - spec.n0) / spec.w0;
    out.state.amplitudes[k] = std::exp(Complex{-x * x, spec.q0 * n});
  }
  if (spec.normalize) {
    const double s = std::sqrt(out.state.norm());
    for (auto& a : out.state.amplitudes) a /= s;
  }
  return out;
}

double centroid(const StateVector& c) {
  double weight = 0.0, moment = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double p = std::norm(c.amplitudes[k]);
    weight += p;
    moment += p * c.site_labels[k];
  }
  if (!(weight > 0.0)) throw InvalidArgument("centroid of a zero-norm state");
  return moment / weight;
}

double centroid_velocity(const Trajectory& traj, double t_a, double t_b) {
  if (traj.times.empty()) throw InvalidArgument("empty trajectory");
  if (t_a > t_b) throw InvalidArgument("velocity window is reversed");
  constexpr double eps = 1e-9;
  if (t_a < traj.times.front() - eps || t_b > traj.times.back() + eps) {
    throw InvalidArgument("velocity window outside trajectory span");
  }
  std::vector<double> t, x;
  for (std::size_t k = 0; k < traj.n_samples(); ++k) {
    if (traj.times[k] >= t_a - eps && traj.times[k] <= t_b + eps) {
      t.push_back(traj.times[k]);
      x.push_back(centroid(traj.states[k]));
    }
  }
  if (t.size() < 5) throw InvalidArgument("velocity window holds fewer than 5 samples");
  const double n = static_cast<double>(t.size());
  double tm = 0.0, xm = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    tm += t[k];
    xm += x[k];
  }
  tm /= n;
  xm /= n;
  double stt = 0.0, stx = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    stx += (t[k] - tm) * (x[k] - xm);
  }
  return stx / stt;
}

double region_norm_fraction(const StateVector& c, SiteInterval region) {
  if (region.first > region.last) throw InvalidArgument("empty region");
  double total = 0.0, inside = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double p = std::norm(c.amplitudes[k]);
    total += p;
    if (region.contains(c.site_labels[k])) inside += p;
  }
  if (!(total > 0.0)) throw InvalidArgument("region fraction of a zero-norm state");
  return inside / total;
}

double measure_reflection(const Trajectory& traj, int barrier_site, double t_eval, int margin) {
  if (traj.times.empty()) throw InvalidArgument("empty trajectory");
  constexpr double eps = 1e-9;
  if (t_eval < traj.times.front() - eps || t_eval > traj.times.back() + eps) {
    throw InvalidArgument("t_eval outside trajectory span");
  }
  const StateVector& c = traj.states[traj.nearest_sample(t_eval)];
  const auto [lo, hi] = std::minmax_element(c.site_labels.begin(), c.site_labels.end());
  const int last = barrier_site - margin;
  if (last < *lo) return 0.0;
  return region_norm_fraction(c, {*lo, std::min(last, *hi)});
}

namespace {

struct GaussianResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>& n;
  const std::vector<double>& y;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(n.size()); }

  // p = (n0, w, A)
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (std::size_t k = 0; k < n.size(); ++k) {
      const double x = (n[k] - p(0)) / p(1);
      r(static_cast<Eigen::Index>(k)) = p(2) * std::exp(-x * x) - y[k];
    }
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    for (std::size_t k = 0; k < n.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double d = n[k] - p(0);
      const double x = d / p(1);
      const double g = std::exp(-x * x);
      jac(i, 0) = p(2) * g * 2.0 * d / (p(1) * p(1));
      jac(i, 1) = p(2) * g * 2.0 * d * d / (p(1) * p(1) * p(1));
      jac(i, 2) = g;
    }
    return 0;
  }
};

}  // namespace

GaussianFit fit_gaussian(const StateVector& c) {
  const double s = c.norm();
  if (!(s > 0.0)) throw InvalidArgument("gaussian fit of a zero-norm state");
  std::vector<double> n(c.size()), y(c.size());
  double ymax = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    n[k] = c.site_labels[k];
    y[k] = std::abs(c.amplitudes[k]);
    ymax = std::max(ymax, y[k]);
  }
  GaussianFit fit;
  fit.degenerate = true;
  const auto significant = std::count_if(y.begin(), y.end(), [&](double v) { return v > 1e-3 * ymax; });
  if (significant < 3) return fit;

  // Moment estimates: |c|^2 ∝ exp(-2 (n - n0)^2 / w^2) has variance w^2 / 4.
  double mean = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) mean += n[k] * y[k] * y[k];
  mean /= s;
  double var = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) var += (n[k] - mean) * (n[k] - mean) * y[k] * y[k];
  var /= s;
  Eigen::VectorXd p(3);
  p << mean, std::max(1.0, 2.0 * std::sqrt(var)), ymax;

  GaussianResidual functor{n, y};
  Eigen::LevenbergMarquardt<GaussianResidual> lm(functor);
  lm.parameters.maxfev = 2000;
  lm.minimize(p);

  const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
  const double span = *hi - *lo + 1.0;
  fit.n0 = p(0);
  fit.w0 = std::abs(p(1));
  fit.amplitude = p(2);
  if (!std::isfinite(fit.w0) || fit.w0 < 1.0 || fit.w0 > span || !(fit.amplitude > 0.0)) {
    fit.fidelity = 0.0;
    return fit;
  }
  Eigen::VectorXd r(static_cast<Eigen::Index>(n.size()));
  functor(p, r);
  fit.fidelity = std::clamp(1.0 - r.squaredNorm() / s, 0.0, 1.0);
  fit.degenerate = false;
  return fit;
}

double storage_efficiency(const Trajectory& traj, double t_in, double t_out,
                          SiteInterval in_region, SiteInterval out_region) {
  if (traj.times.empty()) throw InvalidArgument("empty trajectory");
  const auto region_norm = [](const StateVector& c, SiteInterval r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (r.contains(c.site_labels[k])) sum += std::norm(c.amplitudes[k]);
    }
    return sum;
  };
  const double in = region_norm(traj.states[traj.nearest_sample(t_in)], in_region);
  if (!(in > 0.0)) throw InvalidArgument("zero input norm for storage efficiency");
  return region_norm(traj.states[traj.nearest_sample(t_out)], out_region) / in;
}

StateVector restrict_to(const StateVector& c, SiteInterval region) {
  StateVector out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (region.contains(c.site_labels[k])) {
      out.amplitudes.push_back(c.amplitudes[k]);
      out.site_labels.push_back(c.site_labels[k]);
    }
  }
  return out;
}

}  // namespace nhl
