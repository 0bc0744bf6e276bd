#include <doctest.h>

#include <numbers>
#include <random>

#include "nhlattice/analysis.hpp"
#include "nhlattice/error.hpp"

using namespace nhl;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<int> labels(int first, int last) {
  std::vector<int> out;
  for (int n = first; n <= last; ++n) out.push_back(n);
  return out;
}

StateVector gaussian_state(const std::vector<int>& sites, double n0, double w, double amp = 1.0) {
  StateVector s;
  s.site_labels = sites;
  for (int n : sites) s.amplitudes.emplace_back(amp * std::exp(-(n - n0) * (n - n0) / (w * w)), 0.0);
  return s;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("gaussian excitation shape and normalization") {
  const auto sites = labels(-60, 60);
  const Excitation ex = make_excitation(ExcitationSpec::gaussian(-10, 5.0, -kPi / 2), sites);
  CHECK_FALSE(ex.clearance_warning);
  CHECK(ex.state.norm() == doctest::Approx(1.0));
  const auto& c = ex.state.amplitudes;
  const std::size_t i0 = 50;  // site -10
  CHECK(std::arg(c[i0 + 1] / c[i0]) == doctest::Approx(-kPi / 2));
  CHECK(std::abs(c[i0 + 5]) / std::abs(c[i0]) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("excitation near a chain end warns; outside the chain throws") {
  const auto sites = labels(0, 40);
  CHECK(make_excitation(ExcitationSpec::gaussian(5, 5.0, 0.0), sites).clearance_warning);
  CHECK_FALSE(make_excitation(ExcitationSpec::single_site(0), sites).clearance_warning);
  CHECK_THROWS_AS(make_excitation(ExcitationSpec::single_site(41), sites), InvalidArgument);
  CHECK_THROWS_AS(make_excitation(ExcitationSpec::gaussian(20, 0.0, 0.0), sites), InvalidArgument);
}

TEST_CASE("centroid, regions and reflection") {
  StateVector s;
  s.site_labels = {-2, -1, 0, 1, 2};
  s.amplitudes = {1.0, 0.0, 0.0, 0.0, Complex(0.0, std::sqrt(3.0))};
  CHECK(centroid(s) == doctest::Approx((-2 * 1 + 2 * 3) / 4.0));
  CHECK(region_norm_fraction(s, {-2, -1}) == doctest::Approx(0.25));
  CHECK(region_norm_fraction(s, {1, 5}) == doctest::Approx(0.75));
  Trajectory t;
  t.times = {0.0, 1.0};
  t.states = {s, s};
  CHECK(measure_reflection(t, 1, 1.0, 2) == doctest::Approx(0.25));
  CHECK(restrict_to(s, {0, 2}).site_labels == std::vector<int>{0, 1, 2});
}

TEST_CASE("centroid velocity of a uniformly moving packet") {
  const auto sites = labels(-80, 80);
  Trajectory t;
  for (int k = 0; k <= 40; ++k) {
    const double time = 0.5 * k;
    t.times.push_back(time);
    t.states.push_back(gaussian_state(sites, -30 + 1.5 * time, 4.0, std::exp(-0.1 * time)));
  }
  CHECK(centroid_velocity(t, 2.0, 18.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_THROWS_AS(centroid_velocity(t, 2.0, 3.0), InvalidArgument);  // too few samples
}

TEST_CASE("gaussian fit recovers centre and width under 1% noise") {
  const auto sites = labels(-50, 50);
  std::mt19937 rng(12345);
  std::normal_distribution<double> noise(0.0, 0.01);
  StateVector s = gaussian_state(sites, 7.3, 6.2, 2.0);
  for (auto& c : s.amplitudes) c = std::polar(std::abs(c) * (1.0 + noise(rng)), 0.8);
  const GaussianFit f = fit_gaussian(s);
  CHECK_FALSE(f.degenerate);
  CHECK(f.n0 == doctest::Approx(7.3).epsilon(0.01));
  CHECK(f.w0 == doctest::Approx(6.2).epsilon(0.02));
  CHECK(f.amplitude == doctest::Approx(2.0).epsilon(0.02));
  CHECK(f.fidelity > 0.99);
}

TEST_CASE("degenerate profiles get zero fidelity") {
  const auto sites = labels(0, 30);
  StateVector spike;
  spike.site_labels = sites;
  spike.amplitudes.assign(sites.size(), Complex{});
  spike.amplitudes[10] = 1.0;
  const GaussianFit f = fit_gaussian(spike);
  CHECK(f.degenerate);
  CHECK(f.fidelity == 0.0);

  StateVector flat;
  flat.site_labels = sites;
  flat.amplitudes.assign(sites.size(), Complex(1.0, 0.0));
  CHECK(fit_gaussian(flat).degenerate);
}

TEST_CASE("storage efficiency is a ratio of unnormalized norms") {
  const auto sites = labels(-20, 20);
  Trajectory t;
  t.times = {0.0, 10.0};
  t.states = {gaussian_state(sites, -10, 3.0, 1.0), gaussian_state(sites, 10, 3.0, 0.5)};
  const double eff = storage_efficiency(t, 0.0, 10.0, {-20, -1}, {1, 20});
  CHECK(eff == doctest::Approx(0.25).epsilon(1e-6));
}

}
