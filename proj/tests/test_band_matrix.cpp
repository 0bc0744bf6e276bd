#include <doctest.h>

#include <random>

#include "nhlattice/band_matrix.hpp"

using nhl::BandMatrix;
using nhl::Complex;

TEST_SUITE("band_matrix") {

TEST_CASE("banded product matches the dense product") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  BandMatrix m(9, 2, 1);
  for (std::size_t r = 0; r < 9; ++r) {
    for (std::size_t c = 0; c < 9; ++c) {
      if (r <= c + 2 && c <= r + 1) m.add(r, c, {g(rng), g(rng)});
    }
  }
  m.add(8, 0, {0.5, -1.0});  // wrap entry
  m.add(0, 8, {-0.25, 2.0});
  std::vector<Complex> x(9), y(9);
  for (auto& v : x) v = {g(rng), g(rng)};
  m.apply(x, y);
  const Eigen::VectorXcd ref = m.dense() * Eigen::Map<Eigen::VectorXcd>(x.data(), 9);
  for (int k = 0; k < 9; ++k) CHECK(std::abs(y[k] - ref[k]) < 1e-13);
  CHECK(m.at(8, 0) == Complex(0.5, -1.0));
  CHECK(m.at(5, 0) == Complex{});
}

TEST_CASE("add accumulates and max_abs_entry sees every entry") {
  BandMatrix m(3, 1, 1);
  m.add(1, 1, {1.0, 0.0});
  m.add(1, 1, {0.0, 2.0});
  CHECK(m.at(1, 1) == Complex(1.0, 2.0));
  m.add(2, 0, {0.0, -4.0});
  CHECK(m.max_abs_entry() == doctest::Approx(4.0));
}

}
