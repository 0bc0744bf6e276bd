#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nhlattice/band_matrix.hpp"

// Hamiltonians follow the convention i dc/dt = H c; row n of H is the
// equation of motion for site n.
namespace nhl {

enum class Boundary { open, periodic };

// Returns phi reduced to (-pi, pi].
double reduce_phase(double phi);

// On-site potential v_real + i xi_imag added at one site (xi_imag > 0 is gain).
struct DefectSpec {
  int site = 0;
  double v_real = 0.0;
  double xi_imag = 0.0;

  bool operator==(const DefectSpec&) const = default;
};

// Homogeneous chain with complex hoppings kappa + i beta e^{+-i phi} and
// uniform loss gamma.
struct ChainSpec {
  double kappa = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phi = 0.0;
  int n_sites = 2;
  int index_origin = 0;
  Boundary boundary = Boundary::open;
  std::vector<DefectSpec> defects;

  int first_site() const noexcept { return index_origin; }
  int last_site() const noexcept { return index_origin + n_sites - 1; }
  bool contains(int site) const noexcept { return site >= first_site() && site <= last_site(); }
  std::vector<int> site_labels() const;

  // No Bloch mode is amplified: Im E(q) <= 0 for every q.
  bool is_purely_dissipative() const noexcept { return gamma >= 2.0 * beta; }

  // Throws InvalidArgument naming the violated field.
  void validate() const;

  bool operator==(const ChainSpec&) const = default;
};

// Two-sublattice sawtooth model: main sublattice A (loss Gamma, potentials
// V_a) and auxiliary sublattice B (uniform complex potential U_b), coupled by
// J e^{+-i theta}.
struct SawtoothSpec {
  double kappa = 1.0;
  double J = 1.0;
  double theta = 0.0;
  double Gamma = 0.0;
  std::vector<double> V_a;  // empty means all zero
  Complex U_b{0.0, 1.0};
  int n_cells = 2;
  int index_origin = 0;

  // max(J, 2 kappa) / |U_b|; adiabatic elimination needs this << 1.
  double adiabaticity_ratio() const;
  double potential_a(int cell) const { return V_a.empty() ? 0.0 : V_a[static_cast<std::size_t>(cell)]; }
  void validate() const;
};

// Three-stage structure: non-Hermitian chain (phase -q0) | Hermitian region
// |n| < N | non-Hermitian chain (phase +q0), with boundary sites n = +-N
// carrying V_c + i xi.
struct SandwichSpec {
  ChainSpec chain;  // supplies kappa, beta, gamma, site range; phi is ignored
  int N = 3;
  double q0 = 0.0;
  double V_c = 0.0;
  double xi = 0.0;

  void validate() const;
};

// Tridiagonal Hamiltonian with optional periodic corner terms.
// upper[k] couples row k to column k+1, lower[k] couples row k+1 to column k.
// corner_upper couples the last row to column 0, corner_lower the first row
// to the last column.
class Hamiltonian {
 public:
  Hamiltonian(std::vector<Complex> diag, std::vector<Complex> upper,
              std::vector<Complex> lower, std::vector<int> site_labels,
              std::optional<Complex> corner_upper = std::nullopt,
              std::optional<Complex> corner_lower = std::nullopt);

  std::size_t dim() const noexcept { return diag_.size(); }
  const std::vector<Complex>& diag() const noexcept { return diag_; }
  const std::vector<Complex>& upper() const noexcept { return upper_; }
  const std::vector<Complex>& lower() const noexcept { return lower_; }
  const std::optional<Complex>& corner_upper() const noexcept { return corner_upper_; }
  const std::optional<Complex>& corner_lower() const noexcept { return corner_lower_; }
  const std::vector<int>& site_labels() const noexcept { return labels_; }

  // Index of a site label; throws if the label is not on the lattice.
  std::size_t index_of(int site) const;

  bool is_hermitian() const;
  BandMatrix band() const;
  Eigen::MatrixXcd dense() const;

 private:
  std::vector<Complex> diag_;
  std::vector<Complex> upper_;
  std::vector<Complex> lower_;
  std::optional<Complex> corner_upper_;
  std::optional<Complex> corner_lower_;
  std::vector<int> labels_;
};

// Sawtooth operator on the interleaved basis (a_1, b_1, a_2, b_2, ...).
class SawtoothOperator {
 public:
  SawtoothOperator(BandMatrix band, int n_cells, int index_origin);

  const BandMatrix& band() const noexcept { return band_; }
  int n_cells() const noexcept { return n_cells_; }
  std::size_t dim() const noexcept { return band_.dim(); }
  // Position of a_n / b_n for cell label n.
  std::size_t a_index(int cell) const;
  std::size_t b_index(int cell) const;
  std::vector<int> cell_labels() const;
  // Cell label repeated for a and b entries, matching the interleaved layout.
  std::vector<int> interleaved_labels() const;
  Eigen::MatrixXcd dense() const { return band_.dense(); }

 private:
  BandMatrix band_;
  int n_cells_;
  int origin_;
};

Hamiltonian build_chain_hamiltonian(const ChainSpec& spec);
SawtoothOperator build_sawtooth_hamiltonian(const SawtoothSpec& spec);
Hamiltonian build_sandwich_hamiltonian(const SandwichSpec& spec);

// Complex band energy E(q) of the homogeneous chain.
Complex dispersion(double kappa, double beta, double gamma, double phi, double q);
// Re dE/dq; independent of beta, gamma and phi.
double group_velocity(double kappa, double q);

inline constexpr double kAdiabaticityWarnRatio = 0.2;

struct AdiabaticReduction {
  Complex J1;  // effective hopping a_n -> a_{n+1}
  Complex J2;  // effective hopping a_n -> a_{n-1}
  std::vector<Complex> U_eff;
  double adiabaticity_ratio = 0.0;
  bool adiabaticity_warning = false;
  // Set when U_b = i J^2 / beta with beta > 0, i.e. the reduced model is a
  // ChainSpec with phi = 2 theta and gamma = Gamma - 2 beta.
  std::optional<ChainSpec> chain;
  int index_origin = 0;
};

AdiabaticReduction adiabatic_reduce(const SawtoothSpec& spec);

// Tridiagonal operator diag U_eff, upper J1, lower J2 over the A cells.
Hamiltonian build_effective_hamiltonian(const AdiabaticReduction& reduction);

}  // namespace nhl
