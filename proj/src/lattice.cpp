#include "nhlattice/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "nhlattice/error.hpp"

namespace nhl {
namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double value, const char* key) {
  if (!std::isfinite(value)) throw InvalidArgument(std::string(key) + " must be finite", key);
}

}  // namespace

double reduce_phase(double phi) {
  constexpr double pi = std::numbers::pi;
  if (phi > -pi && phi <= pi) return phi;
  const double turns = std::ceil((phi - pi) / (2.0 * pi));
  double r = phi - 2.0 * pi * turns;
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

std::vector<int> ChainSpec::site_labels() const {
  std::vector<int> labels(static_cast<std::size_t>(std::max(n_sites, 0)));
  for (int k = 0; k < n_sites; ++k) labels[static_cast<std::size_t>(k)] = index_origin + k;
  return labels;
}

void ChainSpec::validate() const {
  require_finite(kappa, "kappa");
  require_finite(beta, "beta");
  require_finite(gamma, "gamma");
  require_finite(phi, "phi");
  if (kappa <= 0.0) throw InvalidArgument("kappa must be positive", "kappa");
  if (beta < 0.0) throw InvalidArgument("beta must be non-negative", "beta");
  if (n_sites < 2) throw InvalidArgument("chain needs at least 2 sites", "n_sites");
  std::set<int> seen;
  for (const auto& d : defects) {
    require_finite(d.v_real, "defects.v_real");
    require_finite(d.xi_imag, "defects.xi_imag");
    if (!contains(d.site)) {
      throw InvalidArgument("defect site " + std::to_string(d.site) + " outside chain [" +
                                std::to_string(first_site()) + ", " +
                                std::to_string(last_site()) + "]",
                            "defects.site");
    }
    if (!seen.insert(d.site).second) {
      throw InvalidArgument("duplicate defect site " + std::to_string(d.site), "defects.site");
    }
  }
}

double SawtoothSpec::adiabaticity_ratio() const {
  return std::max(J, 2.0 * kappa) / std::abs(U_b);
}

void SawtoothSpec::validate() const {
  require_finite(kappa, "kappa");
  require_finite(J, "J");
  require_finite(theta, "theta");
  require_finite(Gamma, "Gamma");
  require_finite(U_b.real(), "U_b");
  require_finite(U_b.imag(), "U_b");
  if (kappa <= 0.0) throw InvalidArgument("kappa must be positive", "kappa");
  if (J <= 0.0) throw InvalidArgument("J must be positive", "J");
  if (Gamma < 0.0) throw InvalidArgument("Gamma must be non-negative", "Gamma");
  if (U_b == Complex{}) throw InvalidArgument("U_b must be non-zero", "U_b");
  if (n_cells < 2) throw InvalidArgument("sawtooth needs at least 2 cells", "n_cells");
  if (!V_a.empty() && V_a.size() != static_cast<std::size_t>(n_cells)) {
    throw InvalidArgument("V_a must have one entry per cell", "V_a");
  }
  for (double v : V_a) require_finite(v, "V_a");
}

void SandwichSpec::validate() const {
  chain.validate();
  require_finite(q0, "q0");
  require_finite(V_c, "V_c");
  require_finite(xi, "xi");
  if (N < 1) throw InvalidArgument("N must be positive", "N");
  if (chain.boundary != Boundary::open) {
    throw InvalidArgument("sandwich structure requires an open chain", "boundary");
  }
  if (!(chain.first_site() < -N && chain.last_site() > N)) {
    throw InvalidArgument("chain must strictly contain [-N, N]", "N");
  }
}

// --- Hamiltonian ---------------------------------------------------------

Hamiltonian::Hamiltonian(std::vector<Complex> diag, std::vector<Complex> upper,
                         std::vector<Complex> lower, std::vector<int> site_labels,
                         std::optional<Complex> corner_upper,
                         std::optional<Complex> corner_lower)
    : diag_(std::move(diag)),
      upper_(std::move(upper)),
      lower_(std::move(lower)),
      corner_upper_(corner_upper),
      corner_lower_(corner_lower),
      labels_(std::move(site_labels)) {
  const std::size_t n = diag_.size();
  if (n == 0) throw InvalidArgument("Hamiltonian dimension must be positive");
  if (upper_.size() != n - 1 || lower_.size() != n - 1) {
    throw InvalidArgument("off-diagonals must have length dim - 1");
  }
  if (labels_.size() != n) throw InvalidArgument("site_labels must have length dim");
  if (corner_upper_.has_value() != corner_lower_.has_value()) {
    throw InvalidArgument("periodic corners must be given together");
  }
  if (corner_upper_ && n < 2) throw InvalidArgument("periodic corners need dim >= 2");
}

std::size_t Hamiltonian::index_of(int site) const {
  const auto it = std::find(labels_.begin(), labels_.end(), site);
  if (it == labels_.end()) {
    throw InvalidArgument("site " + std::to_string(site) + " is not on the lattice");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool Hamiltonian::is_hermitian() const {
  for (const auto& d : diag_) {
    if (d.imag() != 0.0) return false;
  }
  for (std::size_t k = 0; k < upper_.size(); ++k) {
    if (lower_[k] != std::conj(upper_[k])) return false;
  }
  if (corner_upper_ && *corner_lower_ != std::conj(*corner_upper_)) return false;
  return true;
}

BandMatrix Hamiltonian::band() const {
  const std::size_t n = dim();
  BandMatrix m(n, n > 1 ? 1 : 0, n > 1 ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) m.add(i, i, diag_[i]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m.add(k, k + 1, upper_[k]);
    m.add(k + 1, k, lower_[k]);
  }
  if (corner_upper_) {
    m.add(n - 1, 0, *corner_upper_);
    m.add(0, n - 1, *corner_lower_);
  }
  return m;
}

Eigen::MatrixXcd Hamiltonian::dense() const { return band().dense(); }

// --- SawtoothOperator ----------------------------------------------------

SawtoothOperator::SawtoothOperator(BandMatrix band, int n_cells, int index_origin)
    : band_(std::move(band)), n_cells_(n_cells), origin_(index_origin) {}

std::size_t SawtoothOperator::a_index(int cell) const {
  const int k = cell - origin_;
  if (k < 0 || k >= n_cells_) throw InvalidArgument("cell label out of range");
  return 2 * static_cast<std::size_t>(k);
}

std::size_t SawtoothOperator::b_index(int cell) const { return a_index(cell) + 1; }

std::vector<int> SawtoothOperator::cell_labels() const {
  std::vector<int> labels(static_cast<std::size_t>(n_cells_));
  for (int k = 0; k < n_cells_; ++k) labels[static_cast<std::size_t>(k)] = origin_ + k;
  return labels;
}

std::vector<int> SawtoothOperator::interleaved_labels() const {
  std::vector<int> labels;
  labels.reserve(dim());
  for (int k = 0; k < n_cells_; ++k) {
    labels.push_back(origin_ + k);
    labels.push_back(origin_ + k);
  }
  return labels;
}

// --- builders ------------------------------------------------------------

Hamiltonian build_chain_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n_sites);
  const double phi = reduce_phase(spec.phi);
  const Complex forward = spec.kappa + kI * spec.beta * std::exp(kI * phi);
  const Complex backward = spec.kappa + kI * spec.beta * std::exp(-kI * phi);

  std::vector<Complex> diag(n, Complex{0.0, -spec.gamma});
  for (const auto& d : spec.defects) {
    diag[static_cast<std::size_t>(d.site - spec.index_origin)] += Complex{d.v_real, d.xi_imag};
  }
  std::vector<Complex> upper(n - 1, forward);
  std::vector<Complex> lower(n - 1, backward);
  if (spec.boundary == Boundary::periodic) {
    return Hamiltonian(std::move(diag), std::move(upper), std::move(lower), spec.site_labels(),
                       forward, backward);
  }
  return Hamiltonian(std::move(diag), std::move(upper), std::move(lower), spec.site_labels());
}

SawtoothOperator build_sawtooth_hamiltonian(const SawtoothSpec& spec) {
  spec.validate();
  const int cells = spec.n_cells;
  const Complex up = spec.J * std::exp(kI * spec.theta);
  const Complex down = spec.J * std::exp(-kI * spec.theta);
  BandMatrix band(2 * static_cast<std::size_t>(cells), 2, 2);
  for (int k = 0; k < cells; ++k) {
    const std::size_t a = 2 * static_cast<std::size_t>(k);
    const std::size_t b = a + 1;
    // i da_n/dt = U_a a_n + kappa (a_{n+1} + a_{n-1}) + J (e^{i theta} b_n + e^{-i theta} b_{n-1})
    band.add(a, a, Complex{spec.potential_a(k), -spec.Gamma});
    if (k + 1 < cells) band.add(a, a + 2, spec.kappa);
    if (k > 0) band.add(a, a - 2, spec.kappa);
    band.add(a, b, up);
    if (k > 0) band.add(a, a - 1, down);
    // i db_n/dt = U_b b_n + J (e^{i theta} a_{n+1} + e^{-i theta} a_n)
    band.add(b, b, spec.U_b);
    if (k + 1 < cells) band.add(b, a + 2, up);
    band.add(b, a, down);
  }
  return SawtoothOperator(std::move(band), cells, spec.index_origin);
}

Hamiltonian build_sandwich_hamiltonian(const SandwichSpec& spec) {
  spec.validate();
  const ChainSpec& c = spec.chain;
  const auto n = static_cast<std::size_t>(c.n_sites);
  const Complex plus = c.kappa + kI * c.beta * std::exp(kI * spec.q0);    // kappa + i beta e^{+i q0}
  const Complex minus = c.kappa + kI * c.beta * std::exp(-kI * spec.q0);  // kappa + i beta e^{-i q0}
  const Complex boundary{spec.V_c, spec.xi};
  const Complex kappa{c.kappa, 0.0};
  const int N = spec.N;

  struct Row {
    Complex diag, to_next, to_prev;
  };
  auto row_for = [&](int site) -> Row {
    if (site < -N) return {Complex{0.0, -c.gamma}, minus, plus};
    if (site == -N) return {boundary, kappa, plus};
    if (site < N) return {Complex{}, kappa, kappa};
    if (site == N) return {boundary, plus, kappa};
    return {Complex{0.0, -c.gamma}, plus, minus};
  };

  std::vector<Complex> diag(n), upper(n - 1), lower(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const Row r = row_for(c.index_origin + static_cast<int>(k));
    diag[k] = r.diag;
    if (k + 1 < n) upper[k] = r.to_next;
    if (k > 0) lower[k - 1] = r.to_prev;
  }
  for (const auto& d : c.defects) {
    diag[static_cast<std::size_t>(d.site - c.index_origin)] += Complex{d.v_real, d.xi_imag};
  }
  return Hamiltonian(std::move(diag), std::move(upper), std::move(lower), c.site_labels());
}

Complex dispersion(double kappa, double beta, double gamma, double phi, double q) {
  return Complex{2.0 * kappa * std::cos(q), 2.0 * beta * std::cos(q + phi) - gamma};
}

double group_velocity(double kappa, double q) { return -2.0 * kappa * std::sin(q); }

AdiabaticReduction adiabatic_reduce(const SawtoothSpec& spec) {
  spec.validate();
  const double J2 = spec.J * spec.J;
  AdiabaticReduction r;
  r.J1 = spec.kappa - J2 * std::exp(2.0 * kI * spec.theta) / spec.U_b;
  r.J2 = spec.kappa - J2 * std::exp(-2.0 * kI * spec.theta) / spec.U_b;
  r.U_eff.resize(static_cast<std::size_t>(spec.n_cells));
  const Complex shift = 2.0 * J2 / spec.U_b;
  for (int k = 0; k < spec.n_cells; ++k) {
    r.U_eff[static_cast<std::size_t>(k)] = Complex{spec.potential_a(k), -spec.Gamma} - shift;
  }
  r.adiabaticity_ratio = spec.adiabaticity_ratio();
  r.adiabaticity_warning = r.adiabaticity_ratio > kAdiabaticityWarnRatio;
  r.index_origin = spec.index_origin;

  if (spec.U_b.real() == 0.0 && spec.U_b.imag() > 0.0) {
    ChainSpec chain;
    chain.kappa = spec.kappa;
    chain.beta = J2 / spec.U_b.imag();
    chain.gamma = spec.Gamma - 2.0 * chain.beta;
    chain.phi = reduce_phase(2.0 * spec.theta);
    chain.n_sites = spec.n_cells;
    chain.index_origin = spec.index_origin;
    chain.boundary = Boundary::open;
    for (int k = 0; k < spec.n_cells; ++k) {
      const double v = spec.potential_a(k);
      if (v != 0.0) chain.defects.push_back({spec.index_origin + k, v, 0.0});
    }
    r.chain = std::move(chain);
  }
  return r;
}

Hamiltonian build_effective_hamiltonian(const AdiabaticReduction& reduction) {
  const std::size_t n = reduction.U_eff.size();
  if (n < 2) throw InvalidArgument("effective chain needs at least 2 sites");
  std::vector<int> labels(n);
  for (std::size_t k = 0; k < n; ++k) labels[k] = reduction.index_origin + static_cast<int>(k);
  return Hamiltonian(reduction.U_eff, std::vector<Complex>(n - 1, reduction.J1),
                     std::vector<Complex>(n - 1, reduction.J2), std::move(labels));
}

}  // namespace nhl
