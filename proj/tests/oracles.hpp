#pragma once

// Reference constructions written straight from the model equations, kept
// separate from the library builders they check.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
inline const C I{0.0, 1.0};

inline C dispersion(double kappa, double beta, double gamma, double phi, double q) {
  return 2.0 * kappa * std::cos(q) + 2.0 * I * beta * std::cos(q + phi) - I * gamma;
}

struct Defect {
  int site;
  double v;
  double xi;
};

// Row n is the equation i dc_n/dt = ... for site origin + n.
inline Eigen::MatrixXcd chain(double kappa, double beta, double gamma, double phi, int n, int origin,
                              bool periodic, const std::vector<Defect>& defects = {}) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  const C fwd = kappa + I * beta * std::exp(I * phi);   // c_n picks up c_{n+1}
  const C bwd = kappa + I * beta * std::exp(-I * phi);  // c_n picks up c_{n-1}
  for (int r = 0; r < n; ++r) {
    H(r, r) = -I * gamma;
    if (r + 1 < n) H(r, r + 1) = fwd;
    else if (periodic) H(r, 0) = fwd;
    if (r > 0) H(r, r - 1) = bwd;
    else if (periodic) H(r, n - 1) = bwd;
  }
  for (const auto& d : defects) H(d.site - origin, d.site - origin) += d.v + I * d.xi;
  return H;
}

// Hermitian core |n| < N, boundary sites +-N, lossy leads with phase -q0 on
// the left and +q0 on the right.
inline Eigen::MatrixXcd sandwich(double kappa, double beta, double gamma, int n, int origin, int N, double q0,
                                 double Vc, double xi) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const int s = origin + r;
    C diag, next, prev;
    if (s < -N) {
      diag = -I * gamma;
      next = kappa + I * beta * std::exp(-I * q0);
      prev = kappa + I * beta * std::exp(I * q0);
    } else if (s == -N) {
      diag = Vc + I * xi;
      next = kappa;
      prev = kappa + I * beta * std::exp(I * q0);
    } else if (s < N) {
      diag = 0.0;
      next = kappa;
      prev = kappa;
    } else if (s == N) {
      diag = Vc + I * xi;
      next = kappa + I * beta * std::exp(I * q0);
      prev = kappa;
    } else {
      diag = -I * gamma;
      next = kappa + I * beta * std::exp(I * q0);
      prev = kappa + I * beta * std::exp(-I * q0);
    }
    H(r, r) = diag;
    if (r + 1 < n) H(r, r + 1) = next;
    if (r > 0) H(r, r - 1) = prev;
  }
  return H;
}

// Interleaved (a_1, b_1, a_2, b_2, ...) sawtooth; the last b only sees its own a.
inline Eigen::MatrixXcd sawtooth(double kappa, double J, double theta, double Gamma, C Ub, int cells) {
  const int d = 2 * cells;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
  auto a = [](int k) { return 2 * k; };
  auto b = [](int k) { return 2 * k + 1; };
  for (int k = 0; k < cells; ++k) {
    H(a(k), a(k)) = -I * Gamma;
    if (k + 1 < cells) H(a(k), a(k + 1)) = kappa;
    if (k > 0) H(a(k), a(k - 1)) = kappa;
    H(a(k), b(k)) = J * std::exp(I * theta);
    if (k > 0) H(a(k), b(k - 1)) = J * std::exp(-I * theta);
    H(b(k), b(k)) = Ub;
    if (k + 1 < cells) H(b(k), a(k + 1)) = J * std::exp(I * theta);
    H(b(k), a(k)) = J * std::exp(-I * theta);
  }
  return H;
}

// Matrix exponential by eigen-decomposition of a Hermitian matrix.
inline Eigen::VectorXcd hermitian_propagate(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& c0, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::VectorXcd phase =
      (es.eigenvalues().cast<C>() * C(0.0, -t)).array().exp().matrix();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * c0;
}

}  // namespace oracle
