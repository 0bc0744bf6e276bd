#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nhl {

using Complex = std::complex<double>;

// Square complex band matrix. Entries with |col - row| outside the band are
// kept in a short list of wrap entries (periodic corners).
class BandMatrix {
 public:
  BandMatrix(std::size_t dim, std::size_t lower_bandwidth, std::size_t upper_bandwidth);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t lower_bandwidth() const noexcept { return lower_; }
  std::size_t upper_bandwidth() const noexcept { return upper_; }

  Complex at(std::size_t row, std::size_t col) const;
  // Accumulates into (row, col); out-of-band positions become wrap entries.
  void add(std::size_t row, std::size_t col, Complex value);

  // y = A x. x and y must not alias.
  void apply(std::span<const Complex> x, std::span<Complex> y) const;

  Eigen::MatrixXcd dense() const;
  double max_abs_entry() const;

 private:
  struct WrapEntry {
    std::size_t row;
    std::size_t col;
    Complex value;
  };

  bool in_band(std::size_t row, std::size_t col) const noexcept {
    return col + lower_ >= row && col <= row + upper_;
  }
  std::size_t slot(std::size_t row, std::size_t col) const noexcept {
    return row * width_ + (col + lower_ - row);
  }

  std::size_t dim_;
  std::size_t lower_;
  std::size_t upper_;
  std::size_t width_;
  std::vector<Complex> data_;
  std::vector<WrapEntry> wrap_;
};

}  // namespace nhl
