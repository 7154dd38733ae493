#pragma once

#include <cstddef>

#include "micontrast/numerics.hpp"

namespace micontrast {

/// n x m critic log-scores. Column 0 of row i scores the positive pair
/// (x_i, y_i); columns 1..m-1 score (x_i, negative_ij).
class LogitMatrix {
 public:
  /// Throws std::invalid_argument unless n >= 1, m >= 2 and every entry is finite.
  explicit LogitMatrix(Matrix values);
  LogitMatrix(std::size_t n, std::size_t m, double fill = 0.0);

  std::size_t n() const { return values_.rows(); }
  std::size_t m() const { return values_.cols(); }

  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }

  const Matrix& matrix() const { return values_; }

 private:
  Matrix values_;
};

}  // namespace micontrast
