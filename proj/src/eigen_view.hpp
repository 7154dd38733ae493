#pragma once

#include <Eigen/Dense>

#include "micontrast/numerics.hpp"

namespace micontrast::detail {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMajor>;
using ConstMatrixView = Eigen::Map<const RowMajor>;
using VectorView = Eigen::Map<Eigen::VectorXd>;
using ConstVectorView = Eigen::Map<const Eigen::VectorXd>;

inline MatrixView view(Matrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

inline ConstMatrixView view(const Matrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

inline VectorView view(AlignedVector& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline ConstVectorView view(const AlignedVector& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace micontrast::detail
