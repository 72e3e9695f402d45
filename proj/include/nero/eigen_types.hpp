#ifndef NERO_EIGEN_TYPES_HPP
#define NERO_EIGEN_TYPES_HPP

#include <Eigen/Dense>

#include "nero/individual_set.hpp"

namespace nero {

// Row-major so that an embedding row is contiguous.
template <typename Scalar>
using RowMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RowMatrix = RowMatrixT<double>;
using Vector = VectorT<double>;

/// Σ_{x ∈ members} table.row(x), accumulated in ascending index order so the
/// result is independent of how the set was assembled.
template <typename Derived>
VectorT<typename Derived::Scalar> sum_rows(const Eigen::MatrixBase<Derived>& table, const IndividualSet& members) {
  VectorT<typename Derived::Scalar> s = VectorT<typename Derived::Scalar>::Zero(table.cols());
  members.for_each([&](IndividualId x) { s.noalias() += table.row(x).transpose(); });
  return s;
}

/// Elementwise logistic sigmoid, stable for large |z|.
template <typename Derived>
VectorT<typename Derived::Scalar> sigmoid(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  return z.unaryExpr([](Scalar v) {
    if (v >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-v));
    const Scalar e = std::exp(v);
    return e / (Scalar(1) + e);
  });
}

}  // namespace nero

#endif  // NERO_EIGEN_TYPES_HPP
