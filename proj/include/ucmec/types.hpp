#ifndef UCMEC_TYPES_HPP
#define UCMEC_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace ucmec {

using Scalar = double;

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using ArrayXX = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using ArrayX = Eigen::Array<T, Eigen::Dynamic, 1>;

using Matrix = MatrixX<Scalar>;
using Vector = VectorX<Scalar>;
using Array2d = ArrayXX<Scalar>;
using Array1d = ArrayX<Scalar>;
using IntMatrix = MatrixX<int>;
using IntVector = VectorX<int>;

}  // namespace ucmec

#endif
