#ifndef HETNET_TYPES_HPP
#define HETNET_TYPES_HPP

#include <Eigen/Core>

namespace hetnet {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using BoolVec = Eigen::Array<bool, Eigen::Dynamic, 1>;

}  // namespace hetnet

#endif  // HETNET_TYPES_HPP
