#pragma once

#include <Eigen/Dense>

#include <sstream>
#include <string>

namespace etgnn {

/// Dense row-major matrix; rows index nodes, columns index features.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using RowVector = RowVectorX<double>;
using Index = Eigen::Index;

/// Floor applied to norms, Dirichlet strengths and uncertainty masses.
inline constexpr double kEpsilon = 1e-12;

template <typename Derived>
std::string shape_string(const Eigen::EigenBase<Derived>& m) {
    std::ostringstream os;
    os << "[" << m.rows() << "x" << m.cols() << "]";
    return os.str();
}

}  // namespace etgnn
