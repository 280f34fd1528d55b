#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gvb {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMat = Mat<cplx>;
using CVec = Vec<cplx>;
using RMat = Mat<double>;
using RVec = Vec<double>;
using CMat2 = Eigen::Matrix2cd;

/// Malformed input: bad graph data, non-unitary transport, invalid parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured resource budget (enumeration size, matrix dimension) was exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to produce a result meeting its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

/// ‖A*A − I‖_F.
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  const auto n = a.cols();
  return (a.adjoint() * a - Mat<S>::Identity(n, n)).norm();
}

/// ‖A − A*‖_F.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).norm();
}

}  // namespace gvb
