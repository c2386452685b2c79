#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <limits>
#include <string>

#include "disf/errors.hpp"

namespace disf {

constexpr double kMaxConditionNumber = 1e12;
constexpr double kDefaultDamping = 1e-9;

// Linear least-squares problem min ||A x - b||^2, one row per residual.
struct LeastSquaresSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  LeastSquaresSystem() = default;
  LeastSquaresSystem(Eigen::Index rows, Eigen::Index cols)
      : a(Eigen::MatrixXd::Zero(rows, cols)), b(Eigen::VectorXd::Zero(rows)) {}

  void validate() const {
    if (a.rows() < 1 || a.cols() < 1)
      throw InvalidInput("least-squares system needs at least one row/column");
    if (a.rows() != b.size())
      throw InvalidInput("least-squares system: A and b row counts differ");
    if (!a.allFinite() || !b.allFinite())
      throw InvalidInput("least-squares system has non-finite entries");
  }

  double residual_norm(const Eigen::VectorXd& x) const {
    return (a * x - b).norm();
  }
};

// Damped normal equations: x = (A^T A + lambda I)^-1 A^T b. The system is
// rejected when the eigenvalue ratio of the damped Gram matrix exceeds 1e12.
inline Eigen::VectorXd solve_normal_equations(const LeastSquaresSystem& sys,
                                              double lambda = kDefaultDamping,
                                              const std::string& stage = "least squares") {
  sys.validate();
  if (!(lambda >= 0.0)) throw InvalidInput("damping must be non-negative");
  const Eigen::Index k = sys.a.cols();
  Eigen::MatrixXd gram = sys.a.transpose() * sys.a;
  gram.diagonal().array() += lambda;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxConditionNumber)
    throw RankDeficient(stage, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());

  Eigen::VectorXd x = gram.ldlt().solve(sys.a.transpose() * sys.b);
  if (x.size() != k || !x.allFinite()) throw RankDeficient(stage, std::numeric_limits<double>::infinity());
  return x;
}

}  // namespace disf
