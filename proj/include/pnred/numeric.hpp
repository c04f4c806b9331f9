#pragma once

#include <Eigen/Dense>

#include <vector>

#include "pnred/matrix.hpp"

namespace pnred {

// Relative singular-value cut used for every numeric rank decision.
// Overridable through the PNRED_TOLERANCE environment variable.
inline constexpr double kDefaultTolerance = 1e-9;
double default_tolerance();

struct RankDecision {
  int rank = 0;
  bool ill_conditioned = false;
  double threshold = 0.0;
  std::vector<double> singular_values;  // descending
};

// Singular values below tol * max(sigma_max, 1) count as zero. The decision
// is flagged when the gap between the smallest kept and largest dropped
// singular value (or the threshold itself) is less than a factor 10.
RankDecision numeric_rank(const Eigen::MatrixXd& m, double tol = default_tolerance());

// Orthonormal bases from the SVD, using the rank decided above.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, int rank);
Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, int rank);

Eigen::MatrixXd evaluate(const Matrix<Expr>& m, const std::vector<VarId>& ids, const std::vector<double>& x);
Eigen::VectorXd evaluate(const std::vector<Expr>& v, const std::vector<VarId>& ids, const std::vector<double>& x);
double evaluate(const Expr& e, const std::vector<VarId>& ids, const std::vector<double>& x);

}  // namespace pnred
