#include "pnred/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace pnred {

double default_tolerance() {
  if (const char* env = std::getenv("PNRED_TOLERANCE")) {
    try {
      double v = std::stod(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return kDefaultTolerance;
}

RankDecision numeric_rank(const Eigen::MatrixXd& m, double tol) {
  RankDecision d;
  if (m.size() == 0) return d;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) d.singular_values.push_back(s(i));
  double top = d.singular_values.empty() ? 0.0 : d.singular_values.front();
  d.threshold = tol * std::max(top, 1.0);
  for (double v : d.singular_values) {
    if (v > d.threshold) ++d.rank;
  }
  const double kGap = 10.0;
  auto rank = static_cast<std::size_t>(d.rank);
  double kept = rank > 0 ? d.singular_values[rank - 1] : 0.0;
  double dropped = rank < d.singular_values.size() ? d.singular_values[rank] : 0.0;
  if (rank > 0 && kept < kGap * std::max(dropped, d.threshold)) d.ill_conditioned = true;
  if (rank < d.singular_values.size() && dropped * kGap > d.threshold) d.ill_conditioned = true;
  return d;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, int rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::Index n = m.cols();
  return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, int rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(rank);
}

double evaluate(const Expr& e, const std::vector<VarId>& ids, const std::vector<double>& x) {
  return e.eval_with<double>([&](VarId v) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == v) return x[i];
    }
    throw ExprError("unbound variable " + var_name(v));
  });
}

Eigen::MatrixXd evaluate(const Matrix<Expr>& m, const std::vector<VarId>& ids, const std::vector<double>& x) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = evaluate(m(i, j), ids, x);
    }
  }
  return out;
}

Eigen::VectorXd evaluate(const std::vector<Expr>& v, const std::vector<VarId>& ids, const std::vector<double>& x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = evaluate(v[i], ids, x);
  return out;
}

}  // namespace pnred
