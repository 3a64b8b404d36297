#include "subart/baselines.hpp"

#include <stdexcept>

namespace subart {

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Z(X.rows(), X.cols() + 1);
  Z.col(0).setOnes();
  Z.rightCols(X.cols()) = X;
  return Z;
}

LinearFit fit_multi(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                    const std::vector<std::string>& column_names) {
  if (!X.allFinite() || !Y.allFinite())
    throw std::invalid_argument("non-finite values in design or outcomes");
  const Eigen::MatrixXd Z = with_intercept(X);
  const Eigen::Index n = Z.rows();
  const Eigen::Index p1 = Z.cols();
  if (n <= p1)
    throw std::invalid_argument("need n > p + 1 observations");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-10);
  if (qr.rank() < p1) {
    std::string msg = "rank-deficient design; collinear columns:";
    const auto perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p1; ++k) {
      const Eigen::Index col = perm(k);
      if (col == 0)
        msg += " (intercept)";
      else if (static_cast<std::size_t>(col - 1) < column_names.size())
        msg += " " + column_names[static_cast<std::size_t>(col - 1)];
      else
        msg += " #" + std::to_string(col - 1);
    }
    throw std::invalid_argument(msg);
  }

  LinearFit fit;
  fit.coefficients = qr.solve(Y);
  const Eigen::MatrixXd resid = Y - Z * fit.coefficients;
  fit.residual_cov =
      resid.transpose() * resid / static_cast<double>(n - p1);
  return fit;
}

}  // namespace

LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<std::string>& column_names) {
  return fit_multi(X, y, column_names);
}

LinearFit fit_sur(const Eigen::MatrixXd& X, const Eigen::MatrixX2d& Y,
                  const std::vector<std::string>& column_names) {
  return fit_multi(X, Y, column_names);
}

}  // namespace subart
