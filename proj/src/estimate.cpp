#include "fracseg/estimate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "fracseg/distributions.hpp"
#include "fracseg/errors.hpp"

namespace fracseg {

std::string_view to_string(Method method) { return method == Method::OLS ? "ols" : "fgls"; }

ExponentRange plugin_range(Family family) {
  switch (family) {
    case Family::FGN:
    case Family::FARIMA:
    case Family::FBM:
      return {0.005, 0.995};
    case Family::LocallyFractional:
      return {-2.0, 3.0};
  }
  return {0.005, 0.995};
}

Eigen::MatrixXd gamma_for_family(Family family, double alpha, const ScaleGrid& grid,
                                 const MotherWavelet& w, bool* clamped) {
  const ExponentRange range = plugin_range(family);
  const double raw = exponent_from_alpha(family, alpha);
  const double e = std::isfinite(raw) ? std::clamp(raw, range.lo, range.hi) : 0.5;
  if (clamped) *clamped = e != raw;
  switch (family) {
    case Family::FGN:
    case Family::FARIMA:
      return gamma_lrd(e, grid, w);
    case Family::FBM:
      return gamma_fbm(e, grid, w);
    case Family::LocallyFractional:
      return gamma_locfrac(e, grid, w, grid.trim);
  }
  throw DomainError("unknown family");
}

Eigen::MatrixXd regularize(const Eigen::MatrixXd& gamma) {
  const double ell = static_cast<double>(gamma.rows());
  const double ridge = 1e-8 * gamma.trace() / ell;
  Eigen::MatrixXd out = gamma;
  out.diagonal().array() += ridge;
  return out;
}

ThetaEstimate ols_theta(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L,
                        const Eigen::MatrixXd* gamma, double n_eff) {
  if (L.cols() != 2 || L.rows() != Y.size() || L.rows() < 3) {
    throw DomainError("design matrix must be ell x 2 with ell >= 3 matching Y");
  }
  const Eigen::Matrix2d LtL = L.transpose() * L;
  Eigen::LDLT<Eigen::Matrix2d> ldlt(LtL);
  if (ldlt.info() != Eigen::Success || !(std::abs(LtL.determinant()) > 0.0)) {
    throw NumericError("design matrix is rank deficient");
  }
  const Eigen::Vector2d theta = ldlt.solve(L.transpose() * Y);
  ThetaEstimate est;
  est.alpha = theta(0);
  est.log_beta = theta(1);
  est.method = Method::OLS;
  est.n_eff = n_eff;
  if (gamma) {
    if (!(n_eff > 0.0)) throw DomainError("n_eff must be positive");
    const Eigen::MatrixXd proj = ldlt.solve(L.transpose());
    const Eigen::Matrix2d sigma = proj * (*gamma) * proj.transpose();
    est.cov = 0.5 * (sigma + sigma.transpose()) / n_eff;
  }
  return est;
}

ThetaEstimate fgls_theta(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L,
                         const Eigen::MatrixXd& gamma, double n_eff) {
  if (gamma.rows() != Y.size() || gamma.cols() != Y.size()) {
    throw DomainError("weight matrix size does not match Y");
  }
  if (!(n_eff > 0.0)) throw DomainError("n_eff must be positive");
  const Eigen::MatrixXd G = regularize(gamma);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  const bool factored = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                        (ldlt.vectorD().array() > 0.0).all();
  if (!factored) {
    ThetaEstimate est = ols_theta(Y, L, &gamma, n_eff);
    est.method = Method::FGLS;
    est.fallback = true;
    return est;
  }
  const Eigen::MatrixXd GiL = ldlt.solve(L);
  const Eigen::Matrix2d info = L.transpose() * GiL;
  const Eigen::Matrix2d M = info.inverse();
  const Eigen::Vector2d theta = M * (GiL.transpose() * Y);
  ThetaEstimate est;
  est.alpha = theta(0);
  est.log_beta = theta(1);
  est.method = Method::FGLS;
  est.n_eff = n_eff;
  est.cov = 0.5 * (M + M.transpose()) / n_eff;
  return est;
}

GofResult gof(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L, const ThetaEstimate& theta,
              const Eigen::MatrixXd& gamma, double n_eff) {
  const Eigen::Vector2d t(theta.alpha, theta.log_beta);
  const Eigen::VectorXd r = Y - L * t;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(regularize(gamma));
  if (ldlt.info() != Eigen::Success) throw NumericError("weight matrix could not be factored");
  GofResult out;
  out.df = static_cast<int>(Y.size()) - 2;
  out.T = std::max(0.0, n_eff * r.dot(ldlt.solve(r)));
  out.p_value = chi2_sf(out.T, out.df);
  return out;
}

std::array<ConfidenceInterval, 2> confidence_interval(const ThetaEstimate& est, double level) {
  if (!(level >= 0.0 && level < 1.0)) throw DomainError("confidence level must lie in [0,1)");
  const double z = level == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + level));
  const double sa = std::sqrt(std::max(0.0, est.cov(0, 0)));
  const double sb = std::sqrt(std::max(0.0, est.cov(1, 1)));
  return {ConfidenceInterval{est.alpha - z * sa, est.alpha + z * sa},
          ConfidenceInterval{est.log_beta - z * sb, est.log_beta + z * sb}};
}

double exponent_from_alpha(Family family, double alpha) {
  return is_long_memory(family) ? alpha : 0.5 * (alpha - 1.0);
}

double alpha_from_exponent(Family family, double exponent) {
  return is_long_memory(family) ? exponent : 2.0 * exponent + 1.0;
}

double hurst_from_alpha(Family family, double alpha) {
  return is_long_memory(family) ? 0.5 * (1.0 + alpha) : 0.5 * (alpha - 1.0);
}

}  // namespace fracseg
