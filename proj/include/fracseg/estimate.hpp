#pragma once

#include <Eigen/Core>

#include <array>
#include <string_view>

#include "fracseg/scalogram.hpp"
#include "fracseg/synth.hpp"
#include "fracseg/wavelet.hpp"

namespace fracseg {

enum class Method { OLS, FGLS };
std::string_view to_string(Method method);

struct ThetaEstimate {
  double alpha = 0.0;
  double log_beta = 0.0;
  Method method = Method::OLS;
  /// Asymptotic covariance of (alpha, log_beta) already divided by n_eff.
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  double n_eff = 0.0;
  /// FGLS could not factor the weight matrix and returned the OLS solution.
  bool fallback = false;
};

struct GofResult {
  double T = 0.0;
  int df = 0;
  double p_value = 1.0;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Limiting covariance of sqrt(n_eff) * (log S_1, ..., log S_ell) with
// n_eff = segment length / base scale.

/// Stationary long memory with spectral pole |xi|^{-D}.
Eigen::MatrixXd gamma_lrd(double D, const ScaleGrid& grid, const MotherWavelet& w);
/// Fractional Brownian motion with Hurst index H.
Eigen::MatrixXd gamma_fbm(double H, const ScaleGrid& grid, const MotherWavelet& w);
/// Locally fractional process with spectral weight |xi|^{-1-2H} in band;
/// needs a band-limited wavelet.
Eigen::MatrixXd gamma_locfrac(double H, const ScaleGrid& grid, const MotherWavelet& w,
                              double trim);
/// Reference evaluation of gamma_lrd through Fourier-domain integrals; slow.
Eigen::MatrixXd gamma_lrd_spectral(double D, const ScaleGrid& grid, const MotherWavelet& w);

/// Valid range used for plug-in exponents.
struct ExponentRange {
  double lo;
  double hi;
};
ExponentRange plugin_range(Family family);

/// Gamma at slope alpha for the family; the exponent derived from alpha is
/// clamped to plugin_range and `clamped` reports whether that happened.
Eigen::MatrixXd gamma_for_family(Family family, double alpha, const ScaleGrid& grid,
                                 const MotherWavelet& w, bool* clamped = nullptr);

/// Adds 1e-8 * trace / ell to the diagonal.
Eigen::MatrixXd regularize(const Eigen::MatrixXd& gamma);

/// Least squares fit of Y on L; with a Gamma the covariance is the sandwich
/// (L'L)^{-1} L' Gamma L (L'L)^{-1} / n_eff, otherwise zero.
ThetaEstimate ols_theta(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L,
                        const Eigen::MatrixXd* gamma = nullptr, double n_eff = 1.0);
/// Weighted fit with weight matrix regularize(gamma)^{-1}; covariance
/// (L' Gamma^{-1} L)^{-1} / n_eff.
ThetaEstimate fgls_theta(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L,
                         const Eigen::MatrixXd& gamma, double n_eff);
/// T = n_eff (Y - L theta)' Gamma^{-1} (Y - L theta), chi-square(ell-2) tail.
GofResult gof(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L, const ThetaEstimate& theta,
              const Eigen::MatrixXd& gamma, double n_eff);

/// Intervals for (alpha, log_beta): estimate -/+ z_{(1+level)/2} sqrt(var).
std::array<ConfidenceInterval, 2> confidence_interval(const ThetaEstimate& est, double level);

/// D for the long-memory families, H for FBM and locally fractional.
double exponent_from_alpha(Family family, double alpha);
double alpha_from_exponent(Family family, double exponent);
/// Hurst index: (1+D)/2 for long memory, (alpha-1)/2 otherwise.
double hurst_from_alpha(Family family, double alpha);

}  // namespace fracseg
