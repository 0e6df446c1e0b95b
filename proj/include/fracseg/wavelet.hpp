#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fracseg/synth.hpp"

namespace fracseg {

enum class WaveletKind { CompactPoly, BandLimited };

/// Analyzing function. Immutable after construction.
///
/// CompactPoly(q): psi(t) = t^2 (1-t)^2 Q(t) on [0,1] with deg Q = q, chosen
/// so that the first q moments vanish, unit L2 norm.
/// BandLimited(lambda, mu): real even Fourier transform supported on
/// lambda <= |xi| <= mu; psi itself is tabulated on its effective support.
class MotherWavelet {
 public:
  static MotherWavelet compact_poly(int q);
  static MotherWavelet band_limited(double lambda, double mu);

  WaveletKind kind() const { return kind_; }
  /// q for CompactPoly; 0 for BandLimited (every moment vanishes).
  int vanishing_moments() const { return q_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Effective support [support_lo, support_hi]; psi is treated as zero outside.
  double support_lo() const { return support_lo_; }
  double support_hi() const { return support_hi_; }

  double operator()(double t) const;
  double derivative(double t) const;
  std::complex<double> fourier(double xi) const;

  /// Coefficients of psi on [0,1] as a polynomial in u = 2t - 1 (CompactPoly only).
  const std::vector<double>& coefficients() const { return coeffs_; }
  /// Same basis for psi'(t) = d psi / dt.
  const std::vector<double>& derivative_coefficients() const { return dcoeffs_; }
  /// Exact moment int t^r psi(t) dt (CompactPoly only).
  double moment(int r) const;

  std::string describe() const;

 private:
  MotherWavelet() = default;

  WaveletKind kind_ = WaveletKind::CompactPoly;
  int q_ = 0;
  double lambda_ = 0.0;
  double mu_ = 0.0;
  double support_lo_ = 0.0;
  double support_hi_ = 1.0;

  std::vector<double> coeffs_;
  std::vector<double> dcoeffs_;

  double amplitude_ = 0.0;
  double step_ = 0.0;
  std::vector<double> table_;
  std::vector<double> dtable_;

  double band_value(double xi) const;
  double band_psi_direct(double t) const;
  double band_dpsi_direct(double t) const;
};

MotherWavelet make_compact_poly(int q);
MotherWavelet make_band_limited(double lambda, double mu);

/// Fourier transform int psi(t) e^{-i xi t} dt.
std::complex<double> psi_hat(const MotherWavelet& w, double xi);

/// Discretized coefficient (delta / sqrt(a)) sum_{p=1}^{N} psi((p delta - b)/a) X_{p delta}.
/// Scale and shift are in time units. The window b + a [support_lo, support_hi]
/// must lie inside [0, N delta].
double coeff(const SampledPath& path, const MotherWavelet& w, double a, double b);
double coeff(std::span<const double> values, double delta, const MotherWavelet& w, double a,
             double b);

}  // namespace fracseg
