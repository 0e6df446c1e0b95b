#include "fracseg/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>

#include "fracseg/errors.hpp"
#include "fracseg/rng.hpp"

namespace fracseg {

namespace {

constexpr std::size_t kMaxCholeskySize = 4096;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<double> simulate_cholesky(const Autocovariance& autocov, std::size_t n,
                                      std::uint64_t seed) {
  if (n > kMaxCholeskySize) {
    throw NumericError("covariance is not positive definite: circulant embedding failed and n=" +
                       std::to_string(n) + " is too large for the Cholesky fallback");
  }
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double r = autocov(i - j);
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
      cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("covariance is not positive definite");
  }
  GaussianSource gauss(seed);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss();
  const Eigen::VectorXd x = llt.matrixL() * z;
  return {x.data(), x.data() + x.size()};
}

std::vector<double> simulate_segment(const PiecewiseSpec& spec, std::size_t j, std::size_t n,
                                     double delta, std::uint64_t seed) {
  const double expo = spec.exponents[j];
  const double sigma = spec.sigmas[j];
  const double sigma2 = sigma * sigma;
  switch (spec.family) {
    case Family::FGN: {
      const double hurst = 0.5 * (1.0 + expo);
      return simulate_stationary(
          [=](std::size_t k) { return fgn_autocov(hurst, sigma2, k); }, n, seed);
    }
    case Family::FARIMA: {
      const auto acv = farima_autocov_sequence(0.5 * expo, sigma2, next_pow2(n) + 2);
      return simulate_stationary([&acv](std::size_t k) { return acv.at(k); }, n, seed);
    }
    case Family::FBM: {
      std::vector<double> out(n, 0.0);
      if (n < 2) return out;
      const auto inc = simulate_stationary(
          [=](std::size_t k) { return fgn_autocov(expo, sigma2, k); }, n - 1, seed);
      double acc = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        acc += inc[i - 1];
        out[i] = acc;
      }
      return out;
    }
    case Family::LocallyFractional: {
      // Riemann sum of the harmonizable integral on xi_k = k*step with
      // step = 2 pi / (M delta); the exponentials at t_i = i delta are then
      // the M-point DFT kernel, so frequencies are folded modulo M.
      const std::size_t M = next_pow2(2 * n);
      const double step = 2.0 * std::numbers::pi / (static_cast<double>(M) * delta);
      const double xi_max = spec.f_max * 1.8;
      const auto K = static_cast<std::size_t>(std::ceil(xi_max / step));
      GaussianSource gauss(seed);
      std::vector<std::complex<double>> folded(M);
      double offset = 0.0;
      for (std::size_t k = 1; k <= K; ++k) {
        const double xi = static_cast<double>(k) * step;
        const double c =
            std::sqrt(2.0 * step * locfrac_spectral_weight(xi, expo, sigma, spec.f_min, spec.f_max));
        const double re = c * gauss();
        const double im = c * gauss();
        folded[k % M] += std::complex<double>(re, im);
        offset += re;
      }
      Eigen::FFT<double> fft;
      fft.SetFlag(Eigen::FFT<double>::Unscaled);
      std::vector<std::complex<double>> series;
      fft.inv(series, folded);
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = series[i].real() - offset;
      out[0] = 0.0;
      return out;
    }
  }
  throw DomainError("unknown family");
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::FGN:
      return "fgn";
    case Family::FARIMA:
      return "farima";
    case Family::FBM:
      return "fbm";
    case Family::LocallyFractional:
      return "locfrac";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  const std::string s = lower(name);
  if (s == "fgn") return Family::FGN;
  if (s == "farima") return Family::FARIMA;
  if (s == "fbm") return Family::FBM;
  if (s == "locfrac" || s == "locally-fractional" || s == "locallyfractional") {
    return Family::LocallyFractional;
  }
  throw DomainError("unknown family '" + std::string(name) +
                    "' (expected fgn, farima, fbm or locfrac)");
}

bool is_long_memory(Family family) {
  return family == Family::FGN || family == Family::FARIMA;
}

void PiecewiseSpec::validate() const {
  const std::size_t m = tau_stars.size();
  if (exponents.size() != m + 1) {
    throw DomainError("expected " + std::to_string(m + 1) + " exponents for " +
                      std::to_string(m) + " change points, got " +
                      std::to_string(exponents.size()));
  }
  if (sigmas.size() != m + 1) {
    throw DomainError("expected " + std::to_string(m + 1) + " sigmas, got " +
                      std::to_string(sigmas.size()));
  }
  double prev = 0.0;
  for (double tau : tau_stars) {
    if (!(tau > prev && tau < 1.0)) {
      throw DomainError("change fractions must be strictly increasing inside (0,1)");
    }
    prev = tau;
  }
  for (double s : sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigmas must be positive");
  }
  for (double e : exponents) {
    if (!std::isfinite(e)) throw DomainError("exponents must be finite");
    if (family != Family::LocallyFractional && !(e > 0.0 && e < 1.0)) {
      throw DomainError("exponent " + std::to_string(e) + " outside (0,1) for family " +
                        std::string(to_string(family)));
    }
  }
  if (family == Family::LocallyFractional && !(f_min > 0.0 && f_min < f_max)) {
    throw DomainError("frequency band requires 0 < f_min < f_max");
  }
}

void SampledPath::validate() const {
  if (values.size() < 3) throw DomainError("a path needs at least 3 samples (N >= 2)");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("sampling step must be positive");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DomainError("non-finite sample at index " + std::to_string(i));
    }
  }
}

double fgn_autocov(double hurst, double sigma2, std::size_t lag) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("FGN Hurst parameter must lie in (0,1)");
  if (!(sigma2 > 0.0)) throw DomainError("FGN variance must be positive");
  if (lag == 0) return sigma2;
  const double k = static_cast<double>(lag);
  const double e = 2.0 * hurst;
  return 0.5 * sigma2 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + std::pow(k - 1.0, e));
}

std::vector<double> farima_autocov_sequence(double d, double sigma2, std::size_t n) {
  if (!(d > 0.0 && d < 0.5)) throw DomainError("FARIMA memory parameter must lie in (0,1/2)");
  if (!(sigma2 > 0.0)) throw DomainError("FARIMA innovation variance must be positive");
  std::vector<double> r(n);
  if (n == 0) return r;
  r[0] = sigma2 * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double kk = static_cast<double>(k);
    r[k + 1] = r[k] * (kk + d) / (kk + 1.0 - d);
  }
  return r;
}

double farima_autocov(double d, double sigma2, std::size_t lag) {
  return farima_autocov_sequence(d, sigma2, lag + 1).back();
}

std::vector<double> simulate_stationary(const Autocovariance& autocov, std::size_t n,
                                        std::uint64_t seed) {
  if (n < 2) throw DomainError("simulate_stationary needs n >= 2");
  const std::size_t half = next_pow2(n - 1);
  const std::size_t size = 2 * half;

  std::vector<std::complex<double>> row(size);
  for (std::size_t k = 0; k <= half; ++k) row[k] = autocov(k);
  for (std::size_t k = half + 1; k < size; ++k) row[k] = row[size - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> eig;
  fft.fwd(eig, row);

  double max_eig = 0.0;
  double min_eig = 0.0;
  for (const auto& e : eig) {
    max_eig = std::max(max_eig, e.real());
    min_eig = std::min(min_eig, e.real());
  }
  if (!(max_eig > 0.0) || min_eig < -1e-10 * max_eig) {
    return simulate_cholesky(autocov, n, seed);
  }

  GaussianSource gauss(seed);
  const double scale = 1.0 / static_cast<double>(size);
  std::vector<std::complex<double>> w(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double s = std::sqrt(std::max(eig[k].real(), 0.0) * scale);
    const double re = gauss();
    const double im = gauss();
    w[k] = {s * re, s * im};
  }
  std::vector<std::complex<double>> y;
  fft.fwd(y, w);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i].real();
  return out;
}

SampledPath simulate_piecewise(const PiecewiseSpec& spec, std::size_t N, double delta,
                               std::uint64_t seed) {
  spec.validate();
  if (!(delta > 0.0)) throw DomainError("sampling step must be positive");
  if (N < 2) throw DomainError("N must be at least 2");

  const std::size_t m = spec.num_changes();
  std::vector<std::size_t> bounds{0};
  for (double tau : spec.tau_stars) {
    bounds.push_back(static_cast<std::size_t>(std::floor(static_cast<double>(N) * tau)));
  }
  bounds.push_back(N + 1);

  SampledPath path;
  path.delta = delta;
  path.values.reserve(N + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const std::size_t n = bounds[j + 1] - bounds[j];
    if (n < 2) {
      throw DomainError("segment " + std::to_string(j) + " holds fewer than 2 samples; increase N");
    }
    const auto seg = simulate_segment(spec, j, n, delta, derive_seed(seed, j));
    path.values.insert(path.values.end(), seg.begin(), seg.end());
  }
  return path;
}

SampledPath add_polynomial_trend(SampledPath path, std::span<const double> coeffs) {
  if (coeffs.empty()) return path;
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const double t = static_cast<double>(i) * path.delta;
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    path.values[i] += acc;
  }
  return path;
}

double locfrac_spectral_weight(double xi, double hurst, double sigma, double f_min,
                               double f_max) {
  const double a = std::abs(xi);
  const double sigma2 = sigma * sigma;
  auto in_band = [&](double f) { return sigma2 * std::pow(f, -1.0 - 2.0 * hurst); };
  if (a < f_min) {
    const double width = 0.1 * f_min;
    const double z = (f_min - a) / width;
    return in_band(f_min) * std::exp(-0.5 * z * z);
  }
  if (a > f_max) {
    const double width = 0.1 * f_max;
    const double z = (a - f_max) / width;
    return in_band(f_max) * std::exp(-0.5 * z * z);
  }
  return in_band(a);
}

}  // namespace fracseg
