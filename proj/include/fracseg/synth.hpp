#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracseg {

enum class Family { FGN, FARIMA, FBM, LocallyFractional };

std::string_view to_string(Family family);
/// Accepts "fgn", "farima", "fbm", "locfrac" (case-insensitive).
Family parse_family(std::string_view name);

/// True for the stationary long-memory families (FGN, FARIMA(0,d,0)),
/// whose scaling exponent is the spectral pole exponent D.
bool is_long_memory(Family family);

/// Parameters of a piecewise Gaussian process with m abrupt changes.
///
/// `exponents` holds D_j in (0,1) for FGN/FARIMA, H_j in (0,1) for FBM and
/// the local-fractality parameter H_j (any real) for the locally fractional
/// family. `f_min` and `f_max` are only read for the locally fractional family.
struct PiecewiseSpec {
  Family family = Family::FGN;
  std::vector<double> tau_stars;
  std::vector<double> exponents;
  std::vector<double> sigmas;
  double f_min = 0.5;
  double f_max = 8.0;

  std::size_t num_changes() const { return tau_stars.size(); }
  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// X_0, X_delta, ..., X_{N delta}.
struct SampledPath {
  std::vector<double> values;
  double delta = 1.0;

  /// N, the index of the last sample.
  std::size_t last_index() const { return values.empty() ? 0 : values.size() - 1; }
  /// N * delta.
  double duration() const { return static_cast<double>(last_index()) * delta; }
  void validate() const;
};

/// Autocovariance of unit-step increments of a fractional Brownian motion.
double fgn_autocov(double hurst, double sigma2, std::size_t lag);

/// Autocovariance of FARIMA(0,d,0) with innovation variance sigma2.
double farima_autocov(double d, double sigma2, std::size_t lag);
/// Lags 0..n-1 through the ratio recursion r(k+1) = r(k)(k+d)/(k+1-d).
std::vector<double> farima_autocov_sequence(double d, double sigma2, std::size_t n);

using Autocovariance = std::function<double(std::size_t)>;

/// Exact zero-mean Gaussian sample of length n with covariance
/// autocov(|i-j|). Circulant embedding first, Cholesky when the embedding
/// has negative eigenvalues.
std::vector<double> simulate_stationary(const Autocovariance& autocov, std::size_t n,
                                        std::uint64_t seed);

/// Sample of the piecewise process on N+1 points with step delta. Segment j
/// covers indices [floor(N tau_j), floor(N tau_{j+1})) and is an independent
/// process started at its own origin.
SampledPath simulate_piecewise(const PiecewiseSpec& spec, std::size_t N, double delta,
                               std::uint64_t seed);

/// values[i] += sum_r coeffs[r] (i delta)^r.
SampledPath add_polynomial_trend(SampledPath path, std::span<const double> coeffs);

/// Locally fractional spectral weight rho^{-2}(xi) used by the simulator:
/// sigma^2 |xi|^{-1-2H} on [f_min, f_max], continued outside the band by
/// the boundary value times a Gaussian taper.
double locfrac_spectral_weight(double xi, double hurst, double sigma, double f_min,
                               double f_max);

}  // namespace fracseg
