#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "fracseg/synth.hpp"
#include "fracseg/wavelet.hpp"

namespace fracseg {

/// Scales ratios[i] * base, i = 0..ell-1, with integer ratios.
struct ScaleGrid {
  double base = 1.0;
  std::vector<int> ratios;
  /// Fraction trimmed at each end of a segment (band-limited wavelets).
  double trim = 0.0;

  std::size_t size() const { return ratios.size(); }
  double scale(std::size_t i) const { return base * ratios[i]; }
  void validate() const;
};

/// ratios 1..ell
ScaleGrid make_integer_grid(double base, int ell, double trim = 0.0);

/// Integer ratios i0..i0+ell-1 times a base chosen so that every scale keeps
/// the wavelet band [lambda/scale, mu/scale] inside [f_min, f_max].
ScaleGrid make_band_grid(const MotherWavelet& w, double f_min, double f_max, int ell,
                         double trim);

struct LogVarianceVector {
  Eigen::VectorXd Y;
  double k = 0.0;
  double k_end = 0.0;
  /// (k_end - k) / base
  double n_eff = 0.0;
};

/// Untrimmed average of squared coefficients over shifts a*p,
/// p = [k/a] .. [k'/a]-1, scaled by a/(k'-k). Bounds in time units.
double seg_variance(const SampledPath& path, const MotherWavelet& w, double a, double k,
                    double k_end);
/// Same with p = [(k + w(k'-k))/a] .. [(k' - w(k'-k))/a]-1 and prefactor
/// a/((1-2w)(k'-k)).
double seg_variance_trimmed(const SampledPath& path, const MotherWavelet& w, double a, double k,
                            double k_end, double trim);

LogVarianceVector log_variance_vector(const SampledPath& path, const MotherWavelet& w,
                                      const ScaleGrid& grid, double k, double k_end);

/// Rows (log(r_i base), 1).
Eigen::MatrixXd design_matrix(const ScaleGrid& grid);

/// Residual sum of squares of the least-squares line through (L(:,0), Y).
double segment_cost(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L);

/// Squared coefficients of a whole path on every scale of a grid, with
/// prefix sums so that any segment statistic costs O(ell).
class Scalogram {
 public:
  Scalogram(const SampledPath& path, const MotherWavelet& w, const ScaleGrid& grid);

  const ScaleGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& design() const { return design_; }
  double duration() const { return duration_; }
  double delta() const { return delta_; }
  WaveletKind wavelet_kind() const { return kind_; }

  /// Number of shifts entering the statistic at scale index i, after
  /// clipping to shifts whose window lies inside the data.
  std::size_t shift_count(std::size_t i, double k, double k_end) const;
  /// Statistic per scale, or nullopt when a scale has fewer than 2 shifts.
  std::optional<Eigen::VectorXd> variances(double k, double k_end) const;
  /// Throws DomainError when inadmissible and NumericError on a nonpositive variance.
  LogVarianceVector log_variances(double k, double k_end) const;
  /// segment_cost of the log variances, +inf when inadmissible.
  double cost(double k, double k_end) const;

 private:
  struct ScaleRow {
    double scale = 0.0;
    long first = 0;
    long last = -1;
    std::vector<double> prefix;
  };
  struct Range {
    long lo = 0;
    long hi = -1;
    long nominal = 0;
  };
  Range range(std::size_t i, double k, double k_end) const;

  ScaleGrid grid_;
  Eigen::MatrixXd design_;
  double duration_ = 0.0;
  double delta_ = 1.0;
  WaveletKind kind_ = WaveletKind::CompactPoly;
  std::vector<ScaleRow> rows_;
};

}  // namespace fracseg
