#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracseg/estimate.hpp"
#include "fracseg/scalogram.hpp"
#include "fracseg/segment.hpp"
#include "fracseg/synth.hpp"
#include "fracseg/wavelet.hpp"

namespace fracseg {

/// Asymptotic tuning rates for a series of N samples.
struct Schedule {
  /// Base scale in samples (1 for the locally fractional family, whose
  /// base comes from the frequency band).
  double a_N = 1.0;
  double v_N = 1.0;
  /// Suggested sampling step (locally fractional family only).
  double delta = 1.0;
  /// Set when the rate exponents leave their admissible range.
  std::vector<std::string> warnings;
};

/// LRD: a = N^{1/5+k}, v = N^{2/5-3k}, 0 < k < 2/15.
/// FBM: a = N^{1/3+k}, v = N^{2/3 (1-2A) - k (2+4A)}, A = gap between Hurst indices.
/// Locally fractional: delta = N^{-1/2-k}, v = N^{1/2-k}, 0 < k < 1/2.
Schedule default_schedule(Family family, std::size_t N, double kappa, double gap = 0.0);

/// ell = max(3, floor(0.0015 N)).
int default_ell(std::size_t N);

struct WaveletChoice {
  WaveletKind kind = WaveletKind::CompactPoly;
  int q = 3;
  double lambda = 1.0;
  double mu = 4.0;

  MotherWavelet build() const;
  /// "poly:3" or "band:1,4"
  static WaveletChoice parse(const std::string& text);
  std::string to_string() const;
};

struct AnalysisOptions {
  Family family = Family::FGN;
  std::size_t m = 0;
  /// 0 selects default_ell(N).
  int ell = 0;
  double kappa = 0.05;
  double gap = 0.0;
  std::optional<WaveletChoice> wavelet;
  /// Base scale in samples; overrides the schedule.
  std::optional<double> a_N;
  std::optional<double> v_N;
  /// Segment constraints in time units; default_constraints otherwise.
  std::optional<double> min_len;
  std::optional<double> stride;
  /// Locally fractional family.
  double f_min = 0.5;
  double f_max = 8.0;
  double trim = 0.2;
  /// Margin N delta / v_N is capped at this fraction of the shortest
  /// estimated segment.
  double max_margin_fraction = 0.2;
  double ci_level = 0.95;
};

struct SegmentFit {
  Interval segment;
  Interval window;
  LogVarianceVector Y;
  Eigen::VectorXd log_scales;
  ThetaEstimate ols;
  ThetaEstimate fgls;
  GofResult gof;
  /// D (long memory) or H (FBM, locally fractional).
  double exponent_ols = 0.0;
  double exponent_fgls = 0.0;
  double hurst_ols = 0.0;
  double hurst_fgls = 0.0;
  std::array<ConfidenceInterval, 2> ci_ols{};
  std::array<ConfidenceInterval, 2> ci_fgls{};
  /// Plug-in exponent was clamped before evaluating Gamma.
  bool plugin_clamped = false;
  Eigen::MatrixXd gamma;
};

struct AnalysisReport {
  Family family = Family::FGN;
  std::size_t N = 0;
  double delta = 1.0;
  std::string wavelet;
  ScaleGrid grid;
  double a_N = 0.0;
  double v_N = 0.0;
  double margin = 0.0;
  bool margin_capped = false;
  SegmentationConstraints constraints;
  ChangePointResult changes;
  std::vector<SegmentFit> segments;
  std::vector<std::string> warnings;
};

AnalysisReport analyze(const SampledPath& path, const AnalysisOptions& options);

}  // namespace fracseg
