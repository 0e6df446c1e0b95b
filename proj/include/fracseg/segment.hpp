#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracseg/scalogram.hpp"

namespace fracseg {

/// Candidate instants are c * stride (time units) for integer c; every
/// segment must be at least min_len long.
struct SegmentationConstraints {
  std::size_t m = 0;
  double min_len = 0.0;
  double stride = 1.0;
};

/// min_len = max(4 * base * r_ell, 0.05 * N delta), stride = base.
SegmentationConstraints default_constraints(std::size_t m, const Scalogram& scalogram);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct ChangePointResult {
  std::vector<double> k_hat;
  std::vector<double> tau_hat;
  double G_min = 0.0;
  double duration = 0.0;
  std::size_t candidates = 0;
  /// Filled by shrink().
  std::vector<Interval> shrunk;
  double v_N = 0.0;

  /// [0, k_1), [k_1, k_2), ..., [k_m, N delta)
  std::vector<Interval> segments() const;
};

/// Cost of the segment [lo, hi) in time units; +inf when inadmissible.
using SegmentCost = std::function<double(double lo, double hi)>;

/// Sum of segment costs over the m+1 segments cut at ks, summed from the
/// last segment backwards. Throws when a segment is shorter than min_len or
/// inadmissible.
double contrast(const Scalogram& scalogram, std::span<const double> ks, double min_len = 0.0);
double contrast(const SegmentCost& cost, double duration, std::span<const double> ks,
                double min_len = 0.0);

/// Global minimizer of the contrast on the candidate grid by dynamic
/// programming. Ties resolve to the lexicographically smallest instants.
ChangePointResult detect(const Scalogram& scalogram, const SegmentationConstraints& constraints);
/// Same search over an arbitrary segment cost on [0, duration].
ChangePointResult detect(const SegmentCost& cost, double duration,
                         const SegmentationConstraints& constraints);

/// Same minimizer by enumerating every candidate tuple; for testing.
ChangePointResult detect_exhaustive(const Scalogram& scalogram,
                                    const SegmentationConstraints& constraints);
ChangePointResult detect_exhaustive(const SegmentCost& cost, double duration,
                                    const SegmentationConstraints& constraints);

/// Moves every boundary, 0 and N delta included, inward by N delta / v_N.
std::vector<Interval> shrink(const ChangePointResult& result, double v_N);

}  // namespace fracseg
