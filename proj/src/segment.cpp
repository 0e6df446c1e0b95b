#include "fracseg/segment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fracseg/errors.hpp"

namespace fracseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCachedCandidates = 6000;

std::vector<double> candidate_positions(double T, const SegmentationConstraints& c) {
  if (!(T > 0.0)) throw DomainError("duration must be positive");
  if (!(c.stride > 0.0)) throw DomainError("candidate stride must be positive");
  if (c.min_len < 0.0) throw DomainError("minimal segment length must be nonnegative");
  const double tol = 1e-9 * std::max(1.0, T);
  std::vector<double> pos{0.0};
  for (long i = 1;; ++i) {
    const double k = static_cast<double>(i) * c.stride;
    if (k >= T - tol) break;
    if (k >= c.min_len - tol && T - k >= c.min_len - tol) pos.push_back(k);
  }
  pos.push_back(T);
  return pos;
}

class CostTable {
 public:
  CostTable(const SegmentCost& cost, double T, const std::vector<double>& pos, double min_len,
            bool cache)
      : cost_(cost), pos_(pos), min_len_(min_len - 1e-9 * std::max(1.0, T)) {
    if (cache) {
      const std::size_t n = pos_.size();
      table_.assign(n * n, kInf);
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) table_[u * n + v] = compute(u, v);
      }
    }
  }

  double operator()(std::size_t u, std::size_t v) const {
    if (!table_.empty()) return table_[u * pos_.size() + v];
    return compute(u, v);
  }

 private:
  double compute(std::size_t u, std::size_t v) const {
    if (pos_[v] - pos_[u] < min_len_) return kInf;
    return cost_(pos_[u], pos_[v]);
  }

  const SegmentCost& cost_;
  const std::vector<double>& pos_;
  double min_len_;
  std::vector<double> table_;
};

ChangePointResult finish(double T, const std::vector<double>& pos,
                         const std::vector<std::size_t>& picks, double g) {
  if (!std::isfinite(g)) {
    throw DomainError(
        "no admissible segmentation: reduce m, min_len or ell, or provide a longer series");
  }
  ChangePointResult r;
  r.duration = T;
  r.G_min = g;
  r.candidates = pos.size() - 2;
  for (std::size_t idx : picks) {
    r.k_hat.push_back(pos[idx]);
    r.tau_hat.push_back(pos[idx] / T);
  }
  return r;
}

}  // namespace

std::vector<Interval> ChangePointResult::segments() const {
  std::vector<Interval> out;
  double lo = 0.0;
  for (double k : k_hat) {
    out.push_back({lo, k});
    lo = k;
  }
  out.push_back({lo, duration});
  return out;
}

SegmentationConstraints default_constraints(std::size_t m, const Scalogram& scalogram) {
  const ScaleGrid& g = scalogram.grid();
  SegmentationConstraints c;
  c.m = m;
  c.stride = g.base;
  c.min_len = std::max(4.0 * g.base * g.ratios.back(), 0.05 * scalogram.duration());
  return c;
}

double contrast(const SegmentCost& cost, double T, std::span<const double> ks, double min_len) {
  const double tol = 1e-9 * std::max(1.0, T);
  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), ks.begin(), ks.end());
  bounds.push_back(T);
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    if (bounds[j + 1] - bounds[j] < min_len - tol || !(bounds[j + 1] > bounds[j])) {
      throw DomainError("change instants must be increasing with segments of length >= " +
                        std::to_string(min_len));
    }
  }
  double total = 0.0;
  for (std::size_t j = bounds.size() - 1; j-- > 0;) {
    const double c = cost(bounds[j], bounds[j + 1]);
    if (!std::isfinite(c)) {
      throw DomainError("segment [" + std::to_string(bounds[j]) + ", " +
                        std::to_string(bounds[j + 1]) + ") is too short for the scale grid");
    }
    total = c + total;
  }
  return total;
}

ChangePointResult detect(const SegmentCost& segment_cost, double T,
                         const SegmentationConstraints& constraints) {
  const auto pos = candidate_positions(T, constraints);
  const std::size_t n = pos.size();
  const std::size_t m = constraints.m;
  const std::size_t last = n - 1;
  if (m == 0) {
    CostTable cost(segment_cost, T, pos, constraints.min_len, false);
    return finish(T, pos, {}, cost(0, last));
  }
  if (m > n - 2) throw DomainError("more change points than candidate instants");

  const bool cache = m >= 2 && n <= kMaxCachedCandidates;
  CostTable cost(segment_cost, T, pos, constraints.min_len, cache);

  // best[j][u]: minimal cost of cutting [pos[u], T) with j further change points
  std::vector<std::vector<double>> best(m + 1, std::vector<double>(n, kInf));
  for (std::size_t u = 0; u < last; ++u) best[0][u] = cost(u, last);
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t u = 0; u < last; ++u) {
      if (j == m && u != 0) continue;
      double b = kInf;
      for (std::size_t v = u + 1; v < last; ++v) {
        if (!std::isfinite(best[j - 1][v])) continue;
        const double c = cost(u, v);
        if (!std::isfinite(c)) continue;
        b = std::min(b, c + best[j - 1][v]);
      }
      best[j][u] = b;
    }
  }

  std::vector<std::size_t> picks;
  const double g = best[m][0];
  if (std::isfinite(g)) {
    std::size_t u = 0;
    for (std::size_t j = m; j >= 1; --j) {
      std::size_t chosen = 0;
      for (std::size_t v = u + 1; v < last; ++v) {
        if (!std::isfinite(best[j - 1][v])) continue;
        const double c = cost(u, v);
        if (std::isfinite(c) && c + best[j - 1][v] == best[j][u]) {
          chosen = v;
          break;
        }
      }
      picks.push_back(chosen);
      u = chosen;
    }
  }
  return finish(T, pos, picks, g);
}

ChangePointResult detect_exhaustive(const SegmentCost& segment_cost, double T,
                                    const SegmentationConstraints& constraints) {
  const auto pos = candidate_positions(T, constraints);
  const std::size_t n = pos.size();
  const std::size_t m = constraints.m;
  const std::size_t last = n - 1;
  if (m > 0 && m > n - 2) throw DomainError("more change points than candidate instants");
  CostTable cost(segment_cost, T, pos, constraints.min_len, false);

  std::vector<std::size_t> current(m);
  std::vector<std::size_t> best_tuple;
  double best_value = kInf;

  std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t depth,
                                                              std::size_t from) {
    if (depth == m) {
      double total = 0.0;
      std::size_t hi = last;
      for (std::size_t j = m + 1; j-- > 0;) {
        const std::size_t lo = j == 0 ? 0 : current[j - 1];
        const double c = cost(lo, hi);
        if (!std::isfinite(c)) return;
        total = c + total;
        hi = lo;
      }
      if (total < best_value) {
        best_value = total;
        best_tuple = current;
      }
      return;
    }
    for (std::size_t v = from; v < last; ++v) {
      current[depth] = v;
      recurse(depth + 1, v + 1);
    }
  };
  recurse(0, 1);
  return finish(T, pos, best_tuple, best_value);
}

namespace {

SegmentCost scalogram_cost(const Scalogram& sc) {
  return [&sc](double lo, double hi) { return sc.cost(lo, hi); };
}

}  // namespace

double contrast(const Scalogram& scalogram, std::span<const double> ks, double min_len) {
  return contrast(scalogram_cost(scalogram), scalogram.duration(), ks, min_len);
}

ChangePointResult detect(const Scalogram& scalogram, const SegmentationConstraints& constraints) {
  return detect(scalogram_cost(scalogram), scalogram.duration(), constraints);
}

ChangePointResult detect_exhaustive(const Scalogram& scalogram,
                                    const SegmentationConstraints& constraints) {
  return detect_exhaustive(scalogram_cost(scalogram), scalogram.duration(), constraints);
}

std::vector<Interval> shrink(const ChangePointResult& result, double v_N) {
  if (!(v_N > 0.0)) throw DomainError("v_N must be positive");
  const double margin = result.duration / v_N;
  std::vector<Interval> out;
  for (const Interval& seg : result.segments()) {
    Interval s{seg.lo + margin, seg.hi - margin};
    if (!(s.lo < s.hi)) {
      throw DomainError("margins swallow segment [" + std::to_string(seg.lo) + ", " +
                        std::to_string(seg.hi) + "): margin " + std::to_string(margin) +
                        " is too large; increase v_N");
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace fracseg
