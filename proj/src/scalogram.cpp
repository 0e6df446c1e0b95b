#include "fracseg/scalogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracseg/errors.hpp"

namespace fracseg {

namespace {

constexpr double kIndexTol = 1e-9;

long robust_floor(double x) { return static_cast<long>(std::floor(x + kIndexTol)); }

struct ShiftRange {
  long lo = 0;
  long hi = -1;
  long count() const { return hi >= lo ? hi - lo + 1 : 0; }
};

ShiftRange nominal_range(double a, double k, double k_end, double trim) {
  const double len = k_end - k;
  ShiftRange r;
  r.lo = robust_floor((k + trim * len) / a);
  r.hi = robust_floor((k_end - trim * len) / a) - 1;
  return r;
}

ShiftRange valid_range(const MotherWavelet& w, double a, double duration) {
  ShiftRange r;
  r.lo = static_cast<long>(std::ceil(-w.support_lo() - kIndexTol));
  r.hi = robust_floor((duration - a * w.support_hi()) / a);
  return r;
}

ShiftRange clip(ShiftRange a, ShiftRange b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

double direct_variance(const SampledPath& path, const MotherWavelet& w, double a, double k,
                       double k_end, double trim) {
  path.validate();
  if (!(k_end > k)) throw DomainError("segment bounds must satisfy k < k'");
  if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("trim must lie in [0, 1/2)");
  const ShiftRange nominal = nominal_range(a, k, k_end, trim);
  const ShiftRange used = clip(nominal, valid_range(w, a, path.duration()));
  if (used.count() < 2) {
    throw DomainError("segment too short: fewer than 2 admissible shifts at scale " +
                      std::to_string(a));
  }
  double acc = 0.0;
  for (long p = used.lo; p <= used.hi; ++p) {
    const double e = coeff(path, w, a, a * static_cast<double>(p));
    acc += e * e;
  }
  const double ratio = static_cast<double>(nominal.count()) / static_cast<double>(used.count());
  return a / ((1.0 - 2.0 * trim) * (k_end - k)) * ratio * acc;
}

}  // namespace

void ScaleGrid::validate() const {
  if (!(base > 0.0) || !std::isfinite(base)) throw DomainError("base scale must be positive");
  if (ratios.size() < 3) throw DomainError("the scale grid needs at least 3 scales");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] < 1) throw DomainError("scale ratios must be positive integers");
    if (i > 0 && ratios[i] <= ratios[i - 1]) {
      throw DomainError("scale ratios must be strictly increasing");
    }
  }
  if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("trim must lie in [0, 1/2)");
}

ScaleGrid make_integer_grid(double base, int ell, double trim) {
  ScaleGrid g;
  g.base = base;
  g.trim = trim;
  for (int i = 1; i <= ell; ++i) g.ratios.push_back(i);
  g.validate();
  return g;
}

ScaleGrid make_band_grid(const MotherWavelet& w, double f_min, double f_max, int ell,
                         double trim) {
  if (w.kind() != WaveletKind::BandLimited) {
    throw DomainError("a frequency-band scale grid needs a band-limited wavelet");
  }
  if (!(f_min > 0.0 && f_max > f_min)) throw DomainError("frequency band needs 0 < f_min < f_max");
  if (!(w.mu() / w.lambda() < f_max / f_min)) {
    throw DomainError("band condition mu/lambda < f_max/f_min violated");
  }
  if (ell < 3) throw DomainError("the scale grid needs at least 3 scales");
  const double s_lo = w.mu() / f_max;
  const double s_hi = w.lambda() / f_min;
  const int i0 = std::max(
      1, static_cast<int>(std::ceil(s_lo * (ell - 1) / (s_hi - s_lo) - 1e-12)));
  ScaleGrid g;
  g.base = s_hi / static_cast<double>(i0 + ell - 1);
  g.trim = trim;
  for (int i = 0; i < ell; ++i) g.ratios.push_back(i0 + i);
  g.validate();
  return g;
}

double seg_variance(const SampledPath& path, const MotherWavelet& w, double a, double k,
                    double k_end) {
  return direct_variance(path, w, a, k, k_end, 0.0);
}

double seg_variance_trimmed(const SampledPath& path, const MotherWavelet& w, double a, double k,
                            double k_end, double trim) {
  return direct_variance(path, w, a, k, k_end, trim);
}

LogVarianceVector log_variance_vector(const SampledPath& path, const MotherWavelet& w,
                                      const ScaleGrid& grid, double k, double k_end) {
  grid.validate();
  LogVarianceVector out;
  out.Y.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = direct_variance(path, w, grid.scale(i), k, k_end, grid.trim);
    if (!(s > 0.0)) throw NumericError("nonpositive variance at scale " + std::to_string(i));
    out.Y(static_cast<Eigen::Index>(i)) = std::log(s);
  }
  out.k = k;
  out.k_end = k_end;
  out.n_eff = (k_end - k) / grid.base;
  return out;
}

Eigen::MatrixXd design_matrix(const ScaleGrid& grid) {
  grid.validate();
  Eigen::MatrixXd L(static_cast<Eigen::Index>(grid.size()), 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    L(static_cast<Eigen::Index>(i), 0) = std::log(grid.scale(i));
    L(static_cast<Eigen::Index>(i), 1) = 1.0;
  }
  return L;
}

double segment_cost(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L) {
  const Eigen::Index n = Y.size();
  const double xbar = L.col(0).mean();
  const double ybar = Y.mean();
  double sxx = 0.0;
  double sxy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = L(i, 0) - xbar;
    sxx += dx * dx;
    sxy += dx * (Y(i) - ybar);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (Y(i) - ybar) - slope * (L(i, 0) - xbar);
    rss += r * r;
  }
  return rss;
}

Scalogram::Scalogram(const SampledPath& path, const MotherWavelet& w, const ScaleGrid& grid)
    : grid_(grid),
      design_(design_matrix(grid)),
      duration_(path.duration()),
      delta_(path.delta),
      kind_(w.kind()) {
  path.validate();
  rows_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ScaleRow& row = rows_[i];
    row.scale = grid.scale(i);
    const ShiftRange valid = valid_range(w, row.scale, duration_);
    row.first = valid.lo;
    row.last = valid.hi;
    row.prefix.assign(1, 0.0);
    for (long p = valid.lo; p <= valid.hi; ++p) {
      const double e = coeff(path, w, row.scale, row.scale * static_cast<double>(p));
      row.prefix.push_back(row.prefix.back() + e * e);
    }
  }
}

Scalogram::Range Scalogram::range(std::size_t i, double k, double k_end) const {
  const ScaleRow& row = rows_[i];
  const ShiftRange nominal = nominal_range(row.scale, k, k_end, grid_.trim);
  const ShiftRange used = clip(nominal, {row.first, row.last});
  return {used.lo, used.hi, nominal.count()};
}

std::size_t Scalogram::shift_count(std::size_t i, double k, double k_end) const {
  const Range r = range(i, k, k_end);
  return r.hi >= r.lo ? static_cast<std::size_t>(r.hi - r.lo + 1) : 0;
}

std::optional<Eigen::VectorXd> Scalogram::variances(double k, double k_end) const {
  if (!(k_end > k)) return std::nullopt;
  Eigen::VectorXd S(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const ScaleRow& row = rows_[i];
    const Range r = range(i, k, k_end);
    const long count = r.hi - r.lo + 1;
    if (count < 2) return std::nullopt;
    const double sum = row.prefix[static_cast<std::size_t>(r.hi - row.first + 1)] -
                       row.prefix[static_cast<std::size_t>(r.lo - row.first)];
    const double ratio = static_cast<double>(r.nominal) / static_cast<double>(count);
    S(static_cast<Eigen::Index>(i)) =
        row.scale / ((1.0 - 2.0 * grid_.trim) * (k_end - k)) * ratio * sum;
  }
  return S;
}

LogVarianceVector Scalogram::log_variances(double k, double k_end) const {
  const auto S = variances(k, k_end);
  if (!S) {
    throw DomainError("segment [" + std::to_string(k) + ", " + std::to_string(k_end) +
                      ") too short: some scale has fewer than 2 admissible shifts");
  }
  LogVarianceVector out;
  out.Y.resize(S->size());
  for (Eigen::Index i = 0; i < S->size(); ++i) {
    if (!((*S)(i) > 0.0)) {
      throw NumericError("nonpositive variance at scale index " + std::to_string(i));
    }
    out.Y(i) = std::log((*S)(i));
  }
  out.k = k;
  out.k_end = k_end;
  out.n_eff = (k_end - k) / grid_.base;
  return out;
}

double Scalogram::cost(double k, double k_end) const {
  const auto S = variances(k, k_end);
  if (!S) return std::numeric_limits<double>::infinity();
  Eigen::VectorXd Y(S->size());
  for (Eigen::Index i = 0; i < S->size(); ++i) {
    if (!((*S)(i) > 0.0)) return std::numeric_limits<double>::infinity();
    Y(i) = std::log((*S)(i));
  }
  return segment_cost(Y, design_);
}

}  // namespace fracseg
