#include "fracseg/wavelet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracseg/errors.hpp"
#include "fracseg/quadrature.hpp"

namespace fracseg {

namespace {

using std::numbers::pi;

double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

// int_{-1}^1 u^n (1-u^2)^2 du
long double bump_moment_u(std::size_t n) {
  if (n % 2 == 1) return 0.0L;
  const auto x = static_cast<long double>(n);
  return 2.0L / (x + 1.0L) - 4.0L / (x + 3.0L) + 2.0L / (x + 5.0L);
}

// int_0^1 sin^16(pi x) dx = C(16,8) / 2^16
constexpr double kSin16Mean = 12870.0 / 65536.0;

}  // namespace

MotherWavelet MotherWavelet::compact_poly(int q) {
  if (q < 2) throw DomainError("CompactPoly needs q >= 2 vanishing moments");
  if (q > 10) throw DomainError("CompactPoly supports q <= 10");

  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  using Poly = std::vector<long double>;

  // In u = 2t - 1 the bump t^2 (1-t)^2 is (1-u^2)^2 / 16, and the moment
  // conditions become orthogonality of Q to P_0 .. P_{q-1} under (1-u^2)^2.
  std::vector<Poly> legendre{{1.0L}, {0.0L, 1.0L}};
  for (int n = 1; n < q; ++n) {
    Poly next(static_cast<std::size_t>(n) + 2, 0.0L);
    for (std::size_t i = 0; i < legendre[n].size(); ++i) {
      next[i + 1] += (2.0L * n + 1.0L) * legendre[n][i] / (n + 1.0L);
    }
    for (std::size_t i = 0; i < legendre[n - 1].size(); ++i) {
      next[i] -= n * legendre[n - 1][i] / (n + 1.0L);
    }
    legendre.push_back(std::move(next));
  }
  auto weighted = [](const Poly& a, const Poly& b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) acc += a[i] * b[j] * bump_moment_u(i + j);
    }
    return acc;
  };
  MatL gram(q, q);
  VecL rhs(q);
  for (int r = 0; r < q; ++r) {
    for (int j = 0; j < q; ++j) gram(r, j) = weighted(legendre[r], legendre[j]);
    rhs(r) = -weighted(legendre[r], legendre[q]);
  }
  const VecL b = gram.fullPivLu().solve(rhs);
  Poly qpoly = legendre[q];
  for (int j = 0; j < q; ++j) {
    for (std::size_t i = 0; i < legendre[j].size(); ++i) qpoly[i] += b(j) * legendre[j][i];
  }

  // (1 - u^2)^2 = 1 - 2 u^2 + u^4
  Poly full(qpoly.size() + 4, 0.0L);
  for (std::size_t j = 0; j < qpoly.size(); ++j) {
    full[j] += qpoly[j];
    full[j + 2] -= 2.0L * qpoly[j];
    full[j + 4] += qpoly[j];
  }
  // int_0^1 psi^2 dt = (1/2) int_{-1}^1 psi^2 du
  long double norm2 = 0.0L;
  for (std::size_t i = 0; i < full.size(); ++i) {
    for (std::size_t j = 0; j < full.size(); ++j) {
      if ((i + j) % 2 == 0) norm2 += full[i] * full[j] / static_cast<long double>(i + j + 1);
    }
  }
  const long double scale = 1.0L / std::sqrt(norm2);

  MotherWavelet w;
  w.kind_ = WaveletKind::CompactPoly;
  w.q_ = q;
  w.support_lo_ = 0.0;
  w.support_hi_ = 1.0;
  w.coeffs_.resize(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) w.coeffs_[i] = static_cast<double>(full[i] * scale);
  w.dcoeffs_.resize(full.size() - 1);
  for (std::size_t i = 1; i < full.size(); ++i) {
    w.dcoeffs_[i - 1] = 2.0 * static_cast<double>(i) * w.coeffs_[i];
  }
  for (int r = 0; r < q; ++r) {
    if (std::abs(w.moment(r)) > 1e-12) {
      throw NumericError("CompactPoly moment system lost precision at r=" + std::to_string(r));
    }
  }
  return w;
}

MotherWavelet MotherWavelet::band_limited(double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > lambda) || !std::isfinite(mu)) {
    throw DomainError("BandLimited needs 0 < lambda < mu");
  }
  MotherWavelet w;
  w.kind_ = WaveletKind::BandLimited;
  w.q_ = 0;
  w.lambda_ = lambda;
  w.mu_ = mu;
  w.amplitude_ = std::sqrt(pi / ((mu - lambda) * kSin16Mean));

  const double peak = std::abs(w.band_psi_direct(0.0));
  double hmax = peak;
  // coarse scan for the last point above the truncation threshold
  const double scan_step = pi / (2.0 * mu);
  const double scan_end = 400.0 / (mu - lambda) + 40.0 / lambda;
  double last = 0.0;
  for (double t = 0.0; t <= scan_end; t += scan_step) {
    const double v = std::abs(w.band_psi_direct(t));
    hmax = std::max(hmax, v);
    if (v > 1e-8 * hmax) last = t;
  }
  const double t_eff = last + scan_step;

  w.step_ = 1.0 / (64.0 * mu);
  const auto count = static_cast<std::size_t>(std::ceil(t_eff / w.step_)) + 1;
  w.table_.resize(count);
  w.dtable_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * w.step_;
    w.table_[k] = w.band_psi_direct(t);
    w.dtable_[k] = w.band_dpsi_direct(t);
  }
  w.support_hi_ = static_cast<double>(count - 1) * w.step_;
  w.support_lo_ = -w.support_hi_;
  return w;
}

double MotherWavelet::band_value(double xi) const {
  const double a = std::abs(xi);
  if (a <= lambda_ || a >= mu_) return 0.0;
  const double s = std::sin(pi * (a - lambda_) / (mu_ - lambda_));
  const double s2 = s * s;
  const double s4 = s2 * s2;
  return amplitude_ * s4 * s4;
}

double MotherWavelet::band_psi_direct(double t) const {
  const int panels = 4 + static_cast<int>(std::ceil((mu_ - lambda_) * std::abs(t) / pi));
  const auto& rule = gauss_legendre(16);
  return integrate_composite([&](double xi) { return band_value(xi) * std::cos(xi * t); },
                             lambda_, mu_, panels, rule) /
         pi;
}

double MotherWavelet::band_dpsi_direct(double t) const {
  const int panels = 4 + static_cast<int>(std::ceil((mu_ - lambda_) * std::abs(t) / pi));
  const auto& rule = gauss_legendre(16);
  return -integrate_composite([&](double xi) { return xi * band_value(xi) * std::sin(xi * t); },
                              lambda_, mu_, panels, rule) /
         pi;
}

double MotherWavelet::operator()(double t) const {
  if (kind_ == WaveletKind::CompactPoly) {
    if (t < 0.0 || t > 1.0) return 0.0;
    return horner(coeffs_, 2.0 * t - 1.0);
  }
  const double a = std::abs(t);
  if (a >= support_hi_) return 0.0;
  const double pos = a / step_;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= table_.size()) return table_.back();
  const double u = pos - static_cast<double>(k);
  const double h = step_;
  const double p0 = table_[k];
  const double p1 = table_[k + 1];
  const double m0 = dtable_[k] * h;
  const double m1 = dtable_[k + 1] * h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
         (u3 - u2) * m1;
}

double MotherWavelet::derivative(double t) const {
  if (kind_ == WaveletKind::CompactPoly) {
    if (t < 0.0 || t > 1.0) return 0.0;
    return horner(dcoeffs_, 2.0 * t - 1.0);
  }
  const double a = std::abs(t);
  if (a >= support_hi_) return 0.0;
  const double sign = t < 0.0 ? -1.0 : 1.0;
  const double pos = a / step_;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= dtable_.size()) return sign * dtable_.back();
  const double u = pos - static_cast<double>(k);
  const double h = step_;
  const double p0 = table_[k];
  const double p1 = table_[k + 1];
  const double m0 = dtable_[k] * h;
  const double m1 = dtable_[k + 1] * h;
  const double u2 = u * u;
  const double d = (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * p1 +
                   (3 * u2 - 2 * u) * m1;
  return sign * d / h;
}

std::complex<double> MotherWavelet::fourier(double xi) const {
  if (kind_ == WaveletKind::BandLimited) return {band_value(xi), 0.0};

  const double a = std::abs(xi);
  if (a < 0.5) {
    // Taylor series in exact moments: sum_n (-i xi)^n m_n / n!
    std::complex<double> sum = 0.0;
    std::complex<double> term = 1.0;
    const std::complex<double> factor(0.0, -xi);
    for (int n = 0; n < 30; ++n) {
      if (n > 0) term *= factor / static_cast<double>(n);
      sum += term * moment(n);
    }
    return sum;
  }
  if (a >= 24.0) {
    // psi_hat = e^{-i xi/2} / 2 * sum_n c_n J_n, J_n = int_{-1}^1 u^n e^{-i w u} du with
    // w = xi/2, by upward recursion, stable once |w| exceeds the degree
    const double om = 0.5 * xi;
    const std::complex<double> iom(0.0, om);
    const std::complex<double> right = std::exp(-iom);
    const std::complex<double> left = std::exp(iom);
    std::complex<double> Jn = (left - right) / iom;
    std::complex<double> sum = coeffs_[0] * Jn;
    double sign = 1.0;
    for (std::size_t n = 1; n < coeffs_.size(); ++n) {
      sign = -sign;
      Jn = (static_cast<double>(n) * Jn - (right - sign * left)) / iom;
      sum += coeffs_[n] * Jn;
    }
    return 0.5 * right * sum;
  }
  const int panels = 1 + static_cast<int>(std::floor(a / 6.0));
  const auto& rule = gauss_legendre(20);
  const double re =
      integrate_composite([&](double t) { return (*this)(t) * std::cos(xi * t); }, 0.0,
                          1.0, panels, rule);
  const double im =
      integrate_composite([&](double t) { return -(*this)(t) * std::sin(xi * t); }, 0.0,
                          1.0, panels, rule);
  return {re, im};
}

double MotherWavelet::moment(int r) const {
  if (kind_ != WaveletKind::CompactPoly) return 0.0;
  // t^r = 2^{-r} sum_k C(r,k) u^k and dt = du / 2
  long double acc = 0.0L;
  long double binom = 1.0L;
  for (int k = 0; k <= r; ++k) {
    long double inner = 0.0L;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      if ((j + static_cast<std::size_t>(k)) % 2 == 0) {
        inner += static_cast<long double>(coeffs_[j]) * 2.0L / static_cast<long double>(j + k + 1);
      }
    }
    acc += binom * inner;
    binom = binom * static_cast<long double>(r - k) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(0.5L * std::pow(0.5L, static_cast<long double>(r)) * acc);
}

std::string MotherWavelet::describe() const {
  std::ostringstream os;
  if (kind_ == WaveletKind::CompactPoly) {
    os << "compact-poly(q=" << q_ << ")";
  } else {
    os << "band-limited(lambda=" << lambda_ << ",mu=" << mu_ << ")";
  }
  return os.str();
}

MotherWavelet make_compact_poly(int q) { return MotherWavelet::compact_poly(q); }

MotherWavelet make_band_limited(double lambda, double mu) {
  return MotherWavelet::band_limited(lambda, mu);
}

std::complex<double> psi_hat(const MotherWavelet& w, double xi) { return w.fourier(xi); }

double coeff(std::span<const double> values, double delta, const MotherWavelet& w, double a,
             double b) {
  if (values.size() < 2) throw DomainError("path too short");
  if (!(a >= delta * (1.0 - 1e-12))) {
    throw DomainError("scale " + std::to_string(a) + " below the minimal scale " +
                      std::to_string(delta));
  }
  const std::size_t N = values.size() - 1;
  const double duration = static_cast<double>(N) * delta;
  const double lo = b + a * w.support_lo();
  const double hi = b + a * w.support_hi();
  const double tol = 1e-9 * std::max(1.0, duration);
  if (lo < -tol || hi > duration + tol) {
    throw DomainError("wavelet window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] leaves the observation interval [0, " + std::to_string(duration) + "]");
  }
  const double first = std::max(1.0, std::ceil(lo / delta - 1e-9));
  const double last = std::min(static_cast<double>(N), std::floor(hi / delta + 1e-9));
  if (last < first) return 0.0;
  const auto p0 = static_cast<std::size_t>(first);
  const auto p1 = static_cast<std::size_t>(last);
  double acc = 0.0;
  for (std::size_t p = p0; p <= p1; ++p) {
    acc += w((static_cast<double>(p) * delta - b) / a) * values[p];
  }
  return acc * delta / std::sqrt(a);
}

double coeff(const SampledPath& path, const MotherWavelet& w, double a, double b) {
  return coeff(std::span<const double>(path.values), path.delta, w, a, b);
}

}  // namespace fracseg
