#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "fracseg/errors.hpp"
#include "fracseg/estimate.hpp"
#include "fracseg/quadrature.hpp"

namespace fracseg {

namespace {

using std::numbers::pi;

constexpr double kSumTol = 1e-10;
constexpr long kMaxLag = 200000;

double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

// J(c) = int int phi(t) phi(t') |c + rp t - rq t'|^s dt dt' for phi supported
// on [0,1] (coefficients in u = 2t - 1), written as int h(y) |c + y|^s dy with h piecewise polynomial
// between the integer breakpoints -rq, 0, rp - rq, rp. For integer c the
// kink of |c+y|^s also sits on an integer, so unit intervals are smooth
// except at one endpoint, where y = kink + v^4 removes the singularity.
class PairKernel {
 public:
  PairKernel(const std::vector<double>& phi, int rp, int rq, double s)
      : rp_(rp), rq_(rq), s_(s) {
    const auto& inner = gauss_legendre(10);
    const auto& regular = gauss_legendre(20);
    const auto& kink = gauss_legendre(30);
    auto h = [&](double y) {
      const double lo = std::max(0.0, y / rp);
      const double hi = std::min(1.0, (y + rq) / rp);
      if (!(hi > lo)) return 0.0;
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      double acc = 0.0;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        const double t = mid + half * inner.nodes[i];
        acc += inner.weights[i] * horner(phi, 2.0 * t - 1.0) *
               horner(phi, 2.0 * (rp * t - y) / rq - 1.0);
      }
      return acc * half / rq;
    };
    for (int n = -rq; n < rp; ++n) {
      Cell cell;
      cell.n = n;
      for (std::size_t i = 0; i < regular.size(); ++i) {
        const double y = n + 0.5 + 0.5 * regular.nodes[i];
        cell.regular.push_back({y, 0.5 * regular.weights[i] * h(y)});
      }
      for (std::size_t i = 0; i < kink.size(); ++i) {
        const double v = 0.5 + 0.5 * kink.nodes[i];
        const double v4 = v * v * v * v;
        const double jac = 0.5 * kink.weights[i] * 4.0 * v * v * v;
        cell.left.push_back({n + v4, jac * h(n + v4)});
        cell.right.push_back({n + 1 - v4, jac * h(n + 1 - v4)});
      }
      cells_.push_back(std::move(cell));
    }
  }

  double operator()(long c) const {
    double total = 0.0;
    for (const Cell& cell : cells_) {
      const std::vector<Node>* nodes = &cell.regular;
      if (cell.n == -c) {
        nodes = &cell.left;
      } else if (cell.n + 1 == -c) {
        nodes = &cell.right;
      }
      double part = 0.0;
      for (const Node& node : *nodes) {
        part += node.weight * std::pow(std::abs(static_cast<double>(c) + node.y), s_);
      }
      total += part;
    }
    return total;
  }

  int span() const { return rp_ + rq_; }

 private:
  struct Node {
    double y;
    double weight;
  };
  struct Cell {
    int n = 0;
    std::vector<Node> regular;
    std::vector<Node> left;
    std::vector<Node> right;
  };
  int rp_;
  int rq_;
  double s_;
  std::vector<Cell> cells_;
};

// sum over integer k of rho(k d)^2, stopping once past the overlap region
template <class Rho>
double sum_squares(Rho&& rho, long d, long overlap) {
  const double r0 = rho(0);
  double total = r0 * r0;
  for (long k = 1;; ++k) {
    const long c = k * d;
    const double a = rho(c);
    const double b = rho(-c);
    const double term = a * a + b * b;
    total += term;
    if (c > overlap && term < kSumTol * total) break;
    if (k > kMaxLag) throw NumericError("lag sum in the covariance of log variances did not converge");
  }
  return total;
}

Eigen::MatrixXd time_domain_gamma(const std::vector<double>& phi, double s,
                                  const ScaleGrid& grid) {
  grid.validate();
  const PairKernel unit(phi, 1, 1, s);
  const double j0 = unit(0);
  if (!(std::abs(j0) > 0.0) || !std::isfinite(j0)) {
    throw NumericError("degenerate normalizing integral in the covariance of log variances");
  }
  const auto ell = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd G(ell, ell);
  for (Eigen::Index p = 0; p < ell; ++p) {
    for (Eigen::Index q = p; q < ell; ++q) {
      const int rp = grid.ratios[static_cast<std::size_t>(p)];
      const int rq = grid.ratios[static_cast<std::size_t>(q)];
      const long d = std::gcd(rp, rq);
      const PairKernel kernel(phi, rp, rq, s);
      const double norm = std::pow(static_cast<double>(rp) * rq, 0.5 * s) * j0;
      const double sum = sum_squares([&](long c) { return kernel(c) / norm; }, d, kernel.span());
      G(p, q) = 2.0 * static_cast<double>(d) * sum;
      G(q, p) = G(p, q);
    }
  }
  return G;
}

// Band-limited wavelets: with g(xi) = psi^(rp xi) psi^(rq xi) |xi|^{-beta}
// the lag correlation is the Fourier transform of g, so Poisson summation
// turns the lag sum into a finite sum of autocorrelations of g.
Eigen::MatrixXd band_gamma(double beta, const ScaleGrid& grid, const MotherWavelet& w,
                           double trim) {
  grid.validate();
  if (w.kind() != WaveletKind::BandLimited) {
    throw DomainError("this covariance route needs a band-limited wavelet");
  }
  if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("trim must lie in [0, 1/2)");
  const auto& rule = gauss_legendre(16);
  const double lam = w.lambda();
  const double mu = w.mu();
  const int panels = 48;

  const double i0 =
      2.0 * integrate_composite(
                [&](double u) {
                  const double v = w.fourier(u).real();
                  return v * v * std::pow(u, -beta);
                },
                lam, mu, panels, rule);

  const auto ell = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(ell, ell);
  for (Eigen::Index p = 0; p < ell; ++p) {
    for (Eigen::Index q = p; q < ell; ++q) {
      const double rp = grid.ratios[static_cast<std::size_t>(p)];
      const double rq = grid.ratios[static_cast<std::size_t>(q)];
      const double lo = std::max(lam / rp, lam / rq);
      const double hi = std::min(mu / rp, mu / rq);
      if (!(hi > lo)) continue;
      const long d = std::gcd(static_cast<long>(rp), static_cast<long>(rq));
      auto g = [&](double xi) {
        const double a = std::abs(xi);
        if (a <= lo || a >= hi) return 0.0;
        return w.fourier(rp * xi).real() * w.fourier(rq * xi).real() * std::pow(a, -beta);
      };
      auto autocorr = [&](double omega) {
        auto f = [&](double xi) { return g(xi) * g(xi - omega); };
        return integrate_composite(f, lo, hi, panels, rule) +
               integrate_composite(f, -hi, -lo, panels, rule);
      };
      const double step = 2.0 * pi / static_cast<double>(d);
      const long n_max = static_cast<long>(std::ceil(2.0 * hi / step));
      double total = 0.0;
      for (long n = -n_max; n <= n_max; ++n) total += autocorr(static_cast<double>(n) * step);
      const double norm2 = std::pow(rp * rq, beta - 1.0) * i0 * i0;
      G(p, q) = 2.0 / (1.0 - 2.0 * trim) * 2.0 * pi * total / norm2;
      G(q, p) = G(p, q);
    }
  }
  return G;
}

}  // namespace

Eigen::MatrixXd gamma_lrd(double D, const ScaleGrid& grid, const MotherWavelet& w) {
  if (!(D > 0.0 && D < 1.0)) throw DomainError("long-memory exponent D must lie in (0,1)");
  if (w.kind() == WaveletKind::BandLimited) return band_gamma(D, grid, w, grid.trim);
  // |t|^{D-1} kernel, integrated by parts twice onto psi' with |t|^{D+1}
  return time_domain_gamma(w.derivative_coefficients(), D + 1.0, grid);
}

Eigen::MatrixXd gamma_fbm(double H, const ScaleGrid& grid, const MotherWavelet& w) {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("Hurst index must lie in (0,1)");
  if (w.kind() == WaveletKind::BandLimited) return band_gamma(1.0 + 2.0 * H, grid, w, grid.trim);
  return time_domain_gamma(w.coefficients(), 2.0 * H, grid);
}

Eigen::MatrixXd gamma_locfrac(double H, const ScaleGrid& grid, const MotherWavelet& w,
                              double trim) {
  if (!std::isfinite(H)) throw DomainError("local-fractality parameter must be finite");
  return band_gamma(1.0 + 2.0 * H, grid, w, trim);
}

Eigen::MatrixXd gamma_lrd_spectral(double D, const ScaleGrid& grid, const MotherWavelet& w) {
  if (!(D > 0.0 && D < 1.0)) throw DomainError("long-memory exponent D must lie in (0,1)");
  grid.validate();
  const auto& rule = gauss_legendre(20);
  constexpr double upper = 400.0;
  constexpr double width = 0.05;
  const int panels = static_cast<int>(upper / width);

  std::vector<double> u;
  std::vector<double> weight;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * width;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double x = mid + 0.5 * width * rule.nodes[i];
      u.push_back(x);
      weight.push_back(0.5 * width * rule.weights[i] * std::pow(x, -D));
    }
  }
  const std::size_t n = u.size();
  std::vector<std::vector<std::complex<double>>> hat(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    hat[p].resize(n);
    for (std::size_t i = 0; i < n; ++i) hat[p][i] = w.fourier(grid.ratios[p] * u[i]);
  }
  double i0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) i0 += weight[i] * std::norm(w.fourier(u[i]));

  const auto ell = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd G(ell, ell);
  for (Eigen::Index p = 0; p < ell; ++p) {
    for (Eigen::Index q = p; q < ell; ++q) {
      const int rp = grid.ratios[static_cast<std::size_t>(p)];
      const int rq = grid.ratios[static_cast<std::size_t>(q)];
      const long d = std::gcd(rp, rq);
      const auto& hp = hat[static_cast<std::size_t>(p)];
      const auto& hq = hat[static_cast<std::size_t>(q)];
      const double norm = std::pow(static_cast<double>(rp) * rq, 0.5 * (D - 1.0)) * i0;
      auto rho = [&](long c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += weight[i] *
                 (std::conj(hp[i]) * hq[i] * std::polar(1.0, static_cast<double>(c) * u[i])).real();
        }
        return acc / norm;
      };
      const double sum = sum_squares(rho, d, rp + rq);
      G(p, q) = 2.0 * static_cast<double>(d) * sum;
      G(q, p) = G(p, q);
    }
  }
  return G;
}

}  // namespace fracseg
