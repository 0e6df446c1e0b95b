#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "fracseg/distributions.hpp"
#include "fracseg/errors.hpp"
#include "fracseg/estimate.hpp"
#include "fracseg/scalogram.hpp"
#include "fracseg/wavelet.hpp"

using namespace fracseg;

namespace {

double kronrod(const std::function<double(double)>& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 10, 1e-10);
}

// int int psi(t) psi(t') |c + rp t - rq t'|^s, inner integral split at the kink.
double pair_integral(const MotherWavelet& w, int rp, int rq, double c, double s) {
  return kronrod(
      [&](double t) {
        auto f = [&](double u) { return w(u) * std::pow(std::abs(c + rp * t - rq * u), s); };
        const double kink = (c + rp * t) / rq;
        if (kink <= 0.0 || kink >= 1.0) return w(t) * kronrod(f, 0.0, 1.0);
        return w(t) * (kronrod(f, 0.0, kink) + kronrod(f, kink, 1.0));
      },
      0.0, 1.0);
}

// Gamma_pq = 2 gcd(rp, rq) sum_k rho(k gcd)^2, rho the normalized coefficient correlation.
Eigen::MatrixXd fbm_gamma_oracle(double H, const std::vector<int>& ratios, const MotherWavelet& w,
                                 double* j0_out) {
  const double s = 2 * H;
  const double j0 = pair_integral(w, 1, 1, 0.0, s);
  *j0_out = j0;
  const auto n = static_cast<Eigen::Index>(ratios.size());
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p; q < n; ++q) {
      const int rp = ratios[static_cast<std::size_t>(p)];
      const int rq = ratios[static_cast<std::size_t>(q)];
      const int d = std::gcd(rp, rq);
      const double norm = std::pow(double(rp) * rq, H) * j0;
      double sum = 0.0;
      for (int k = -15; k <= 15; ++k) {
        const double rho = pair_integral(w, rp, rq, double(k * d), s) / norm;
        sum += rho * rho;
      }
      G(p, q) = G(q, p) = 2.0 * d * sum;
    }
  }
  return G;
}

double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

void check_symmetric_positive(const Eigen::MatrixXd& G) {
  CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < G.rows(); ++i) CHECK(G(i, i) > 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff());
}

// Sigma - M must be positive semidefinite.
void check_fgls_dominates(const Eigen::MatrixXd& G, const Eigen::MatrixXd& L) {
  const Eigen::VectorXd Y = Eigen::VectorXd::LinSpaced(L.rows(), 0.0, 1.0).array().sin();
  const auto ols = ols_theta(Y, L, &G, 100.0);
  const auto fgls = fgls_theta(Y, L, G, 100.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ols.cov - fgls.cov);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9 * ols.cov.trace());
  CHECK_FALSE(fgls.fallback);
}

}  // namespace

TEST_CASE("FBM Gamma against a brute-force double-integral oracle") {
  const auto w = make_compact_poly(3);
  const ScaleGrid grid{4.0, {1, 2, 3}, 0.0};
  for (double H : {0.3, 0.7}) {
    CAPTURE(H);
    double j0 = 0.0;
    const Eigen::MatrixXd want = fbm_gamma_oracle(H, grid.ratios, w, &j0);
    CHECK(j0 < 0.0);
    const Eigen::MatrixXd got = gamma_fbm(H, grid, w);
    CHECK(max_rel(got, want) < 1e-6);
  }
}

TEST_CASE("LRD Gamma: time-domain route agrees with the Fourier route") {
  const auto w = make_compact_poly(3);
  const ScaleGrid grid{1.0, {1, 2, 3, 4}, 0.0};
  for (double D : {0.2, 0.5, 0.8}) {
    CAPTURE(D);
    const auto td = gamma_lrd(D, grid, w);
    check_symmetric_positive(td);
    CHECK(max_rel(td, gamma_lrd_spectral(D, grid, w)) < 1e-3);
  }
}

TEST_CASE("band-limited LRD Gamma agrees with the Fourier route") {
  const auto w = make_band_limited(1.0, 4.0);
  const ScaleGrid grid{1.0, {1, 2, 3}, 0.0};
  const auto band = gamma_lrd(0.4, grid, w);
  check_symmetric_positive(band);
  CHECK(max_rel(band, gamma_lrd_spectral(0.4, grid, w)) < 1e-4);
}

TEST_CASE("locally fractional Gamma vanishes between scales with disjoint bands") {
  const auto w = make_band_limited(1.0, 4.0);
  const ScaleGrid grid{1.0, {1, 2, 6}, 0.0};
  const auto G = gamma_locfrac(0.3, grid, w, 0.2);
  CHECK(G(0, 2) == 0.0);
  CHECK(G(2, 0) == 0.0);
  CHECK(G(0, 1) != 0.0);
  CHECK(G(1, 2) != 0.0);
  for (int i = 0; i < 3; ++i) CHECK(G(i, i) > 0.0);
  const auto untrimmed = gamma_locfrac(0.3, grid, w, 0.0);
  CHECK(((1 - 2 * 0.2) * G - untrimmed).cwiseAbs().maxCoeff() < 1e-12 * untrimmed.norm());
  CHECK_THROWS_AS(gamma_locfrac(0.3, grid, make_compact_poly(3), 0.2), DomainError);
}

TEST_CASE("the FGLS covariance never exceeds the OLS sandwich") {
  const auto poly = make_compact_poly(3);
  const auto band = make_band_limited(1.0, 4.0);
  const auto igrid = make_integer_grid(1.0, 8);
  const auto bgrid = make_band_grid(band, 0.5, 8.0, 8, 0.2);
  for (double e : {0.2, 0.5, 0.8}) {
    CAPTURE(e);
    check_fgls_dominates(gamma_lrd(e, igrid, poly), design_matrix(igrid));
    check_fgls_dominates(gamma_fbm(e, igrid, poly), design_matrix(igrid));
    check_fgls_dominates(gamma_locfrac(e, bgrid, band, 0.2), design_matrix(bgrid));
  }
}

TEST_CASE("OLS and FGLS") {
  const auto grid = make_integer_grid(2.0, 6);
  const auto L = design_matrix(grid);
  const Eigen::VectorXd Y = 0.35 * L.col(0) + Eigen::VectorXd::Constant(6, 1.7);
  const auto ols = ols_theta(Y, L);
  CHECK(ols.alpha == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(ols.log_beta == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(ols.cov.isZero());

  Eigen::VectorXd noisy = Y;
  noisy(2) += 0.3;
  noisy(5) -= 0.2;
  const auto plain = ols_theta(noisy, L);
  for (double c : {1.0, 7.5}) {
    const Eigen::MatrixXd G = c * Eigen::MatrixXd::Identity(6, 6);
    const auto f = fgls_theta(noisy, L, G, 50.0);
    CHECK(f.alpha == doctest::Approx(plain.alpha).epsilon(1e-10));
    CHECK(f.log_beta == doctest::Approx(plain.log_beta).epsilon(1e-10));
    const auto o = ols_theta(noisy, L, &G, 50.0);
    CHECK((f.cov - o.cov).cwiseAbs().maxCoeff() < 1e-8 * o.cov.norm());
    const Eigen::Matrix2d want = c * (L.transpose() * L).inverse() / 50.0;
    CHECK((o.cov - want).cwiseAbs().maxCoeff() < 1e-10 * want.norm());
  }
}

TEST_CASE("goodness of fit") {
  const auto grid = make_integer_grid(1.0, 7);
  const auto L = design_matrix(grid);
  const auto G = gamma_lrd(0.5, grid, make_compact_poly(3));
  const Eigen::VectorXd lin = 0.5 * L.col(0) + Eigen::VectorXd::Constant(7, -0.4);
  const auto exact = gof(lin, L, fgls_theta(lin, L, G, 200.0), G, 200.0);
  CHECK(exact.df == 5);
  CHECK(exact.T < 1e-18);
  CHECK(exact.p_value == doctest::Approx(1.0));

  Eigen::VectorXd Y = lin;
  Y(1) += 0.05;
  Y(4) -= 0.03;
  const auto r = gof(Y, L, fgls_theta(Y, L, G, 200.0), G, 200.0);
  const Eigen::VectorXd shifted = Y + Eigen::VectorXd::Constant(7, 2.0);
  const auto rs = gof(shifted, L, fgls_theta(shifted, L, G, 200.0), G, 200.0);
  CHECK(rs.T == doctest::Approx(r.T).epsilon(1e-9));
  CHECK(r.T > 0.0);
  CHECK(r.p_value == doctest::Approx(chi2_sf(r.T, 5)).epsilon(1e-12));
}

TEST_CASE("confidence intervals") {
  ThetaEstimate est;
  est.alpha = 0.4;
  est.log_beta = -1.0;
  est.cov << 0.01, 0.002, 0.002, 0.04;
  const auto ci0 = confidence_interval(est, 0.0);
  CHECK(ci0[0].lo == doctest::Approx(0.4));
  CHECK(ci0[0].hi == doctest::Approx(0.4));
  const auto ci = confidence_interval(est, 0.95);
  CHECK(ci[0].lo == doctest::Approx(0.4 - 1.959963984540054 * 0.1).epsilon(1e-12));
  CHECK(ci[1].hi == doctest::Approx(-1.0 + 1.959963984540054 * 0.2).epsilon(1e-12));
  ThetaEstimate zero;
  zero.alpha = 0.2;
  const auto cz = confidence_interval(zero, 0.95);
  CHECK(cz[0].lo == cz[0].hi);
  CHECK_THROWS_AS(confidence_interval(est, 1.0), DomainError);
}

TEST_CASE("Gamma is continuous in the exponent") {
  const auto w = make_compact_poly(3);
  const auto grid = make_integer_grid(1.0, 5);
  const auto a = gamma_lrd(0.5, grid, w);
  const auto b = gamma_lrd(0.5 + 1e-5, grid, w);
  CHECK(max_rel(b, a) < 1e-3);
  CHECK(max_rel(b, a) > 0.0);
  const auto fa = gamma_fbm(0.5, grid, w);
  const auto fb = gamma_fbm(0.5 + 1e-5, grid, w);
  CHECK(max_rel(fb, fa) < 1e-3);
}

TEST_CASE("regularize adds a trace-scaled ridge") {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
  const auto R = regularize(ones);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  CHECK(es.eigenvalues().minCoeff() >= 1e-8 * (1 - 1e-6));
  CHECK(((R - ones).diagonal().array() - 1e-8).abs().maxCoeff() < 1e-15);
}

TEST_CASE("exponent conversions") {
  CHECK(exponent_from_alpha(Family::FGN, 0.4) == 0.4);
  CHECK(exponent_from_alpha(Family::FBM, 1.6) == doctest::Approx(0.3));
  CHECK(exponent_from_alpha(Family::LocallyFractional, 0.0) == doctest::Approx(-0.5));
  CHECK(hurst_from_alpha(Family::FARIMA, 0.4) == doctest::Approx(0.7));
  CHECK(hurst_from_alpha(Family::FBM, 1.6) == doctest::Approx(0.3));
  for (Family f : {Family::FGN, Family::FARIMA, Family::FBM, Family::LocallyFractional}) {
    for (double e : {0.1, 0.45, 0.9}) {
      CHECK(exponent_from_alpha(f, alpha_from_exponent(f, e)) == doctest::Approx(e));
    }
  }
  const auto grid = make_integer_grid(1.0, 4);
  bool clamped = false;
  const auto G = gamma_for_family(Family::FGN, 1.4, grid, make_compact_poly(3), &clamped);
  CHECK(clamped);
  CHECK(max_rel(G, gamma_lrd(0.995, grid, make_compact_poly(3))) == 0.0);
  gamma_for_family(Family::FBM, 1.6, grid, make_compact_poly(3), &clamped);
  CHECK_FALSE(clamped);
}
