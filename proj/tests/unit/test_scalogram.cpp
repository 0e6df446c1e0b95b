#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "fracseg/errors.hpp"
#include "fracseg/estimate.hpp"
#include "fracseg/scalogram.hpp"
#include "fracseg/synth.hpp"
#include "helpers.hpp"

using namespace fracseg;

namespace {

SampledPath fgn_path(double D, std::size_t N, std::uint64_t seed) {
  PiecewiseSpec spec;
  spec.exponents = {D};
  spec.sigmas = {1.0};
  return simulate_piecewise(spec, N, 1.0, seed);
}

// Straight normal-equation solve, independent of segment_cost.
double rss_oracle(const Eigen::VectorXd& Y, const Eigen::MatrixXd& L) {
  const Eigen::Matrix2d A = L.transpose() * L;
  const Eigen::Vector2d rhs = L.transpose() * Y;
  const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const Eigen::Vector2d theta((A(1, 1) * rhs(0) - A(0, 1) * rhs(1)) / det,
                              (A(0, 0) * rhs(1) - A(1, 0) * rhs(0)) / det);
  return (Y - L * theta).squaredNorm();
}

}  // namespace

TEST_CASE("design matrix") {
  const auto L1 = design_matrix(ScaleGrid{1.0, {1, 2, 4}, 0.0});
  CHECK(L1(0, 0) == 0.0);
  CHECK(L1(1, 0) == doctest::Approx(std::log(2.0)));
  CHECK(L1(2, 0) == doctest::Approx(std::log(4.0)));
  CHECK(L1.col(1).isOnes());
  const auto L = design_matrix(make_integer_grid(8.0, 3));
  CHECK(L(0, 0) == doctest::Approx(std::log(8.0)));
  CHECK(L(1, 0) == doctest::Approx(std::log(16.0)));
  CHECK(L(2, 0) == doctest::Approx(std::log(24.0)));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  CHECK(lu.rank() == 2);
}

TEST_CASE("scale grid validation") {
  CHECK_THROWS_AS(make_integer_grid(4.0, 2), DomainError);
  CHECK_THROWS_AS((ScaleGrid{1.0, {1, 1, 2}, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS((ScaleGrid{-1.0, {1, 2, 3}, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS((ScaleGrid{1.0, {1, 2, 3}, 0.5}.validate()), DomainError);
}

TEST_CASE("band grid keeps every scale inside the frequency band") {
  const auto w = make_band_limited(1.0, 4.0);
  const auto g = make_band_grid(w, 0.5, 8.0, 10, 0.2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(w.mu() / g.scale(i) <= 8.0 * (1 + 1e-12));
    CHECK(w.lambda() / g.scale(i) >= 0.5 * (1 - 1e-12));
  }
  CHECK_THROWS_AS(make_band_grid(w, 1.0, 3.0, 10, 0.2), DomainError);
  CHECK_THROWS_AS(make_band_grid(make_compact_poly(3), 0.5, 8.0, 10, 0.2), DomainError);
}

TEST_CASE("segment_cost") {
  const auto L = design_matrix(ScaleGrid{1.0, {1, 2, 4}, 0.0});
  Eigen::VectorXd lin = 0.7 * L.col(0) + Eigen::VectorXd::Constant(3, -1.2);
  CHECK(segment_cost(lin, L) < 1e-28);
  Eigen::VectorXd Y(3);
  Y << 0.0, 1.0, 0.0;
  CHECK(segment_cost(Y, L) == doctest::Approx(rss_oracle(Y, L)).epsilon(1e-12));
  CHECK(segment_cost(Y, L) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const auto L10 = design_matrix(make_integer_grid(3.0, 10));
  Eigen::VectorXd Z(10);
  for (int i = 0; i < 10; ++i) Z(i) = std::sin(1.3 * i) + 0.1 * i * i;
  const double base = segment_cost(Z, L10);
  CHECK(base == doctest::Approx(rss_oracle(Z, L10)).epsilon(1e-10));
  Eigen::VectorXd shifted = Z + 2.5 * L10.col(0) + Eigen::VectorXd::Constant(10, -4.0);
  CHECK(segment_cost(shifted, L10) == doctest::Approx(base).epsilon(1e-10));
  CHECK(base <= (Z.array() - Z.mean()).matrix().squaredNorm());
}

TEST_CASE("seg_variance uses exactly the shifts [k/a] .. [k'/a]-1") {
  const auto w = make_compact_poly(3);
  const auto path = fgn_path(0.4, 3000, 21);
  const double a = 12.0;
  for (auto [k, k_end] : {std::pair{0.0, 3000.0}, std::pair{137.0, 1999.5}, std::pair{600.0, 700.0}}) {
    CAPTURE(k);
    const long lo = static_cast<long>(std::floor(k / a));
    const long hi = static_cast<long>(std::floor(k_end / a)) - 1;
    double acc = 0.0;
    for (long p = lo; p <= hi; ++p) {
      const double e = coeff(path, w, a, a * p);
      acc += e * e;
    }
    const double want = a / (k_end - k) * acc;
    CHECK(seg_variance(path, w, a, k, k_end) == doctest::Approx(want).epsilon(1e-12));
    const Scalogram sc(path, w, ScaleGrid{a, {1, 2, 3}, 0.0});
    CHECK(sc.shift_count(0, k, k_end) == static_cast<std::size_t>(hi - lo + 1));
    CHECK((*sc.variances(k, k_end))(0) == doctest::Approx(want).epsilon(1e-10));
  }
  CHECK_THROWS_AS(seg_variance(path, w, a, 100.0, 107.0), DomainError);
}

TEST_CASE("seg_variance prefactor: S (k'-k)/a is the plain sum of squares") {
  const auto w = make_compact_poly(2);
  const auto path = fgn_path(0.5, 2000, 5);
  const double a = 10.0;
  const double S = seg_variance(path, w, a, 0.0, 2000.0);
  double acc = 0.0;
  for (int p = 0; p < 200; ++p) acc += std::pow(coeff(path, w, a, a * p), 2);
  CHECK(S * 2000.0 / a == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("trimmed variance") {
  const auto w = make_compact_poly(3);
  const auto path = fgn_path(0.6, 4000, 8);
  const double a = 9.0;
  CHECK(seg_variance_trimmed(path, w, a, 300.0, 3100.0, 0.0) ==
        seg_variance(path, w, a, 300.0, 3100.0));
  const double trim = 0.1;
  const double k = 300.0;
  const double k_end = 3100.0;
  const double len = k_end - k;
  const long lo = static_cast<long>(std::floor((k + trim * len) / a));
  const long hi = static_cast<long>(std::floor((k_end - trim * len) / a)) - 1;
  double acc = 0.0;
  for (long p = lo; p <= hi; ++p) acc += std::pow(coeff(path, w, a, a * p), 2);
  CHECK(seg_variance_trimmed(path, w, a, k, k_end, trim) ==
        doctest::Approx(a / ((1 - 2 * trim) * len) * acc).epsilon(1e-12));
}

TEST_CASE("band-limited scalogram clips shifts to the data and rescales") {
  const auto w = make_band_limited(1.0, 4.0);
  PiecewiseSpec spec;
  spec.family = Family::LocallyFractional;
  spec.exponents = {0.2};
  spec.sigmas = {1.0};
  const auto path = simulate_piecewise(spec, 4000, 0.1, 3);
  const auto g = make_band_grid(w, 0.5, 8.0, 4, 0.2);
  const Scalogram sc(path, w, g);
  const auto S = sc.variances(0.0, path.duration());
  REQUIRE(S.has_value());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK((*S)(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(seg_variance_trimmed(path, w, g.scale(i), 0.0, path.duration(), 0.2))
              .epsilon(1e-9));
  }
}

TEST_CASE("log_variance_vector and scaling invariance") {
  const auto w = make_compact_poly(3);
  auto path = fgn_path(0.3, 5000, 17);
  const auto g = make_integer_grid(10.0, 6);
  const auto Y = log_variance_vector(path, w, g, 0.0, 5000.0);
  CHECK(Y.n_eff == doctest::Approx(500.0));
  const Scalogram sc(path, w, g);
  const auto Ysc = sc.log_variances(0.0, 5000.0);
  CHECK((Y.Y - Ysc.Y).cwiseAbs().maxCoeff() < 1e-10);

  SampledPath scaled = path;
  for (double& v : scaled.values) v *= 3.0;
  const auto Y3 = log_variance_vector(scaled, w, g, 0.0, 5000.0);
  CHECK(((Y3.Y - Y.Y).array() - 2.0 * std::log(3.0)).abs().maxCoeff() < 1e-10);
  const auto L = design_matrix(g);
  CHECK(segment_cost(Y3.Y, L) == doctest::Approx(segment_cost(Y.Y, L)).epsilon(1e-9));

  SampledPath zero;
  zero.values.assign(5001, 0.0);
  CHECK_THROWS_AS(log_variance_vector(zero, w, g, 0.0, 5000.0), NumericError);
  const Scalogram zsc(zero, w, g);
  CHECK_THROWS_AS(zsc.log_variances(0.0, 5000.0), NumericError);
  CHECK(std::isinf(sc.cost(0.0, 50.0)));
}

TEST_CASE("single-regime FGN: the log-variance slope estimates D") {
  const auto w = make_compact_poly(3);
  for (double D : {0.5, 0.8}) {
    CAPTURE(D);
    std::vector<double> slopes;
    for (int r = 0; r < 8; ++r) {
      const auto path = fgn_path(D, 20000, 400 + r);
      const auto g = make_integer_grid(std::pow(20000.0, 0.25), 30);
      const Scalogram sc(path, w, g);
      const auto Y = sc.log_variances(0.0, path.duration());
      slopes.push_back(ols_theta(Y.Y, sc.design()).alpha);
    }
    CHECK(std::abs(testutil::mean(slopes) - D) < 0.1);
  }
}

TEST_CASE("single-regime locally fractional: the trimmed slope estimates 2H+1") {
  const auto w = make_band_limited(1.0, 4.0);
  const auto g = make_band_grid(w, 0.5, 8.0, 10, 0.2);
  for (double H : {-0.2, 0.3}) {
    CAPTURE(H);
    PiecewiseSpec spec;
    spec.family = Family::LocallyFractional;
    spec.exponents = {H};
    spec.sigmas = {1.0};
    std::vector<double> slopes;
    for (int r = 0; r < 6; ++r) {
      const auto path = simulate_piecewise(spec, 4000, 0.1, 60 + r);
      const Scalogram sc(path, w, g);
      slopes.push_back(ols_theta(sc.log_variances(0.0, path.duration()).Y, sc.design()).alpha);
    }
    CHECK(std::abs(testutil::mean(slopes) - (2 * H + 1)) < 0.15);
  }
}
