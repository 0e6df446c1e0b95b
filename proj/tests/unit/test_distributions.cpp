#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "fracseg/distributions.hpp"
#include "fracseg/errors.hpp"

using namespace fracseg;

TEST_CASE("chi-square 95% quantile at 5 degrees of freedom is 11.0705") {
  CHECK(std::abs(chi2_quantile(0.95, 5) - 11.0705) < 5e-5);
  CHECK(chi2_sf(11.0705, 5) == doctest::Approx(0.05).epsilon(1e-5));
}

TEST_CASE("incomplete gamma against Boost") {
  for (double a : {0.5, 1.0, 2.5, 9.0, 14.0, 50.0}) {
    for (double x : {1e-3, 0.3, 1.0, 3.5, 9.0, 14.0, 30.0, 80.0}) {
      CAPTURE(a);
      CAPTURE(x);
      CHECK(gamma_p(a, x) == doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-12));
      const double q = boost::math::gamma_q(a, x);
      CHECK(std::abs(gamma_q(a, x) - q) <= 1e-12 * q + 1e-300);
    }
  }
  CHECK(gamma_p(2.0, 0.0) == 0.0);
  CHECK(gamma_q(2.0, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_p(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(gamma_q(1.0, -1.0), DomainError);
}

TEST_CASE("chi-square functions against Boost") {
  for (double df : {1.0, 2.0, 5.0, 18.0, 28.0}) {
    boost::math::chi_squared_distribution<double> dist(df);
    for (double p : {0.01, 0.05, 0.5, 0.95, 0.99}) {
      CAPTURE(df);
      CAPTURE(p);
      CHECK(chi2_quantile(p, df) == doctest::Approx(boost::math::quantile(dist, p)).epsilon(1e-9));
    }
    for (double x : {0.5, 4.0, 20.0, 60.0}) {
      CHECK(chi2_cdf(x, df) == doctest::Approx(boost::math::cdf(dist, x)).epsilon(1e-12));
      const double sf = boost::math::cdf(boost::math::complement(dist, x));
      CHECK(std::abs(chi2_sf(x, df) - sf) <= 1e-12 * sf + 1e-300);
    }
  }
  CHECK(chi2_sf(0.0, 3.0) == 1.0);
}

TEST_CASE("normal quantile accurate to 1e-8") {
  boost::math::normal_distribution<double> n01;
  for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.2, 0.5, 0.7, 0.975, 0.999, 1 - 1e-9}) {
    CAPTURE(p);
    CHECK(std::abs(normal_quantile(p) - boost::math::quantile(n01, p)) < 1e-8);
  }
  for (double x : {-6.0, -1.5, 0.0, 0.3, 2.0, 7.0}) {
    CHECK(normal_cdf(x) == doctest::Approx(boost::math::cdf(n01, x)).epsilon(1e-13));
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.0) == -std::numeric_limits<double>::infinity());
  CHECK(normal_quantile(1.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(normal_quantile(1.5), DomainError);
}

TEST_CASE("Kolmogorov-Smirnov statistic and p-value") {
  const std::vector<double> sample{0.1, 0.4, 0.7};
  const double d = ks_statistic(sample, [](double x) { return x; });
  // ecdf steps against U(0,1): max(1/3-0.1, 0.4-1/3, 2/3-0.4, 0.7-2/3, 1-0.7)
  CHECK(d == doctest::Approx(0.3));
  // classic asymptotic critical values
  const std::size_t n = 400;
  const double factor = std::sqrt(400.0) + 0.12 + 0.11 / std::sqrt(400.0);
  CHECK(ks_pvalue(1.35810 / factor, n) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(ks_pvalue(1.62762 / factor, n) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(ks_pvalue(0.0, n) == 1.0);
  CHECK(ks_pvalue(1.0, n) < 1e-100);
}
