#include "fracseg/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include "fracseg/errors.hpp"

namespace fracseg {

namespace {

template <unsigned N>
GaussRule expand() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  GaussRule rule;
  // boost stores the nonnegative half; node 0 is the origin when N is odd
  const std::size_t start = (N % 2 == 1) ? 1 : 0;
  for (std::size_t i = x.size(); i-- > start;) {
    rule.nodes.push_back(-x[i]);
    rule.weights.push_back(w[i]);
  }
  if (N % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(w[0]);
  }
  for (std::size_t i = start; i < x.size(); ++i) {
    rule.nodes.push_back(x[i]);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const GaussRule g8 = expand<8>();
  static const GaussRule g10 = expand<10>();
  static const GaussRule g16 = expand<16>();
  static const GaussRule g20 = expand<20>();
  static const GaussRule g30 = expand<30>();
  static const GaussRule g40 = expand<40>();
  static const GaussRule g64 = expand<64>();
  switch (n) {
    case 8:
      return g8;
    case 10:
      return g10;
    case 16:
      return g16;
    case 20:
      return g20;
    case 30:
      return g30;
    case 40:
      return g40;
    case 64:
      return g64;
    default:
      throw DomainError("unsupported Gauss-Legendre order " + std::to_string(n));
  }
}

}  // namespace fracseg
