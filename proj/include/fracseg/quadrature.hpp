#pragma once

#include <cstddef>
#include <vector>

namespace fracseg {

/// Gauss-Legendre nodes and weights on [-1, 1], all n points.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Supported orders: 8, 10, 16, 20, 30, 40, 64.
const GaussRule& gauss_legendre(int n);

/// Composite rule over [lo, hi] split into `panels` equal pieces.
template <class F>
double integrate_composite(F&& f, double lo, double hi, int panels, const GaussRule& rule) {
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * width;
    const double half = 0.5 * width;
    double part = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      part += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    total += half * part;
  }
  return total;
}

}  // namespace fracseg
