#pragma once

#include <span>
#include <vector>

namespace displab::detail {

/// Finite-difference weights on an arbitrary node set (Fornberg's recursion):
/// returns w with f^(m)(x0) ~ sum_i w[i] f(nodes[i]).  With m = 0 the weights
/// reproduce polynomial interpolation at x0.
inline std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = static_cast<int>(i < static_cast<std::size_t>(m) ? i : m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

/// Central finite-difference derivative of order m with 8th-order accuracy,
/// evaluated by sampling f on a symmetric stencil of spacing h around x0.
template <class F>
double fd_derivative(F&& f, double x0, int m, double h) {
  const int half = (m + 7) / 2 + 1;
  std::vector<double> nodes(2 * half + 1);
  for (int i = -half; i <= half; ++i) nodes[i + half] = x0 + i * h;
  const auto w = fd_weights(x0, nodes, m);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += w[i] * f(nodes[i]);
  return acc;
}

}  // namespace displab::detail
