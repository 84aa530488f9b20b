#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <vector>

#include "displab/errors.hpp"

namespace displab::detail {

struct BoundaryCondition {
  bool at_right = false;
  int component = 0;
  double value = 0.0;
};

/// Two-point BVP solver: Hermite-Simpson collocation (Lobatto IIIA, order 4)
/// on a fixed mesh, solved by a damped Newton iteration with a sparse
/// block-tridiagonal Jacobian.  The interval condition on [x_i, x_{i+1}] is
///   y_{i+1} - y_i = h/6 (f_i + 4 f_mid + f_{i+1}),
///   y_mid = (y_i + y_{i+1})/2 + h/8 (f_i - f_{i+1}),
/// closed by D pinned components at the ends.
template <int D>
std::vector<Eigen::Matrix<double, D, 1>> solve_collocation(
    const std::vector<double>& xs,
    const std::function<Eigen::Matrix<double, D, 1>(double, const Eigen::Matrix<double, D, 1>&)>&
        f,
    const std::function<Eigen::Matrix<double, D, D>(double, const Eigen::Matrix<double, D, 1>&)>&
        df,
    const std::vector<BoundaryCondition>& bcs, std::vector<Eigen::Matrix<double, D, 1>> y,
    double tol = 1e-11, int max_iter = 60) {
  using Vec = Eigen::Matrix<double, D, 1>;
  using Mat = Eigen::Matrix<double, D, D>;

  const std::size_t n = xs.size();
  if (n < 2) throw validation_error("collocation: need at least two mesh nodes");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(xs[i + 1] > xs[i])) throw validation_error("collocation: mesh must increase strictly");
  if (bcs.size() != static_cast<std::size_t>(D))
    throw validation_error("collocation: need exactly one boundary condition per component");
  if (y.size() != n) throw validation_error("collocation: seed size must match the mesh");

  const std::size_t unknowns = D * n;
  const std::size_t bc_row0 = D * (n - 1);

  auto residual = [&](const std::vector<Vec>& yy) {
    Eigen::VectorXd F(unknowns);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = xs[i + 1] - xs[i];
      const Vec fi = f(xs[i], yy[i]);
      const Vec fi1 = f(xs[i + 1], yy[i + 1]);
      const Vec ym = 0.5 * (yy[i] + yy[i + 1]) + (h / 8.0) * (fi - fi1);
      const Vec fm = f(0.5 * (xs[i] + xs[i + 1]), ym);
      F.segment<D>(static_cast<Eigen::Index>(D * i)) =
          yy[i + 1] - yy[i] - (h / 6.0) * (fi + 4.0 * fm + fi1);
    }
    for (std::size_t j = 0; j < bcs.size(); ++j) {
      const auto& bc = bcs[j];
      const std::size_t node = bc.at_right ? n - 1 : 0;
      F[static_cast<Eigen::Index>(bc_row0 + j)] = yy[node][bc.component] - bc.value;
    }
    return F;
  };

  Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(unknowns),
                                static_cast<Eigen::Index>(unknowns));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * D * D * n + D);

  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd F = residual(y);
    if (!F.allFinite()) throw numerical_error("collocation: residual is not finite");
    const double norm = F.lpNorm<Eigen::Infinity>();
    if (norm < tol) return y;

    trips.clear();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = xs[i + 1] - xs[i];
      const Vec fi = f(xs[i], y[i]);
      const Vec fi1 = f(xs[i + 1], y[i + 1]);
      const Vec ym = 0.5 * (y[i] + y[i + 1]) + (h / 8.0) * (fi - fi1);
      const Mat Ai = df(xs[i], y[i]);
      const Mat Ai1 = df(xs[i + 1], y[i + 1]);
      const Mat Am = df(0.5 * (xs[i] + xs[i + 1]), ym);
      const Mat I = Mat::Identity();
      const Mat Bi = -I - (h / 6.0) * (Ai + 4.0 * Am * (0.5 * I + (h / 8.0) * Ai));
      const Mat Ci = I - (h / 6.0) * (Ai1 + 4.0 * Am * (0.5 * I - (h / 8.0) * Ai1));
      for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) {
          trips.emplace_back(static_cast<int>(D * i) + r, static_cast<int>(D * i) + c, Bi(r, c));
          trips.emplace_back(static_cast<int>(D * i) + r, static_cast<int>(D * (i + 1)) + c,
                             Ci(r, c));
        }
    }
    for (std::size_t j = 0; j < bcs.size(); ++j) {
      const auto& bc = bcs[j];
      const std::size_t node = bc.at_right ? n - 1 : 0;
      trips.emplace_back(static_cast<int>(bc_row0 + j),
                         static_cast<int>(D * node) + bc.component, 1.0);
    }
    J.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success)
      throw numerical_error("collocation: Jacobian factorization failed");
    const Eigen::VectorXd delta = lu.solve(-F);

    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      std::vector<Vec> trial = y;
      for (std::size_t i = 0; i < n; ++i)
        trial[i] += lambda * delta.segment<D>(static_cast<Eigen::Index>(D * i));
      const Eigen::VectorXd Ft = residual(trial);
      if (Ft.allFinite() && Ft.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * lambda) * norm) {
        y = std::move(trial);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) throw numerical_error("collocation: Newton line search stalled");
  }
  throw numerical_error("collocation: Newton did not converge");
}

}  // namespace displab::detail
