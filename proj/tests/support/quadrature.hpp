#pragma once

// Numerical integration over the reference triangle T = {0 <= x <= y <= 1},
// used by the tests to check the spectral module against direct
// quadrature. The unit square is tiled by an R x R grid; cells fully
// inside T get a tensor Gauss-Legendre rule, cells straddling the
// diagonal get a degree-5 rule on their triangular half, cells outside
// T are skipped.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "topostat/spectral.hpp"

namespace quadrature {

struct NodeSet {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
};

// R x R grid; `order` (2 or 3) is the 1D Gauss-Legendre order used on
// the square cells.
inline NodeSet triangle_grid_rule(int resolution, int order) {
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");

  std::vector<double> gl_x, gl_w;  // nodes/weights on [-1, 1]
  if (order == 2) {
    const double r = 1.0 / std::sqrt(3.0);
    gl_x = {-r, r};
    gl_w = {1.0, 1.0};
  } else if (order == 3) {
    const double r = std::sqrt(3.0 / 5.0);
    gl_x = {-r, 0.0, r};
    gl_w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  } else {
    throw std::invalid_argument("order must be 2 or 3");
  }

  // Degree-5 seven-point rule on a triangle, barycentric coordinates;
  // weights sum to 1 and are scaled by the triangle area.
  const double tw0 = 0.225;
  const double tw1 = 0.132394152788506;
  const double ta1 = 0.059715871789770, tb1 = 0.470142064105115;
  const double tw2 = 0.125939180544827;
  const double ta2 = 0.797426985353087, tb2 = 0.101286507323456;
  const double tri_l1[7] = {1.0 / 3.0, ta1, tb1, tb1, ta2, tb2, tb2};
  const double tri_l2[7] = {1.0 / 3.0, tb1, ta1, tb1, tb2, ta2, tb2};
  const double tri_w[7] = {tw0, tw1, tw1, tw1, tw2, tw2, tw2};

  const int R = resolution;
  const double h = 1.0 / R;
  const int q = order;
  const std::size_t n_full = static_cast<std::size_t>(R) * (R - 1) / 2;
  const std::size_t total = n_full * q * q + static_cast<std::size_t>(R) * 7;

  NodeSet out;
  out.points.resize(static_cast<Eigen::Index>(total), 2);
  out.weights.resize(static_cast<Eigen::Index>(total));

  Eigen::Index at = 0;
  for (int i = 0; i < R; ++i) {
    const double y0 = i * h, y1 = (i + 1) * h;
    // square cells strictly left of the diagonal: x-range below y-range
    for (int j = 0; j < i; ++j) {
      const double x0 = j * h, x1 = (j + 1) * h;
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
          out.points(at, 0) = 0.5 * (x0 + x1) + 0.5 * h * gl_x[a];
          out.points(at, 1) = 0.5 * (y0 + y1) + 0.5 * h * gl_x[b];
          out.weights(at) = gl_w[a] * gl_w[b] * (h * h / 4.0);
          ++at;
        }
    }
    // diagonal cell: keep the half with x <= y, vertices
    // (x0,y0), (x0,y1), (x1,y1) where x0 = y0, x1 = y1
    const double vx[3] = {y0, y0, y1};
    const double vy[3] = {y0, y1, y1};
    const double area = h * h / 2.0;
    for (int t = 0; t < 7; ++t) {
      const double l1 = tri_l1[t], l2 = tri_l2[t], l3 = 1.0 - l1 - l2;
      out.points(at, 0) = l1 * vx[0] + l2 * vx[1] + l3 * vx[2];
      out.points(at, 1) = l1 * vy[0] + l2 * vy[1] + l3 * vy[2];
      out.weights(at) = tri_w[t] * area;
      ++at;
    }
  }
  return out;
}

// Integrals over T of the squared fields whose coefficient vectors are
// the columns of `coeffs`: result(c) = integral of (sum_k coeffs(k,c)
// psi_k)^2. Nodes are consumed in blocks to bound the size of the
// evaluated basis matrix.
inline Eigen::VectorXd integrate_squared_fields(
    const topostat::SpectralBasis& basis, const Eigen::MatrixXd& coeffs,
    const NodeSet& nodes, Eigen::Index block = 8192) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(coeffs.cols());
  const Eigen::Index n = nodes.points.rows();
  for (Eigen::Index lo = 0; lo < n; lo += block) {
    const Eigen::Index len = std::min(block, n - lo);
    const Eigen::MatrixXd psi =
        basis.evaluate(nodes.points.middleRows(lo, len));
    const Eigen::MatrixXd fields = psi * coeffs;  // len x cols
    acc.noalias() +=
        fields.array().square().matrix().transpose() *
        nodes.weights.segment(lo, len);
  }
  return acc;
}

// Gram matrix of the basis under the rule: entry (a,b) approximates
// the integral of psi_a psi_b over T (identity for an orthonormal
// basis).
inline Eigen::MatrixXd gram_matrix(const topostat::SpectralBasis& basis,
                                   const NodeSet& nodes,
                                   Eigen::Index block = 8192) {
  const int kappa = basis.kappa();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(kappa, kappa);
  const Eigen::Index n = nodes.points.rows();
  for (Eigen::Index lo = 0; lo < n; lo += block) {
    const Eigen::Index len = std::min(block, n - lo);
    const Eigen::MatrixXd psi =
        basis.evaluate(nodes.points.middleRows(lo, len));
    gram.noalias() +=
        psi.transpose() * nodes.weights.segment(lo, len).asDiagonal() * psi;
  }
  return gram;
}

}  // namespace quadrature
