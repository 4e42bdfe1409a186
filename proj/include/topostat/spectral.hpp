#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "topostat/persistence.hpp"

namespace topostat {

/**
 * Heat-kernel spectral representation of persistence diagrams.
 *
 * Diagrams are standardized by an affine map into the reference domain
 * T = { 0 <= x <= y <= 1 } and expanded in the Neumann Laplace-Beltrami
 * eigenbasis of T. The eigenfunctions are the swap-symmetric cosine
 * products
 *
 *   psi_{m,n}(x,y) ~ cos(m pi x) cos(n pi y) + cos(n pi x) cos(m pi y),
 *   0 <= m <= n <= M,   lambda_{m,n} = pi^2 (m^2 + n^2),
 *
 * normalized to unit L2 norm on T, ordered by eigenvalue. A diagram
 * with standardized points q_1..q_P gets the coefficient vector
 * f_k = sum_i psi_k(q_i); smoothing by bandwidth sigma multiplies
 * coefficient k by exp(-lambda_k sigma).
 */

// Affine standardization v -> (v - shift)/scale + margin shared by the
// birth and death coordinates of every diagram in one analysis.
struct DomainMap {
  double shift = 0.0;
  double scale = 1.0;
  double margin = 0.05;

  double apply(double v) const { return (v - shift) / scale + margin; }

  bool operator==(const DomainMap& o) const {
    return shift == o.shift && scale == o.scale && margin == o.margin;
  }
};

// Fits the map over the union of all birth/death values so that they
// land inside [margin, 1 - margin]. A (near-)degenerate span falls
// back to scale 1, which parks the values near the margin.
DomainMap fit_domain_map(const std::vector<PersistenceDiagram>& diagrams,
                         double margin = 0.05);

struct SpectralBasis {
  int M = 0;                                 // largest frequency index
  std::vector<std::pair<int, int>> index;    // (m, n) per function
  Eigen::VectorXd lambda;                    // eigenvalues, ascending
  Eigen::VectorXd norm;                      // L2 normalization constants

  int kappa() const { return static_cast<int>(lambda.size()); }

  // Values of all kappa eigenfunctions at the given points,
  // one row per point, one column per function.
  Eigen::MatrixXd evaluate(
      const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const;
};

SpectralBasis make_basis(int M);

struct HKEmbedding {
  int M = 0;                 // basis order (identifies the basis)
  DomainMap map;
  int P = 0;                 // number of diagram points
  Eigen::VectorXd coeffs;    // kappa Fourier coefficients
  Eigen::VectorXd lambda;    // eigenvalues, carried for weighting

  bool compatible_with(const HKEmbedding& o) const {
    return M == o.M && map == o.map;
  }
};

// Fourier coefficients of the standardized diagram. Every mapped point
// must lie in T; a point escaping the domain signals a stale map.
HKEmbedding embed(const PersistenceDiagram& diagram,
                  const SpectralBasis& basis, const DomainMap& map);

// exp(-lambda sigma) smoothing weights for bandwidth sigma >= 0.
Eigen::VectorXd hk_weights(const Eigen::VectorXd& lambda, double sigma);

// Squared weighted L2 distance between two embeddings of one analysis:
// sum_k exp(-lambda_k sigma) (f1_k - f2_k)^2.
double l2_distance(const HKEmbedding& a, const HKEmbedding& b, double sigma);

// Squared weighted norm, i.e. the distance to the empty diagram.
double hk_norm(const HKEmbedding& e, double sigma);

// Smoothed field h(p) = sum_k exp(-lambda_k sigma) f_k psi_k(p)
// rastered on a resolution x resolution grid over [0,1]^2; entries
// below the diagonal (y < x) are NaN.
struct SmoothedField {
  int resolution = 0;
  double sigma = 0.0;
  Eigen::MatrixXd values;  // (i,j) = value at x = j/(R-1), y = i/(R-1)
};

SmoothedField evaluate_field(const HKEmbedding& e, const SpectralBasis& basis,
                             double sigma, int resolution);

}  // namespace topostat
