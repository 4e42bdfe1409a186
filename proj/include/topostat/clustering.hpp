#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "topostat/inference.hpp"
#include "topostat/spectral.hpp"

namespace topostat {

/**
 * Lloyd k-means on embedded diagrams under the sigma-weighted L2
 * distance. Weighting by exp(-lambda_k sigma) is equivalent to plain
 * k-means after scaling coefficient k by exp(-lambda_k sigma / 2);
 * centroids are coefficient-wise means either way.
 */

struct Clustering {
  int k = 0;
  double sigma = 0.0;
  std::vector<int> assignments;  // one entry per embedding
  Eigen::MatrixXd centroids;     // kappa x k, raw coefficient space
  double inertia = 0.0;          // weighted squared distance total
  int n_iters = 0;
};

// Core routine on stacked coefficients (kappa x N) with eigenvalues
// for the weighting. Best of n_init seeded restarts by inertia;
// k-means++ style initialization; empty clusters are re-seeded from
// the point farthest from its assigned centroid.
Clustering topo_kmeans(const Eigen::MatrixXd& coeffs,
                       const Eigen::VectorXd& lambda, int k, double sigma,
                       int n_init = 20, int max_iters = 300,
                       std::uint64_t seed = 0);

Clustering topo_kmeans(const std::vector<HKEmbedding>& embeddings, int k,
                       double sigma, int n_init = 20, int max_iters = 300,
                       std::uint64_t seed = 0);

// Mean silhouette of a labeling under a precomputed dissimilarity
// matrix (the squared weighted L2 distances); singletons score 0.
double silhouette(const Eigen::MatrixXd& distances,
                  const std::vector<int>& assignments);

// Matrix of pairwise squared weighted L2 distances between stacked
// embeddings (same formula and summation as l2_distance).
Eigen::MatrixXd embedding_distance_matrix(const Eigen::MatrixXd& coeffs,
                                          const Eigen::VectorXd& lambda,
                                          double sigma);
Eigen::MatrixXd embedding_distance_matrix(
    const std::vector<HKEmbedding>& embeddings, double sigma);

struct KSelection {
  std::vector<int> ks;
  std::vector<double> scores;        // mean silhouette per k
  std::vector<Clustering> fits;
  int best_k = 0;                    // argmax silhouette, smallest wins ties
};

// Sweeps k over [k_min, k_max] and scores each fit by mean silhouette
// under the same weighted distance.
KSelection fit_score(const Eigen::MatrixXd& coeffs,
                     const Eigen::VectorXd& lambda, int k_min, int k_max,
                     double sigma, int n_init = 20,
                     std::uint64_t seed = 0);

KSelection fit_score(const std::vector<HKEmbedding>& embeddings, int k_min,
                     int k_max, double sigma, int n_init = 20,
                     std::uint64_t seed = 0);

// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b);

}  // namespace topostat
