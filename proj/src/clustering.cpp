#include "topostat/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "topostat/errors.hpp"
#include "topostat/rng.hpp"

namespace topostat {

namespace {

Eigen::MatrixXd stack_embeddings(const std::vector<HKEmbedding>& embeddings) {
  if (embeddings.empty()) throw InvalidInput("no embeddings to cluster");
  for (const auto& e : embeddings)
    if (!e.compatible_with(embeddings.front()))
      throw IncompatibleEmbedding(
          "all embeddings of an analysis must share basis and domain map");
  Eigen::MatrixXd coeffs(embeddings.front().coeffs.size(), embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i)
    coeffs.col(i) = embeddings[i].coeffs;
  return coeffs;
}

// one Lloyd run on pre-scaled data; returns inertia
double lloyd(const Eigen::MatrixXd& s, int k, int max_iters, Rng& rng,
             std::vector<int>& assign, Eigen::MatrixXd& centers,
             int& iters_out) {
  const int N = static_cast<int>(s.cols());

  // k-means++ seeding
  centers.resize(s.rows(), k);
  std::vector<double> d2(N, std::numeric_limits<double>::infinity());
  centers.col(0) = s.col(rng.uniform_index(N));
  for (int c = 1; c < k; ++c) {
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
      const double d = (s.col(i) - centers.col(c - 1)).squaredNorm();
      d2[i] = std::min(d2[i], d);
      sum += d2[i];
    }
    int pick = 0;
    if (sum > 0.0) {
      double u = rng.uniform() * sum;
      for (int i = 0; i < N; ++i) {
        u -= d2[i];
        if (u <= 0.0) { pick = i; break; }
        pick = i;
      }
    } else {
      pick = static_cast<int>(rng.uniform_index(N));
    }
    centers.col(c) = s.col(pick);
  }

  assign.assign(N, -1);
  std::vector<int> counts(k);
  double inertia = 0.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    bool changed = false;
    inertia = 0.0;
    for (int i = 0; i < N; ++i) {
      int best = 0;
      double bd = (s.col(i) - centers.col(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (s.col(i) - centers.col(c)).squaredNorm();
        if (d < bd) { bd = d; best = c; }
      }
      if (assign[i] != best) { assign[i] = best; changed = true; }
      inertia += bd;
    }
    if (!changed && it > 0) break;

    centers.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < N; ++i) {
      centers.col(assign[i]) += s.col(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.col(c) /= static_cast<double>(counts[c]);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // re-seed an empty cluster from the farthest assigned point
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < N; ++i) {
        if (counts[assign[i]] <= 1) continue;
        const double d = (s.col(i) - centers.col(assign[i])).squaredNorm();
        if (d > fd) { fd = d; far = i; }
      }
      if (far < 0) far = static_cast<int>(rng.uniform_index(N));
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      centers.col(c) = s.col(far);
    }
  }
  iters_out = it;
  return inertia;
}

}  // namespace

Clustering topo_kmeans(const Eigen::MatrixXd& coeffs,
                       const Eigen::VectorXd& lambda, int k, double sigma,
                       int n_init, int max_iters, std::uint64_t seed) {
  const int N = static_cast<int>(coeffs.cols());
  if (k < 1) throw InvalidInput("k must be positive");
  if (k > N) throw InvalidInput("k exceeds the number of embeddings");
  if (n_init < 1) throw InvalidInput("need at least one restart");
  if (coeffs.rows() != lambda.size())
    throw InvalidInput("coefficient rows must match eigenvalue count");

  const Eigen::VectorXd half = hk_weights(lambda, sigma / 2.0);
  const Eigen::MatrixXd scaled = half.asDiagonal() * coeffs;

  Rng rng(seed);
  Clustering best;
  best.k = k;
  best.sigma = sigma;
  best.inertia = std::numeric_limits<double>::infinity();
  std::vector<int> assign;
  Eigen::MatrixXd centers;
  for (int r = 0; r < n_init; ++r) {
    int iters = 0;
    const double inertia = lloyd(scaled, k, max_iters, rng, assign, centers,
                                 iters);
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.assignments = assign;
      best.n_iters = iters;
    }
  }
  // raw-space centroids from the winning assignment
  best.centroids = Eigen::MatrixXd::Zero(coeffs.rows(), k);
  std::vector<int> counts(k, 0);
  for (int i = 0; i < N; ++i) {
    best.centroids.col(best.assignments[i]) += coeffs.col(i);
    ++counts[best.assignments[i]];
  }
  for (int c = 0; c < k; ++c)
    if (counts[c] > 0) best.centroids.col(c) /= static_cast<double>(counts[c]);
  return best;
}

Clustering topo_kmeans(const std::vector<HKEmbedding>& embeddings, int k,
                       double sigma, int n_init, int max_iters,
                       std::uint64_t seed) {
  return topo_kmeans(stack_embeddings(embeddings), embeddings.front().lambda,
                     k, sigma, n_init, max_iters, seed);
}

double silhouette(const Eigen::MatrixXd& distances,
                  const std::vector<int>& assignments) {
  const int N = static_cast<int>(assignments.size());
  if (distances.rows() != N || distances.cols() != N)
    throw InvalidInput("distance matrix does not match the labeling");
  const int k =
      *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<int> counts(k, 0);
  for (int l : assignments) ++counts[l];

  double total = 0.0;
  std::vector<double> mean_to(k);
  for (int i = 0; i < N; ++i) {
    std::fill(mean_to.begin(), mean_to.end(), 0.0);
    for (int j = 0; j < N; ++j)
      if (j != i) mean_to[assignments[j]] += distances(i, j);
    const int own = assignments[i];
    if (counts[own] <= 1) continue;  // singleton scores 0
    const double a = mean_to[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != own && counts[c] > 0)
        b = std::min(b, mean_to[c] / static_cast<double>(counts[c]));
    if (!std::isfinite(b)) continue;  // single cluster overall
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(N);
}

Eigen::MatrixXd embedding_distance_matrix(const Eigen::MatrixXd& coeffs,
                                          const Eigen::VectorXd& lambda,
                                          double sigma) {
  // pairwise weighted distances, same formula as l2_distance
  const int N = static_cast<int>(coeffs.cols());
  const Eigen::VectorXd w = hk_weights(lambda, sigma);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double v =
          (w.array() * (coeffs.col(i) - coeffs.col(j)).array().square())
              .sum();
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

Eigen::MatrixXd embedding_distance_matrix(
    const std::vector<HKEmbedding>& embeddings, double sigma) {
  return embedding_distance_matrix(stack_embeddings(embeddings),
                                   embeddings.front().lambda, sigma);
}

KSelection fit_score(const Eigen::MatrixXd& coeffs,
                     const Eigen::VectorXd& lambda, int k_min, int k_max,
                     double sigma, int n_init, std::uint64_t seed) {
  if (k_min < 2) throw InvalidInput("silhouette needs k >= 2");
  if (k_max < k_min) throw InvalidInput("empty k range");

  const Eigen::MatrixXd d = embedding_distance_matrix(coeffs, lambda, sigma);

  KSelection sel;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    sel.ks.push_back(k);
    sel.fits.push_back(
        topo_kmeans(coeffs, lambda, k, sigma, n_init, 300, seed));
    const double s = silhouette(d, sel.fits.back().assignments);
    sel.scores.push_back(s);
    if (s > best_score) {
      best_score = s;
      sel.best_k = k;
    }
  }
  return sel;
}

KSelection fit_score(const std::vector<HKEmbedding>& embeddings, int k_min,
                     int k_max, double sigma, int n_init,
                     std::uint64_t seed) {
  return fit_score(stack_embeddings(embeddings), embeddings.front().lambda,
                   k_min, k_max, sigma, n_init, seed);
}

double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw InvalidInput("labelings must be non-empty and equally long");
  std::map<std::pair<int, int>, long long> cont;
  std::map<int, long long> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++cont[{a[i], b[i]}];
    ++ra[a[i]];
    ++rb[b[i]];
  }
  auto choose2 = [](long long n) { return n * (n - 1) / 2.0; };
  double sum_c = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, n] : cont) sum_c += choose2(n);
  for (const auto& [key, n] : ra) sum_a += choose2(n);
  for (const auto& [key, n] : rb) sum_b += choose2(n);
  const double total = choose2(static_cast<long long>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both labelings trivial
  return (sum_c - expected) / (max_index - expected);
}

}  // namespace topostat
