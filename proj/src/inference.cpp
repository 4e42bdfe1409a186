#include "topostat/inference.hpp"

#include <algorithm>

#include "topostat/errors.hpp"

namespace topostat {

std::vector<int> GroupedSample::group_sizes() const {
  std::vector<int> n(K, 0);
  for (int l : labels) ++n[l];
  return n;
}

GroupedSample make_grouped_sample(const std::vector<HKEmbedding>& embeddings,
                                  const std::vector<int>& labels) {
  const int N = static_cast<int>(embeddings.size());
  if (N < 2) throw InvalidInput("need at least two embeddings");
  if (labels.size() != embeddings.size())
    throw InvalidInput("one label per embedding required");
  for (const auto& e : embeddings)
    if (!e.compatible_with(embeddings.front()))
      throw IncompatibleEmbedding(
          "all embeddings of an analysis must share basis and domain map");

  GroupedSample s;
  const int kappa = static_cast<int>(embeddings.front().coeffs.size());
  s.coeffs.resize(kappa, N);
  for (int i = 0; i < N; ++i) s.coeffs.col(i) = embeddings[i].coeffs;
  s.lambda = embeddings.front().lambda;
  s.labels = labels;
  s.M = embeddings.front().M;
  s.map = embeddings.front().map;
  s.K = *std::max_element(labels.begin(), labels.end()) + 1;
  if (*std::min_element(labels.begin(), labels.end()) < 0)
    throw InvalidInput("group labels must be non-negative");
  const std::vector<int> sizes = s.group_sizes();
  for (int g = 0; g < s.K; ++g)
    if (sizes[g] == 0) throw InvalidInput("every group must be non-empty");
  return s;
}

Eigen::MatrixXd pairwise_distances(const GroupedSample& sample, double sigma) {
  const int N = sample.size();
  const Eigen::VectorXd w = hk_weights(sample.lambda, sigma);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double v =
          (w.array() *
           (sample.coeffs.col(i) - sample.coeffs.col(j)).array().square())
              .sum();
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

}  // namespace topostat
