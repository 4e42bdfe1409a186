#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "topostat/rng.hpp"
#include "topostat/spectral.hpp"

namespace topostat {

/**
 * Resampling inference on spectrally embedded diagrams.
 *
 * Both tests walk a chain of single transpositions (one member of one
 * group exchanged with one member of another) and update sufficient
 * statistics incrementally: group means for the two-sample statistic,
 * the within-group distance total for the variance-ratio statistic.
 * Every shuffle_period steps the labels are fully re-randomized and
 * the statistics recomputed from scratch. Every step contributes one
 * draw to the null sample; the p-value is the share of draws at or
 * above the observed statistic.
 */

// Embeddings of one analysis stacked column-wise with group labels.
struct GroupedSample {
  Eigen::MatrixXd coeffs;    // kappa x N, one column per embedding
  Eigen::VectorXd lambda;    // kappa eigenvalues (weighting)
  std::vector<int> labels;   // size N, values in 0..K-1
  int K = 0;
  int M = 0;                 // basis order of origin
  DomainMap map;

  int size() const { return static_cast<int>(labels.size()); }
  std::vector<int> group_sizes() const;
};

// Validating constructor: embeddings must be pairwise compatible and
// every group 0..K-1 must be non-empty.
GroupedSample make_grouped_sample(const std::vector<HKEmbedding>& embeddings,
                                  const std::vector<int>& labels);

// Matrix of pairwise squared weighted L2 distances (same formula and
// summation as l2_distance, entry by entry).
Eigen::MatrixXd pairwise_distances(const GroupedSample& sample, double sigma);

struct TestResult {
  std::string method;
  double sigma = 0.0;
  double observed = 0.0;
  double p_value = 1.0;
  long long n_resamples = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;
  double null_mean = 0.0;
  double null_sd = 0.0;
  double hist_lo = 0.0;             // binning range of the null summary
  double hist_hi = 1.0;
  std::array<long long, 64> hist{}; // null-sample histogram, 64 bins
  double elapsed_ms = 0.0;
};

// ---------------------------------------------------------------- two-sample

// Chain state for the two-group mean statistic
//   L = sum_k exp(-lambda_k sigma) (fbar_k - gbar_k)^2.
class TwoSampleChainState {
 public:
  TwoSampleChainState(const GroupedSample& sample, double sigma);

  // Exchange member i of group 0 with member j of group 1; group means
  // move by +/- (g_j - f_i)/size, 2 kappa coefficient terms in total.
  void step(int i, int j);

  double statistic() const;
  void shuffle(Rng& rng);           // full relabel + recompute
  void recompute();                 // means from scratch

  const std::vector<int>& members(int g) const { return members_[g]; }
  std::uint64_t coeff_term_touches() const { return touches_; }

 private:
  const GroupedSample* sample_;
  Eigen::VectorXd w_;
  std::array<std::vector<int>, 2> members_;
  Eigen::VectorXd mean0_, mean1_;
  std::uint64_t touches_ = 0;
};

void chain_step_two_sample(TwoSampleChainState& state, int i, int j);

TestResult two_sample_test(const GroupedSample& sample, double sigma,
                           long long n_steps = 100000,
                           long long shuffle_period = 500,
                           std::uint64_t seed = 0);

// ------------------------------------------------------------------- t-anova

// Chain state for the variance-ratio statistic phi = TSSB / TSSW on a
// fixed matrix of pairwise distances. The grand total T = TSSB + TSSW
// is frozen at construction; TSSW is maintained incrementally with the
// per-step correction sums (touching <= 2(N-1) distance entries) and
// TSSB is always T - TSSW, which keeps the conservation identity exact.
class AnovaChainState {
 public:
  AnovaChainState(const GroupedSample& sample, double sigma);
  AnovaChainState(Eigen::MatrixXd distances, std::vector<int> labels, int K);

  // Exchange the member at position j1 of group i1 with the member at
  // position j2 of group i2 (positions index the group member lists).
  void step(int i1, int j1, int i2, int j2);

  double tssw() const { return tssw_; }
  double tssb() const { return total_ - tssw_; }
  double total() const { return total_; }
  double statistic() const;         // phi; NaN flags the 0/0 case

  void shuffle(Rng& rng);           // full relabel + recompute
  void recompute();                 // TSSW from scratch, canonical order

  // samples (i1, j1, i2, j2) with group pair probability ~ n_i n_j
  std::array<int, 4> sample_transposition(Rng& rng) const;

  const std::vector<int>& members(int g) const { return members_[g]; }
  int n_groups() const { return static_cast<int>(members_.size()); }
  std::uint64_t distance_entry_touches() const { return touches_; }

 private:
  Eigen::MatrixXd d_;
  std::vector<int> labels_;
  std::vector<std::vector<int>> members_;
  double total_ = 0.0;
  double tssw_ = 0.0;
  std::uint64_t touches_ = 0;
};

void chain_step_tanova(AnovaChainState& state, int i1, int j1, int i2, int j2);

TestResult tanova(const GroupedSample& sample, double sigma,
                  long long n_steps = 100000, long long shuffle_period = 500,
                  std::uint64_t seed = 0);

// --------------------------------------------------------------- permanova

// Anderson-style pseudo-F with full relabeling per iteration, as the
// classical baseline. Distances enter as squared dissimilarities.
TestResult permanova_baseline(const GroupedSample& sample, double sigma,
                              long long n_perms = 100000,
                              std::uint64_t seed = 0);

}  // namespace topostat
