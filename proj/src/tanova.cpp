#include <chrono>
#include <cmath>
#include <limits>

#include "null_stats.hpp"
#include "topostat/errors.hpp"
#include "topostat/inference.hpp"

namespace topostat {

namespace {

void shuffle_ints(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(v[i], v[j]);
  }
}

}  // namespace

AnovaChainState::AnovaChainState(const GroupedSample& sample, double sigma)
    : AnovaChainState(pairwise_distances(sample, sigma), sample.labels,
                      sample.K) {}

AnovaChainState::AnovaChainState(Eigen::MatrixXd distances,
                                 std::vector<int> labels, int K)
    : d_(std::move(distances)), labels_(std::move(labels)) {
  const int N = static_cast<int>(labels_.size());
  if (d_.rows() != N || d_.cols() != N)
    throw InvalidInput("distance matrix does not match the label count");
  if (K < 2) throw InvalidInput("need at least two groups");
  members_.resize(K);
  for (int i = 0; i < N; ++i) {
    if (labels_[i] < 0 || labels_[i] >= K)
      throw InvalidInput("label out of range");
    members_[labels_[i]].push_back(i);
  }
  for (const auto& g : members_)
    if (g.empty()) throw InvalidInput("every group must be non-empty");
  // canonical row-major pass freezes the grand total
  total_ = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) total_ += d_(i, j);
  recompute();
}

void AnovaChainState::recompute() {
  const int N = static_cast<int>(labels_.size());
  tssw_ = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (labels_[i] == labels_[j]) tssw_ += d_(i, j);
}

void AnovaChainState::step(int i1, int j1, int i2, int j2) {
  const int K = n_groups();
  if (i1 < 0 || i1 >= K || i2 < 0 || i2 >= K)
    throw InvalidInput("group index out of range");
  if (i1 == i2)
    throw InvalidInput(
        "transposition must exchange members of two distinct groups");
  const std::vector<int>& g1 = members_[i1];
  const std::vector<int>& g2 = members_[i2];
  if (j1 < 0 || j1 >= static_cast<int>(g1.size()) || j2 < 0 ||
      j2 >= static_cast<int>(g2.size()))
    throw InvalidInput("transposition position out of range");
  const int a = g1[j1];
  const int b = g2[j2];
  const double* da = d_.col(a).data();  // symmetric: column == row
  const double* db = d_.col(b).data();

  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
  const int s1 = static_cast<int>(g1.size());
  const int s2 = static_cast<int>(g2.size());
  const int* p1 = g1.data();
  const int* p2 = g2.data();
  for (int j = 0; j < s1; ++j) {
    if (j == j1) continue;
    const int x = p1[j];
    t2 += da[x];
    t3 += db[x];
  }
  for (int j = 0; j < s2; ++j) {
    if (j == j2) continue;
    const int y = p2[j];
    t1 += da[y];
    t4 += db[y];
  }
  touches_ += 2 * static_cast<std::uint64_t>(s1 - 1 + s2 - 1);

  tssw_ += (t1 + t3) - (t2 + t4);
  if (tssw_ < 0.0) tssw_ = 0.0;
  if (tssw_ > total_) tssw_ = total_;

  members_[i1][j1] = b;
  members_[i2][j2] = a;
  labels_[a] = i2;
  labels_[b] = i1;
}

double AnovaChainState::statistic() const {
  const double b = tssb();
  if (tssw_ == 0.0)
    return b == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                    : std::numeric_limits<double>::infinity();
  return b / tssw_;
}

std::array<int, 4> AnovaChainState::sample_transposition(Rng& rng) const {
  const int K = n_groups();
  const double N = static_cast<double>(labels_.size());
  int i1, i2;
  do {
    double u = rng.uniform() * N;
    i1 = K - 1;
    for (int g = 0; g < K; ++g) {
      u -= static_cast<double>(members_[g].size());
      if (u < 0.0) { i1 = g; break; }
    }
    u = rng.uniform() * N;
    i2 = K - 1;
    for (int g = 0; g < K; ++g) {
      u -= static_cast<double>(members_[g].size());
      if (u < 0.0) { i2 = g; break; }
    }
  } while (i1 == i2);
  const int j1 = static_cast<int>(rng.uniform_index(members_[i1].size()));
  const int j2 = static_cast<int>(rng.uniform_index(members_[i2].size()));
  return {i1, j1, i2, j2};
}

void AnovaChainState::shuffle(Rng& rng) {
  std::vector<int> pool;
  pool.reserve(labels_.size());
  for (const auto& g : members_) pool.insert(pool.end(), g.begin(), g.end());
  shuffle_ints(pool, rng);
  std::size_t at = 0;
  for (std::size_t g = 0; g < members_.size(); ++g) {
    for (std::size_t j = 0; j < members_[g].size(); ++j) {
      members_[g][j] = pool[at++];
      labels_[members_[g][j]] = static_cast<int>(g);
    }
  }
  recompute();
}

void chain_step_tanova(AnovaChainState& state, int i1, int j1, int i2,
                       int j2) {
  state.step(i1, j1, i2, j2);
}

TestResult tanova(const GroupedSample& sample, double sigma,
                  long long n_steps, long long shuffle_period,
                  std::uint64_t seed) {
  if (n_steps < 1) throw InvalidInput("need at least one chain step");
  if (shuffle_period < 1) throw InvalidInput("shuffle period must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  AnovaChainState st(sample, sigma);
  TestResult r;
  r.method = "tanova";
  r.sigma = sigma;
  r.seed = seed;
  const double observed = st.statistic();
  if (std::isnan(observed)) {
    r.degenerate = true;
    r.observed = 0.0;
    r.p_value = 1.0;
  } else {
    r.observed = observed;
    Rng rng(seed);
    detail::NullAccumulator acc(observed);
    for (long long t = 1; t <= n_steps; ++t) {
      const std::array<int, 4> s = st.sample_transposition(rng);
      st.step(s[0], s[1], s[2], s[3]);
      acc.add(st.statistic());
      if (t % shuffle_period == 0 && t < n_steps) st.shuffle(rng);
    }
    acc.finalize(r);
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  return r;
}

TestResult permanova_baseline(const GroupedSample& sample, double sigma,
                              long long n_perms, std::uint64_t seed) {
  if (n_perms < 1) throw InvalidInput("need at least one permutation");
  const auto t0 = std::chrono::steady_clock::now();

  const int N = sample.size();
  const int K = sample.K;
  if (N - K < 1)
    throw InvalidInput("pseudo-F needs more observations than groups");
  const Eigen::MatrixXd d = pairwise_distances(sample, sigma);
  const std::vector<int> sizes = sample.group_sizes();

  double ss_t = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) ss_t += d(i, j);
  ss_t /= static_cast<double>(N);

  std::vector<double> within(K);
  const auto ss_w = [&](const std::vector<int>& lab) {
    std::fill(within.begin(), within.end(), 0.0);
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        if (lab[i] == lab[j]) within[lab[i]] += d(i, j);
    double s = 0.0;
    for (int g = 0; g < K; ++g) s += within[g] / static_cast<double>(sizes[g]);
    return s;
  };
  const auto pseudo_f = [&](double w) {
    const double num = (ss_t - w) / static_cast<double>(K - 1);
    const double den = w / static_cast<double>(N - K);
    if (den == 0.0)
      return num == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                        : std::numeric_limits<double>::infinity();
    return num / den;
  };

  TestResult r;
  r.method = "permanova";
  r.sigma = sigma;
  r.seed = seed;
  const double observed = pseudo_f(ss_w(sample.labels));
  if (std::isnan(observed)) {
    r.degenerate = true;
    r.observed = 0.0;
    r.p_value = 1.0;
  } else {
    r.observed = observed;
    Rng rng(seed);
    detail::NullAccumulator acc(observed);
    std::vector<int> lab = sample.labels;
    for (long long t = 1; t <= n_perms; ++t) {
      shuffle_ints(lab, rng);
      acc.add(pseudo_f(ss_w(lab)));
    }
    acc.finalize(r);
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  return r;
}

}  // namespace topostat
