#include <chrono>

#include "null_stats.hpp"
#include "topostat/errors.hpp"
#include "topostat/inference.hpp"

namespace topostat {

TwoSampleChainState::TwoSampleChainState(const GroupedSample& sample,
                                         double sigma)
    : sample_(&sample), w_(hk_weights(sample.lambda, sigma)) {
  if (sample.K != 2)
    throw InvalidInput("two-sample chain needs exactly two groups");
  for (int i = 0; i < sample.size(); ++i)
    members_[sample.labels[i]].push_back(i);
  recompute();
}

void TwoSampleChainState::recompute() {
  const Eigen::MatrixXd& c = sample_->coeffs;
  mean0_ = Eigen::VectorXd::Zero(c.rows());
  mean1_ = Eigen::VectorXd::Zero(c.rows());
  for (int id : members_[0]) mean0_ += c.col(id);
  for (int id : members_[1]) mean1_ += c.col(id);
  mean0_ /= static_cast<double>(members_[0].size());
  mean1_ /= static_cast<double>(members_[1].size());
}

void TwoSampleChainState::step(int i, int j) {
  if (i < 0 || i >= static_cast<int>(members_[0].size()) || j < 0 ||
      j >= static_cast<int>(members_[1].size()))
    throw InvalidInput("transposition position out of range");
  const Eigen::MatrixXd& c = sample_->coeffs;
  const int a = members_[0][i];
  const int b = members_[1][j];
  const double m = static_cast<double>(members_[0].size());
  const double n = static_cast<double>(members_[1].size());
  mean0_ += (c.col(b) - c.col(a)) / m;
  mean1_ += (c.col(a) - c.col(b)) / n;
  members_[0][i] = b;
  members_[1][j] = a;
  touches_ += 2 * static_cast<std::uint64_t>(c.rows());
}

double TwoSampleChainState::statistic() const {
  return (w_.array() * (mean0_ - mean1_).array().square()).sum();
}

void TwoSampleChainState::shuffle(Rng& rng) {
  std::vector<int> pool = members_[0];
  pool.insert(pool.end(), members_[1].begin(), members_[1].end());
  for (std::size_t i = pool.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(pool[i], pool[j]);
  }
  const std::size_t m = members_[0].size();
  members_[0].assign(pool.begin(), pool.begin() + m);
  members_[1].assign(pool.begin() + m, pool.end());
  recompute();
}

void chain_step_two_sample(TwoSampleChainState& state, int i, int j) {
  state.step(i, j);
}

TestResult two_sample_test(const GroupedSample& sample, double sigma,
                           long long n_steps, long long shuffle_period,
                           std::uint64_t seed) {
  if (n_steps < 1) throw InvalidInput("need at least one chain step");
  if (shuffle_period < 1) throw InvalidInput("shuffle period must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  TwoSampleChainState st(sample, sigma);
  TestResult r;
  r.method = "two-sample";
  r.sigma = sigma;
  r.seed = seed;
  r.observed = st.statistic();

  const bool all_equal =
      (sample.coeffs.colwise() - sample.coeffs.col(0)).cwiseAbs().maxCoeff() ==
      0.0;
  if (all_equal) {
    r.degenerate = true;
    r.p_value = 1.0;
    r.n_resamples = 0;
  } else {
    Rng rng(seed);
    detail::NullAccumulator acc(r.observed);
    const std::uint64_t m = st.members(0).size();
    const std::uint64_t n = st.members(1).size();
    for (long long t = 1; t <= n_steps; ++t) {
      st.step(static_cast<int>(rng.uniform_index(m)),
              static_cast<int>(rng.uniform_index(n)));
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

}  // namespace topostat
