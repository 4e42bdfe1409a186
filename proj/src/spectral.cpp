#include "topostat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "topostat/errors.hpp"

namespace topostat {

DomainMap fit_domain_map(const std::vector<PersistenceDiagram>& diagrams,
                         double margin) {
  if (!(margin >= 0.0 && margin < 0.5))
    throw InvalidInput("margin must lie in [0, 0.5)");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& d : diagrams)
    for (const auto& p : d.pairs) {
      lo = std::min(lo, p.birth);
      hi = std::max(hi, p.death);
    }
  if (!(lo <= hi))
    throw InvalidInput("cannot fit a domain map: every diagram is empty");
  DomainMap map;
  map.margin = margin;
  map.shift = lo;
  const double span = hi - lo;
  const double tiny = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  map.scale = span <= tiny ? 1.0 : span / (1.0 - 2.0 * margin);
  return map;
}

SpectralBasis make_basis(int M) {
  if (M < 0) throw InvalidInput("basis order must be non-negative");
  SpectralBasis b;
  b.M = M;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int m = 0; m <= M; ++m)
    for (int n = m; n <= M; ++n) b.index.emplace_back(m, n);
  std::sort(b.index.begin(), b.index.end(),
            [](const std::pair<int, int>& a, const std::pair<int, int>& b2) {
              const long la = static_cast<long>(a.first) * a.first +
                              static_cast<long>(a.second) * a.second;
              const long lb = static_cast<long>(b2.first) * b2.first +
                              static_cast<long>(b2.second) * b2.second;
              if (la != lb) return la < lb;
              return a < b2;
            });
  const int kappa = static_cast<int>(b.index.size());
  b.lambda.resize(kappa);
  b.norm.resize(kappa);
  for (int k = 0; k < kappa; ++k) {
    const auto [m, n] = b.index[k];
    b.lambda[k] = pi2 * (m * m + n * n);
    // 1/sqrt(int_T u^2) for u = cos(m pi x)cos(n pi y) + (m <-> n):
    // the square integral factorizes over [0,1]^2 and halves on T.
    if (m == 0 && n == 0) b.norm[k] = 1.0 / std::numbers::sqrt2;
    else if (m == n || m == 0) b.norm[k] = std::numbers::sqrt2;
    else b.norm[k] = 2.0;
  }
  return b;
}

Eigen::MatrixXd SpectralBasis::evaluate(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const {
  const Eigen::Index P = pts.rows();
  const int kappa = this->kappa();
  // cosine tables cos(m pi x), cos(m pi y) for m = 0..M
  Eigen::RowVectorXd freq =
      Eigen::RowVectorXd::LinSpaced(M + 1, 0.0, static_cast<double>(M)) *
      std::numbers::pi;
  Eigen::MatrixXd cx = (pts.col(0) * freq).array().cos();
  Eigen::MatrixXd cy = (pts.col(1) * freq).array().cos();
  Eigen::MatrixXd out(P, kappa);
  for (int k = 0; k < kappa; ++k) {
    const auto [m, n] = index[k];
    out.col(k) = norm[k] * (cx.col(m).array() * cy.col(n).array() +
                            cx.col(n).array() * cy.col(m).array());
  }
  return out;
}

HKEmbedding embed(const PersistenceDiagram& diagram,
                  const SpectralBasis& basis, const DomainMap& map) {
  const int P = static_cast<int>(diagram.pairs.size());
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(P, 2);
  for (int i = 0; i < P; ++i) {
    const double x = map.apply(diagram.pairs[i].birth);
    const double y = map.apply(diagram.pairs[i].death);
    if (!(x >= 0.0 && y <= 1.0 && y >= x))
      throw DomainViolation(
          "standardized diagram point left the reference triangle; "
          "the domain map does not cover this diagram");
    pts(i, 0) = x;
    pts(i, 1) = y;
  }
  HKEmbedding e;
  e.M = basis.M;
  e.map = map;
  e.P = P;
  e.lambda = basis.lambda;
  if (P == 0)
    e.coeffs = Eigen::VectorXd::Zero(basis.kappa());
  else
    e.coeffs = basis.evaluate(pts).colwise().sum().transpose();
  return e;
}

Eigen::VectorXd hk_weights(const Eigen::VectorXd& lambda, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidInput("bandwidth sigma must be >= 0");
  return (-sigma * lambda.array()).exp();
}

double l2_distance(const HKEmbedding& a, const HKEmbedding& b, double sigma) {
  if (!a.compatible_with(b))
    throw IncompatibleEmbedding(
        "embeddings come from different bases or domain maps");
  const Eigen::VectorXd w = hk_weights(a.lambda, sigma);
  return (w.array() * (a.coeffs - b.coeffs).array().square()).sum();
}

double hk_norm(const HKEmbedding& e, double sigma) {
  const Eigen::VectorXd w = hk_weights(e.lambda, sigma);
  return (w.array() * e.coeffs.array().square()).sum();
}

SmoothedField evaluate_field(const HKEmbedding& e, const SpectralBasis& basis,
                             double sigma, int resolution) {
  if (resolution < 2) throw InvalidInput("raster resolution must be >= 2");
  if (basis.M != e.M)
    throw IncompatibleEmbedding("embedding was made under a different basis");
  const int R = resolution;
  const Eigen::VectorXd wf =
      hk_weights(e.lambda, sigma).cwiseProduct(e.coeffs);
  SmoothedField field;
  field.resolution = R;
  field.sigma = sigma;
  field.values.setConstant(R, R, std::numeric_limits<double>::quiet_NaN());
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(R, 0.0, 1.0);
  // row i of the raster holds y = grid[i]; only x <= y is in T
  for (int i = 0; i < R; ++i) {
    const int nx = i + 1;  // grid points with x <= y on this row
    Eigen::Matrix<double, Eigen::Dynamic, 2> pts(nx, 2);
    pts.col(0) = grid.head(nx);
    pts.col(1).setConstant(grid[i]);
    field.values.row(i).head(nx) = (basis.evaluate(pts) * wf).transpose();
  }
  return field;
}

}  // namespace topostat
