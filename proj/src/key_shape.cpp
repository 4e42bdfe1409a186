#include "topostat/key_shape.hpp"

#include <cmath>
#include <numbers>

#include "topostat/errors.hpp"

namespace topostat {

namespace key_geometry {

void noise_center(int loc, double& x, double& y) {
  // 45, 135, 225, 315 degrees on the mid-annulus ring
  static const double diag = noise_ring_r / std::numbers::sqrt2;
  static const double ox[4] = {diag, -diag, -diag, diag};
  static const double oy[4] = {diag, diag, -diag, -diag};
  x = head_cx + ox[loc];
  y = head_cy + oy[loc];
}

}  // namespace key_geometry

bool in_key_material(const KeyShapeSpec& spec, double x, double y) {
  namespace g = key_geometry;
  if (spec.variant == KeyVariant::box_only) return false;

  const double hx = x - g::head_cx, hy = y - g::head_cy;
  const double hr2 = hx * hx + hy * hy;
  bool head;
  if (spec.variant == KeyVariant::key_quarter) {
    // keyhole filled except the kept quarter
    const bool in_disk = hr2 <= g::head_outer_r * g::head_outer_r;
    const bool in_keyhole = hr2 < g::keyhole_r * g::keyhole_r;
    const bool left = hx <= 0.0, top = hy >= 0.0;
    const bool in_kept =
        (spec.quarter == 0 && left && top) ||
        (spec.quarter == 1 && !left && top) ||
        (spec.quarter == 2 && left && !top) ||
        (spec.quarter == 3 && !left && !top);
    head = in_disk && !(in_keyhole && in_kept);
  } else {
    head = hr2 <= g::head_outer_r * g::head_outer_r &&
           hr2 >= g::keyhole_r * g::keyhole_r;
  }

  const bool shaft = x >= g::shaft_x0 && x <= g::shaft_x1 &&
                     y >= g::shaft_y0 && y <= g::shaft_y1;
  const bool teeth = y >= g::tooth_y0 && y <= g::tooth_y1 &&
                     ((x >= g::tooth1_x0 && x <= g::tooth1_x1) ||
                      (x >= g::tooth2_x0 && x <= g::tooth2_x1));
  bool material = head || shaft || teeth;

  if (spec.variant == KeyVariant::key_extra_hole) {
    const double px = x - g::pad_cx, py = y - g::pad_cy;
    const double pr2 = px * px + py * py;
    material = material || pr2 <= g::pad_outer_r * g::pad_outer_r;
    if (pr2 < g::extra_hole_r * g::extra_hole_r) material = false;
  }
  if (spec.variant == KeyVariant::key_noise) {
    double nx, ny;
    key_geometry::noise_center(spec.noise_location, nx, ny);
    const double dx = x - nx, dy = y - ny;
    if (dx * dx + dy * dy < g::noise_r * g::noise_r) material = false;
  }
  return material;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> sample_key_shape(
    const KeyShapeSpec& spec, Rng& rng) {
  namespace g = key_geometry;
  if (spec.n_points < 1) throw InvalidInput("need at least one point");
  if (!(spec.percent >= 0.0 && spec.percent <= 100.0))
    throw InvalidInput("percent must lie in [0, 100]");
  if (spec.noise_location < -1 ||
      spec.noise_location >= g::n_noise_locations)
    throw InvalidInput("unknown disturbance-hole location");
  if (spec.quarter < -1 || spec.quarter > 3)
    throw InvalidInput("unknown keyhole quarter");

  KeyShapeSpec concrete = spec;
  if (concrete.noise_location < 0)
    concrete.noise_location =
        static_cast<int>(rng.uniform_index(g::n_noise_locations));
  if (concrete.quarter < 0)
    concrete.quarter = static_cast<int>(rng.uniform_index(4));

  const int n = spec.n_points;
  int n_shape = static_cast<int>(std::lround(spec.percent / 100.0 * n));
  if (spec.variant == KeyVariant::box_only) n_shape = 0;

  // the in/out split is exact, not binomial: the remainder is drawn
  // from the box with the shape material excluded
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(n, 2);
  const double wx = g::box_x1 - g::box_x0, wy = g::box_y1 - g::box_y0;
  for (int i = 0; i < n; ++i) {
    const bool inside = i < n_shape;
    double x, y;
    do {
      x = g::box_x0 + wx * rng.uniform();
      y = g::box_y0 + wy * rng.uniform();
    } while (in_key_material(concrete, x, y) != inside);
    pts(i, 0) = x;
    pts(i, 1) = y;
  }
  return pts;
}

}  // namespace topostat
