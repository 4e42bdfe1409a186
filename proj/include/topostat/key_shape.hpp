#pragma once

#include <Eigen/Dense>

#include "topostat/rng.hpp"

namespace topostat {

/**
 * Synthetic "key" test shape used by the simulation studies: an
 * annular head whose keyhole is the one dominant topological feature,
 * a shaft with two teeth, all inside the unit box. Variants add a
 * small extra hole near the keyhole (topological noise), keep only a
 * quarter of the keyhole, or punch a second persistent hole through a
 * padded shaft tip (used by the clustering study). All geometry
 * constants are frozen here and echoed in study reports.
 */
namespace key_geometry {
inline constexpr double head_cx = 0.30, head_cy = 0.50;
inline constexpr double head_outer_r = 0.22;
inline constexpr double keyhole_r = 0.10;
inline constexpr double shaft_x0 = 0.45, shaft_x1 = 0.90;
inline constexpr double shaft_y0 = 0.44, shaft_y1 = 0.56;
inline constexpr double tooth1_x0 = 0.76, tooth1_x1 = 0.80;
inline constexpr double tooth2_x0 = 0.84, tooth2_x1 = 0.88;
inline constexpr double tooth_y0 = 0.38, tooth_y1 = 0.44;
// small disturbance holes (radius a quarter of the keyhole radius) at
// four fixed spots inside the annulus, offsets from the head center
inline constexpr double noise_r = 0.025;
inline constexpr double noise_ring_r = 0.155;
inline constexpr int n_noise_locations = 4;
// second persistent hole through a circular pad at the shaft tip
inline constexpr double pad_cx = 0.78, pad_cy = 0.50;
inline constexpr double pad_outer_r = 0.09;
inline constexpr double extra_hole_r = 0.05;
// sampling box
inline constexpr double box_x0 = 0.0, box_x1 = 1.0;
inline constexpr double box_y0 = 0.0, box_y1 = 1.0;

static_assert(noise_r <= keyhole_r / 4.0,
              "disturbance holes must stay negligible next to the keyhole");

// center of disturbance hole `loc` in {0,1,2,3} (45/135/225/315 deg)
void noise_center(int loc, double& x, double& y);
}  // namespace key_geometry

enum class KeyVariant {
  box_only,        // uniform points in the box, no shape
  key,             // the plain key shape
  key_noise,       // key with one small disturbance hole
  key_quarter,     // keyhole filled except one quarter
  key_extra_hole,  // key with a second persistent hole at the shaft tip
};

struct KeyShapeSpec {
  KeyVariant variant = KeyVariant::key;
  int n_points = 100;
  double percent = 100.0;  // share of points drawn from the shape
  int noise_location = 0;  // 0..3, or -1 for a random location
  int quarter = 0;         // kept quarter: 0 TL, 1 TR, 2 BL, 3 BR; -1 random
};

// True when p is part of the shape material for this variant.
// noise_location and quarter must be concrete (>= 0) here.
bool in_key_material(const KeyShapeSpec& spec, double x, double y);

// Samples exactly round(n percent/100) points uniformly from the
// shape material and the remainder uniformly from the rest of the box,
// so the in/out split is exact rather than binomial.
// A negative noise_location or quarter picks one per call via `rng`.
Eigen::Matrix<double, Eigen::Dynamic, 2> sample_key_shape(
    const KeyShapeSpec& spec, Rng& rng);

}  // namespace topostat
