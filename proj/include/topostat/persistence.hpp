#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace topostat {

/**
 * Simplicial filtrations (dimension <= 2) and persistent homology in
 * degrees 0 and 1 via boundary-matrix column reduction.
 *
 * Conventions:
 *  - vertices of a point cloud enter at scale 0, an edge at the
 *    Euclidean distance of its endpoints, a triangle at the largest
 *    scale of its edges;
 *  - for a weighted graph an edge enters at its weight, vertices at 0;
 *  - simplices are ordered by (scale, dimension, lexicographic vertex
 *    ids), which fixes ties deterministically;
 *  - classes alive at the end of the filtration are closed at
 *    `cap`, the largest scale present, and the single essential
 *    connected component is dropped;
 *  - zero-persistence pairs are dropped.
 */

struct Simplex {
  double eps;                  // entry scale
  std::uint8_t dim;            // 0, 1 or 2
  std::array<int, 3> v;        // vertex ids, ascending; unused slots -1
};

struct Filtration {
  std::vector<Simplex> simplices;  // sorted by (eps, dim, vertices)
  int n_vertices = 0;
  int max_dim = 0;                 // largest dimension the builder produced
  double cap = 0.0;                // largest entry scale
};

struct PersistencePair {
  double birth;
  double death;
};

struct PersistenceDiagram {
  int dim = 0;
  double cap = 0.0;
  std::vector<PersistencePair> pairs;  // sorted by (birth, death)
};

// Vietoris-Rips filtration of a planar point cloud (rows = points).
// Edges with length > max_eps are excluded; max_eps <= 0 selects the
// diameter of the axis-aligned bounding box. max_dim in {1, 2}.
Filtration build_rips(const Eigen::Matrix<double, Eigen::Dynamic, 2>& cloud,
                      double max_eps = 0.0, int max_dim = 2);

// Filtration of a complete weighted graph given a symmetric
// connectivity matrix with zero diagonal: edge (i,j) enters at w(i,j),
// triangles at the largest incident weight (clique rule).
Filtration build_graph_filtration(const Eigen::MatrixXd& weights);

// Persistence diagram in homology degree `dim` (0 or 1) over Z/2.
// Degree 1 requires the filtration to carry 2-simplices.
PersistenceDiagram compute_diagram(const Filtration& f, int dim);

}  // namespace topostat
