#include "topostat/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "topostat/errors.hpp"

namespace topostat {

namespace {

bool simplex_less(const Simplex& a, const Simplex& b) {
  if (a.eps != b.eps) return a.eps < b.eps;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.v < b.v;
}

void finalize(Filtration& f) {
  std::sort(f.simplices.begin(), f.simplices.end(), simplex_less);
  f.cap = f.simplices.empty() ? 0.0 : f.simplices.back().eps;
}

// Symmetric difference of two ascending index lists (Z/2 column add).
void xor_into(std::vector<int>& col, const std::vector<int>& other,
              std::vector<int>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(col.begin(), col.end(), other.begin(),
                                other.end(), std::back_inserter(scratch));
  col.swap(scratch);
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

Filtration build_rips(const Eigen::Matrix<double, Eigen::Dynamic, 2>& cloud,
                      double max_eps, int max_dim) {
  const int n = static_cast<int>(cloud.rows());
  if (n < 1) throw InvalidInput("point cloud is empty");
  if (max_dim < 1 || max_dim > 2)
    throw UnsupportedRequest("rips filtration supports max_dim 1 or 2");

  if (max_eps <= 0.0) {
    const Eigen::Vector2d lo = cloud.colwise().minCoeff();
    const Eigen::Vector2d hi = cloud.colwise().maxCoeff();
    max_eps = (hi - lo).norm();
    if (max_eps == 0.0) max_eps = 1.0;  // all points coincide
  }

  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double dij = (cloud.row(i) - cloud.row(j)).norm();
      d(i, j) = dij;
      d(j, i) = dij;
    }
  }

  Filtration f;
  f.n_vertices = n;
  f.max_dim = max_dim;
  f.simplices.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    f.simplices.push_back({0.0, 0, {i, -1, -1}});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (d(i, j) <= max_eps) f.simplices.push_back({d(i, j), 1, {i, j, -1}});
  if (max_dim >= 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (d(i, j) > max_eps) continue;
        for (int k = j + 1; k < n; ++k) {
          const double m = std::max(d(i, j), std::max(d(i, k), d(j, k)));
          if (m <= max_eps) f.simplices.push_back({m, 2, {i, j, k}});
        }
      }
  }
  finalize(f);
  return f;
}

Filtration build_graph_filtration(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  if (n < 1 || weights.cols() != n)
    throw InvalidInput("connectivity matrix must be square and non-empty");
  for (int i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0)
      throw InvalidInput("connectivity matrix must have zero diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (weights(i, j) != weights(j, i))
        throw InvalidInput("connectivity matrix must be symmetric");
      if (!(weights(i, j) > 0.0))
        throw InvalidInput("edge weights must be positive");
    }
  }

  Filtration f;
  f.n_vertices = n;
  f.max_dim = 2;
  for (int i = 0; i < n; ++i)
    f.simplices.push_back({0.0, 0, {i, -1, -1}});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      f.simplices.push_back({weights(i, j), 1, {i, j, -1}});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double m = std::max(weights(i, j),
                                  std::max(weights(i, k), weights(j, k)));
        f.simplices.push_back({m, 2, {i, j, k}});
      }
  finalize(f);
  return f;
}

PersistenceDiagram compute_diagram(const Filtration& f, int dim) {
  if (dim != 0 && dim != 1)
    throw UnsupportedRequest("only homology degrees 0 and 1 are computed");
  if (dim == 1 && f.max_dim < 2)
    throw UnsupportedRequest(
        "degree-1 homology needs a filtration with 2-simplices");

  const int n = f.n_vertices;

  // Per-dimension views of the global order. Vertices all enter at 0
  // and are tie-broken by id, so vertex rank == vertex id.
  struct Edge {
    double eps;
    int u, w;
  };
  std::vector<Edge> edges;
  std::vector<const Simplex*> tris;
  for (const Simplex& s : f.simplices) {
    if (s.dim == 1) edges.push_back({s.eps, s.v[0], s.v[1]});
    else if (s.dim == 2) tris.push_back(&s);
  }
  const int ne = static_cast<int>(edges.size());
  const int nt = static_cast<int>(tris.size());

  PersistenceDiagram out;
  out.dim = dim;
  out.cap = f.cap;

  // Edges joining two components kill a class born at 0; the others
  // (cycle makers) are the degree-1 creators.
  DisjointSets components(n);
  std::vector<char> forest(static_cast<std::size_t>(ne), 0);
  for (int e = 0; e < ne; ++e)
    if (components.unite(edges[e].u, edges[e].w)) {
      forest[e] = 1;
      if (dim == 0 && edges[e].eps > 0.0)
        out.pairs.push_back({0.0, edges[e].eps});
    }

  if (dim == 1) {
    // edge (u,w) -> rank in edge filtration order
    std::vector<int> edge_rank(static_cast<std::size_t>(n) * n, -1);
    for (int r = 0; r < ne; ++r)
      edge_rank[static_cast<std::size_t>(edges[r].u) * n + edges[r].w] = r;

    // Cofacet lists: for every edge the triangles containing it, in
    // triangle filtration order (CSR layout over edge ranks).
    std::vector<int> start(static_cast<std::size_t>(ne) + 1, 0);
    const auto tri_edges = [&](const Simplex& s, int r[3]) {
      r[0] = edge_rank[static_cast<std::size_t>(s.v[0]) * n + s.v[1]];
      r[1] = edge_rank[static_cast<std::size_t>(s.v[0]) * n + s.v[2]];
      r[2] = edge_rank[static_cast<std::size_t>(s.v[1]) * n + s.v[2]];
    };
    for (int t = 0; t < nt; ++t) {
      int r[3];
      tri_edges(*tris[t], r);
      for (int c = 0; c < 3; ++c) ++start[static_cast<std::size_t>(r[c]) + 1];
    }
    for (int e = 0; e < ne; ++e) start[e + 1] += start[e];
    std::vector<int> cofacets(static_cast<std::size_t>(3) * nt);
    {
      std::vector<int> fill(start.begin(), start.end() - 1);
      for (int t = 0; t < nt; ++t) {
        int r[3];
        tri_edges(*tris[t], r);
        for (int c = 0; c < 3; ++c) cofacets[fill[r[c]]++] = t;
      }
    }

    // Coboundary reduction over the creator edges, scanned from the
    // top of the filtration down; a column's pivot is its earliest
    // triangle. Pairs match the boundary reduction exactly, and the
    // creator columns that vanish are the classes left open at the
    // cap. Forest edges are cleared: their columns always vanish.
    std::vector<int> owner(static_cast<std::size_t>(nt), -1);
    std::vector<std::vector<int>> stored;
    std::vector<int> col, scratch;
    for (int e = ne - 1; e >= 0; --e) {
      if (forest[e]) continue;
      col.assign(cofacets.begin() + start[e], cofacets.begin() + start[e + 1]);
      while (!col.empty()) {
        const int low = col.front();
        if (owner[low] < 0) break;
        xor_into(col, stored[owner[low]], scratch);
      }
      if (col.empty()) {
        if (f.cap > edges[e].eps) out.pairs.push_back({edges[e].eps, f.cap});
      } else {
        const int low = col.front();
        owner[low] = static_cast<int>(stored.size());
        if (tris[low]->eps > edges[e].eps)
          out.pairs.push_back({edges[e].eps, tris[low]->eps});
        stored.push_back(std::move(col));
        col = {};
      }
    }
  }

  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              return a.birth != b.birth ? a.birth < b.birth
                                        : a.death < b.death;
            });
  return out;
}

}  // namespace topostat
