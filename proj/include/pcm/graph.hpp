#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "pcm/errors.hpp"
#include "pcm/matrix.hpp"

namespace pcm {

/// Undirected comparison edge between alternatives u < v, carrying the
/// matrix ratio m(u,v).
struct Edge {
  int u = 0;
  int v = 0;
  double value = 1.0;

  friend bool operator==(const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }
};

using SpanningTree = std::vector<Edge>;

/// Simple graph on the alternatives with one edge per known comparison.
/// Edges are kept in lexicographic (u, v) order, which fixes the
/// enumeration order of spanning trees.
class ComparisonGraph {
public:
  ComparisonGraph(int vertex_count, std::vector<Edge> edges)
      : n_(vertex_count), edges_(std::move(edges)) {}

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

private:
  int n_;
  std::vector<Edge> edges_;
};

inline ComparisonGraph induce_graph(const PCMatrix& m) {
  std::vector<Edge> edges;
  const int n = m.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m.known(i, j)) edges.push_back({i, j, m.value(i, j)});
  return ComparisonGraph(n, std::move(edges));
}

inline bool is_connected(const ComparisonGraph& g) {
  const int n = g.vertex_count();
  if (n <= 1) return true;
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges()) parent[find(e.u)] = find(e.v);
  int root = find(0);
  for (int i = 1; i < n; ++i)
    if (find(i) != root) return false;
  return true;
}

/// Kirchhoff (Laplacian) matrix: degree on the diagonal, -1 per edge.
inline std::vector<std::vector<std::int64_t>> laplacian(const ComparisonGraph& g) {
  const int n = g.vertex_count();
  std::vector<std::vector<std::int64_t>> L(n, std::vector<std::int64_t>(n, 0));
  for (const Edge& e : g.edges()) {
    L[e.u][e.u] += 1;
    L[e.v][e.v] += 1;
    L[e.u][e.v] -= 1;
    L[e.v][e.u] -= 1;
  }
  return L;
}

/// Number of spanning trees via the matrix-tree theorem: any cofactor of
/// the Laplacian. The determinant is computed with Bareiss fraction-free
/// elimination in 128-bit integers, so the count is exact.
inline std::uint64_t count_spanning_trees(const ComparisonGraph& g) {
  const int n = g.vertex_count();
  if (n == 0) return 0;
  if (n == 1) return 1;
  auto L = laplacian(g);
  const int m = n - 1;  // principal minor: drop last row and column
  std::vector<std::vector<__int128>> a(m, std::vector<__int128>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = L[i][j];

  const auto overflow = [] {
    return Error("spanning tree count is too large to represent exactly");
  };
  __int128 prev = 1;
  int sign = 1;
  for (int k = 0; k < m; ++k) {
    int pivot = k;
    while (pivot < m && a[pivot][k] == 0) ++pivot;
    if (pivot == m) return 0;  // singular minor: graph is disconnected
    if (pivot != k) {
      std::swap(a[pivot], a[k]);
      sign = -sign;
    }
    for (int i = k + 1; i < m; ++i) {
      for (int j = k + 1; j < m; ++j) {
        __int128 t1, t2, diff;
        if (__builtin_mul_overflow(a[i][j], a[k][k], &t1)) throw overflow();
        if (__builtin_mul_overflow(a[i][k], a[k][j], &t2)) throw overflow();
        if (__builtin_sub_overflow(t1, t2, &diff)) throw overflow();
        a[i][j] = diff / prev;  // Bareiss: the division is exact
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  __int128 det = a[m - 1][m - 1] * sign;
  if (det < 0) throw Error("internal error: negative spanning tree count");
  if (det > static_cast<__int128>(UINT64_MAX)) throw overflow();
  return static_cast<std::uint64_t>(det);
}

inline constexpr std::uint64_t kDefaultTreeCap = 10'000'000;

/// Enumeration cap: PCM_TREE_CAP environment variable when set to a
/// positive integer, otherwise 10^7.
inline std::uint64_t tree_cap_from_env() {
  if (const char* s = std::getenv("PCM_TREE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) return v;
  }
  return kDefaultTreeCap;
}

namespace detail {

template <typename Visitor>
class TreeEnumerator {
public:
  TreeEnumerator(const ComparisonGraph& g, Visitor& visit)
      : n_(g.vertex_count()), edges_(g.edges()), visit_(visit) {
    tree_.reserve(n_ > 0 ? n_ - 1 : 0);
    parent_.resize(n_);
  }

  void run() {
    if (n_ == 1) {
      visit_(tree_);  // single vertex: one (empty) spanning tree
      return;
    }
    for (int i = 0; i < n_; ++i) parent_[i] = i;
    recurse(0, parent_, n_);
  }

private:
  int find(std::vector<int>& p, int x) const {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }

  // Components counts vertices not yet joined; prune any branch from
  // which the remaining edges cannot reconnect everything.
  bool can_complete(int pos, const std::vector<int>& parent, int components) {
    if (components == 1) return true;
    std::vector<int> p = parent;
    for (std::size_t e = pos; e < edges_.size(); ++e) {
      int ru = find(p, edges_[e].u);
      int rv = find(p, edges_[e].v);
      if (ru != rv) {
        p[ru] = rv;
        if (--components == 1) return true;
      }
    }
    return false;
  }

  void recurse(std::size_t pos, std::vector<int> parent, int components) {
    if (components == 1) {
      visit_(tree_);
      return;
    }
    if (pos == edges_.size()) return;
    int ru = find(parent, edges_[pos].u);
    int rv = find(parent, edges_[pos].v);
    if (ru != rv) {
      // Branch 1: take the edge.
      std::vector<int> joined = parent;
      joined[ru] = rv;
      tree_.push_back(edges_[pos]);
      recurse(pos + 1, std::move(joined), components - 1);
      tree_.pop_back();
    }
    // Branch 2: skip it (forced when it would close a cycle).
    if (can_complete(pos + 1, parent, components)) recurse(pos + 1, std::move(parent), components);
  }

  int n_;
  const std::vector<Edge>& edges_;
  Visitor& visit_;
  SpanningTree tree_;
  std::vector<int> parent_;
};

}  // namespace detail

/// Calls the visitor once per spanning tree, in a deterministic order
/// (edges considered in lexicographic order, take-the-edge branch first).
/// The SpanningTree reference passed to the visitor is reused between
/// calls. Throws TreeCountExceedsCapError before visiting anything when
/// the exact count exceeds the cap, and DisconnectedGraphError when the
/// graph has no spanning tree at all.
template <typename Visitor>
void for_each_spanning_tree(const ComparisonGraph& g, Visitor&& visit, std::uint64_t cap) {
  if (g.vertex_count() == 0 || !is_connected(g))
    throw DisconnectedGraphError("comparison graph is not connected: no spanning trees exist");
  std::uint64_t count = count_spanning_trees(g);
  if (count > cap) throw TreeCountExceedsCapError(count, cap);
  detail::TreeEnumerator<Visitor> enumerator(g, visit);
  enumerator.run();
}

template <typename Visitor>
void for_each_spanning_tree(const ComparisonGraph& g, Visitor&& visit) {
  for_each_spanning_tree(g, std::forward<Visitor>(visit), tree_cap_from_env());
}

inline std::vector<SpanningTree> enumerate_spanning_trees(const ComparisonGraph& g) {
  std::vector<SpanningTree> trees;
  for_each_spanning_tree(g, [&](const SpanningTree& t) { trees.push_back(t); });
  return trees;
}

inline std::vector<SpanningTree> enumerate_spanning_trees(const ComparisonGraph& g, std::uint64_t cap) {
  std::vector<SpanningTree> trees;
  for_each_spanning_tree(
      g, [&](const SpanningTree& t) { trees.push_back(t); }, cap);
  return trees;
}

}  // namespace pcm
