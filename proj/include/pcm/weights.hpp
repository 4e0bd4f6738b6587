#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcm/errors.hpp"
#include "pcm/graph.hpp"
#include "pcm/matrix.hpp"

namespace pcm {

struct EigenResult {
  std::vector<double> weights;  // normalized to unit sum
  double lambda_max = 0.0;
  int iterations = 0;
};

/// Principal eigenvector by power iteration: uniform start, max-component
/// normalization, stop when successive lambda estimates differ by < 1e-12.
/// Positive matrices converge by Perron-Frobenius.
inline EigenResult evm_weights(const PCMatrix& m) {
  if (!m.complete()) throw IncompleteMatrixError();
  const int n = m.size();
  std::vector<double> v(n, 1.0), y(n);
  double lambda = 0.0, lambda_prev = 0.0;
  constexpr int kMaxIterations = 10000;
  int it = 0;
  for (it = 1; it <= kMaxIterations; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += m.value(i, j) * v[j];
      y[i] = s;
    }
    lambda = y[0];
    for (int i = 1; i < n; ++i) lambda = std::max(lambda, y[i]);
    for (int i = 0; i < n; ++i) v[i] = y[i] / lambda;
    if (std::abs(lambda - lambda_prev) < 1e-12) break;
    lambda_prev = lambda;
  }
  if (it > kMaxIterations)
    throw NonConvergenceError("power iteration did not converge within " +
                              std::to_string(kMaxIterations) + " iterations");
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return {std::move(v), lambda, it};
}

/// Geometric mean method: w_i proportional to the geometric mean of row i.
inline std::vector<double> gmm_weights(const PCMatrix& m) {
  if (!m.complete()) throw IncompleteMatrixError();
  const int n = m.size();
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::log(m.value(i, j));
    w[i] = std::exp(acc / n);
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return w;
}

namespace detail {

// Reusable buffers for tree-weight propagation; keeps the per-tree hot
// path allocation-free after the first call.
struct TreeWeightScratch {
  std::vector<int> head, next, to;
  std::vector<double> factor;
  std::vector<double> w;
  std::vector<int> stack;
};

// Propagates ratios along tree edges from vertex 0 (w_0 = 1), then
// normalizes to unit sum. Assumes `tree` is a spanning tree of known
// comparisons; returns false if some vertex is unreachable.
inline bool tree_weights_into(const PCMatrix& m, const SpanningTree& tree, TreeWeightScratch& s,
                              std::vector<double>& out) {
  const int n = m.size();
  s.head.assign(n, -1);
  const std::size_t arcs = tree.size() * 2;
  s.next.resize(arcs);
  s.to.resize(arcs);
  s.factor.resize(arcs);
  int a = 0;
  for (const Edge& e : tree) {
    double v = m.value(e.u, e.v);
    // m(u,v) = w_u / w_v: crossing u -> v divides, v -> u multiplies.
    s.to[a] = e.v;
    s.factor[a] = 1.0 / v;
    s.next[a] = s.head[e.u];
    s.head[e.u] = a++;
    s.to[a] = e.u;
    s.factor[a] = v;
    s.next[a] = s.head[e.v];
    s.head[e.v] = a++;
  }
  out.assign(n, -1.0);  // weights are positive; -1 marks "not reached yet"
  out[0] = 1.0;
  s.stack.clear();
  s.stack.push_back(0);
  int visited = 1;
  while (!s.stack.empty()) {
    int u = s.stack.back();
    s.stack.pop_back();
    for (int arc = s.head[u]; arc != -1; arc = s.next[arc]) {
      int v = s.to[arc];
      if (out[v] < 0.0) {
        out[v] = out[u] * s.factor[arc];
        ++visited;
        s.stack.push_back(v);
      }
    }
  }
  if (visited != n) return false;
  double sum = 0.0;
  for (double x : out) sum += x;
  for (double& x : out) x /= sum;
  return true;
}

}  // namespace detail

/// Priority vector induced by a single spanning tree: set w = 1 at vertex
/// 0 and propagate the matrix ratios along tree edges, then normalize.
/// The root choice cancels after normalization.
inline std::vector<double> tree_weights(const PCMatrix& m, const SpanningTree& tree) {
  const int n = m.size();
  if (tree.size() != static_cast<std::size_t>(n > 0 ? n - 1 : 0))
    throw LengthMismatchError(tree.size(), n > 0 ? n - 1 : 0);
  for (const Edge& e : tree) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v)
      throw Error("tree edge (" + std::to_string(e.u + 1) + ", " + std::to_string(e.v + 1) +
                  ") is out of range");
    if (!m.known(e.u, e.v))
      throw EdgeNotInMatrixError("comparison (" + std::to_string(e.u + 1) + ", " +
                                 std::to_string(e.v + 1) + ") is missing from the matrix");
  }
  detail::TreeWeightScratch scratch;
  std::vector<double> w;
  if (!detail::tree_weights_into(m, tree, scratch, w))
    throw Error("edges do not form a spanning tree");
  return w;
}

/// EAST vector: componentwise geometric mean of the tree vectors over all
/// spanning trees, normalized to unit sum. Accumulates log-weights so the
/// result is stable even for large tree counts; for complete matrices it
/// coincides with the geometric mean method.
inline std::vector<double> east_weights(const PCMatrix& m, std::uint64_t cap) {
  const int n = m.size();
  std::vector<double> acc(n, 0.0);
  std::uint64_t count = 0;
  detail::TreeWeightScratch scratch;
  std::vector<double> w;
  for_each_spanning_tree(
      induce_graph(m),
      [&](const SpanningTree& tree) {
        detail::tree_weights_into(m, tree, scratch, w);
        for (int i = 0; i < n; ++i) acc[i] += std::log(w[i]);
        ++count;
      },
      cap);
  std::vector<double> east(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    east[i] = std::exp(acc[i] / static_cast<double>(count));
    sum += east[i];
  }
  for (double& x : east) x /= sum;
  return east;
}

inline std::vector<double> east_weights(const PCMatrix& m) {
  return east_weights(m, tree_cap_from_env());
}

}  // namespace pcm
