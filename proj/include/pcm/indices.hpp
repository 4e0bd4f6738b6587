#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "pcm/errors.hpp"
#include "pcm/graph.hpp"
#include "pcm/matrix.hpp"
#include "pcm/weights.hpp"

namespace pcm {

/// Averaged Manhattan distance: sum of componentwise absolute differences
/// divided by the length.
inline double amd(std::span<const double> v, std::span<const double> w) {
  if (v.size() != w.size()) throw LengthMismatchError(v.size(), w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += std::abs(v[i] - w[i]);
  return sum / static_cast<double>(v.size());
}

namespace detail {

// Dense descending ranks into reusable buffers. Ties are decided against
// the current group's leading weight with a relative tolerance.
inline void order_into(std::span<const double> w, double tie_tol, std::vector<int>& idx,
                       std::vector<int>& ranks) {
  const int n = static_cast<int>(w.size());
  idx.resize(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
  ranks.resize(n);
  int rank = 0;
  double leader = 0.0;
  bool first = true;
  for (int i : idx) {
    if (first || std::abs(w[i] - leader) > tie_tol * std::max(std::abs(w[i]), std::abs(leader))) {
      ++rank;
      leader = w[i];
      first = false;
    }
    ranks[i] = rank;
  }
}

}  // namespace detail

/// Ranking positions, 1 = highest weight; weights within the relative tie
/// tolerance of their group's leader share a rank, and ranks are dense
/// (the used values are exactly 1..k).
inline std::vector<int> order_vector(std::span<const double> w, double tie_tol = 1e-9) {
  std::vector<int> idx, ranks;
  detail::order_into(w, tie_tol, idx, ranks);
  return ranks;
}

/// Kendall tau distance between two order vectors: the number of
/// unordered pairs ranked in opposite orders or tied in exactly one of
/// the two rankings.
inline int kendall_tau(std::span<const int> p, std::span<const int> q) {
  if (p.size() != q.size()) throw LengthMismatchError(p.size(), q.size());
  const int n = static_cast<int>(p.size());
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool discordant = (p[i] > p[j] && q[i] < q[j]) || (p[i] < p[j] && q[i] > q[j]) ||
                        (p[i] == p[j] && q[i] != q[j]) || (p[i] != p[j] && q[i] == q[j]);
      if (discordant) ++count;
    }
  return count;
}

enum class GciNormalization {
  Simple,            // 2/(n-2), the form used for reported values
  DegreesOfFreedom,  // 2/((n-1)(n-2)) compatibility switch
};

enum class GwWeightSource { GeometricMean, Eigenvector };

struct IndexOptions {
  GciNormalization gci_normalization = GciNormalization::Simple;
  GwWeightSource gw_weights = GwWeightSource::GeometricMean;
};

struct ClassicalIndices {
  double ci = 0.0;
  double gci = 0.0;
  double hci = 0.0;
  double koczkodaj = 0.0;
  double gw = 0.0;
  double re = 0.0;
  double lambda_max = 0.0;
};

/// The six classical consistency indices of a complete matrix with at
/// least three alternatives.
inline ClassicalIndices classical_indices(const PCMatrix& m, const IndexOptions& options = {}) {
  if (!m.complete()) throw IncompleteMatrixError();
  const int n = m.size();
  if (n < 3) throw TooSmallError("classical indices require at least three alternatives");

  ClassicalIndices out;
  EigenResult eigen = evm_weights(m);
  out.lambda_max = eigen.lambda_max;
  out.ci = (eigen.lambda_max - n) / (n - 1);

  std::vector<double> w = gmm_weights(m);

  // Column sums feed both GW (column-normalized matrix) and HCI.
  std::vector<double> col(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) col[j] += m.value(i, j);

  const std::vector<double>& gw_w =
      options.gw_weights == GwWeightSource::Eigenvector ? eigen.weights : w;
  double gw_sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gw_sum += std::abs(m.value(i, j) / col[j] - gw_w[i]);
  out.gw = gw_sum / n;

  double kmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        double a = m.value(i, k) / (m.value(i, j) * m.value(j, k));
        kmax = std::max(kmax, std::min(std::abs(1.0 - a), std::abs(1.0 - 1.0 / a)));
      }
  out.koczkodaj = kmax;

  // Relative error: row means of logs against the total log mass.
  std::vector<double> r(n, 0.0);
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double lg = std::log(m.value(i, j));
      r[i] += lg;
      den += lg * lg;
    }
    r[i] /= n;
  }
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) num += (r[i] - r[j]) * (r[i] - r[j]);
  out.re = den > 0.0 ? 1.0 - num / den : 0.0;

  double gci_sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double e = std::log(m.value(i, j) * w[j] / w[i]);
      gci_sum += e * e;
    }
  double norm = options.gci_normalization == GciNormalization::DegreesOfFreedom
                    ? 2.0 / (static_cast<double>(n - 1) * (n - 2))
                    : 2.0 / (n - 2);
  out.gci = norm * gci_sum;

  double inv_col_sum = 0.0;
  for (int j = 0; j < n; ++j) inv_col_sum += 1.0 / col[j];
  out.hci = (1.0 / inv_col_sum - 1.0) * (n + 1) / (n - 1);

  return out;
}

namespace detail {

struct TreeSums {
  std::uint64_t count = 0;
  std::vector<double> east;
  double amd_sum = 0.0;
  long long kendall_sum = 0;
};

// Shared two-pass walk over the spanning trees: first pass builds the
// EAST vector, second accumulates per-tree AMD and Kendall terms.
inline TreeSums tree_sums(const PCMatrix& m, std::uint64_t cap) {
  ComparisonGraph g = induce_graph(m);
  TreeSums sums;
  sums.east = east_weights(m, cap);
  sums.count = count_spanning_trees(g);
  std::vector<int> scratch_idx, scratch_ranks, east_order;
  order_into(sums.east, 1e-9, scratch_idx, east_order);
  TreeWeightScratch scratch;
  std::vector<double> w;
  for_each_spanning_tree(
      g,
      [&](const SpanningTree& tree) {
        tree_weights_into(m, tree, scratch, w);
        sums.amd_sum += amd(sums.east, w);
        order_into(w, 1e-9, scratch_idx, scratch_ranks);
        sums.kendall_sum += kendall_tau(east_order, scratch_ranks);
      },
      cap);
  return sums;
}

}  // namespace detail

/// Manhattan inconsistency index: mean AMD between the EAST vector and
/// the individual tree vectors.
inline double mii(const PCMatrix& m, std::uint64_t cap) {
  detail::TreeSums sums = detail::tree_sums(m, cap);
  return sums.amd_sum / static_cast<double>(sums.count);
}

inline double mii(const PCMatrix& m) { return mii(m, tree_cap_from_env()); }

/// Kendall inconsistency index: mean Kendall tau distance between the
/// EAST ranking and the individual tree rankings.
inline double kii(const PCMatrix& m, std::uint64_t cap) {
  detail::TreeSums sums = detail::tree_sums(m, cap);
  return static_cast<double>(sums.kendall_sum) / static_cast<double>(sums.count);
}

inline double kii(const PCMatrix& m) { return kii(m, tree_cap_from_env()); }

struct IndexReport {
  int n = 0;
  bool complete = false;
  std::uint64_t tree_count = 0;
  double mii = 0.0;
  double kii = 0.0;
  bool almost_consistent = false;
  std::optional<ClassicalIndices> classical;  // complete matrices with n >= 3 only
};

/// Full report: MII/KII over the spanning trees plus, when the matrix is
/// complete and has at least three alternatives, the classical indices.
/// A zero KII is decided exactly: every per-tree Kendall distance is an
/// integer, so almost-consistency needs no floating-point tolerance.
inline IndexReport analyze(const PCMatrix& m, const IndexOptions& options, std::uint64_t cap) {
  detail::TreeSums sums = detail::tree_sums(m, cap);
  IndexReport report;
  report.n = m.size();
  report.complete = m.complete();
  report.tree_count = sums.count;
  report.mii = sums.amd_sum / static_cast<double>(sums.count);
  report.kii = static_cast<double>(sums.kendall_sum) / static_cast<double>(sums.count);
  report.almost_consistent = sums.kendall_sum == 0;
  if (report.complete && report.n >= 3) report.classical = classical_indices(m, options);
  return report;
}

inline IndexReport analyze(const PCMatrix& m, const IndexOptions& options = {}) {
  return analyze(m, options, tree_cap_from_env());
}

}  // namespace pcm
