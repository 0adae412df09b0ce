#include "scholmig/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace scholmig::disambig {

DistanceMatrix DistanceMatrix::from_full(const std::vector<std::vector<double>>& full) {
  DistanceMatrix m(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full[i].size() != full.size()) throw std::invalid_argument("distance matrix is not square");
    if (full[i][i] != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < full.size(); ++j) {
      if (std::abs(full[i][j] - full[j][i]) > 1e-12) {
        throw std::invalid_argument("distance matrix is not symmetric");
      }
      m.set(i, j, full[i][j]);
    }
  }
  return m;
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double d) {
  if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("distance outside [0, 1]");
  if (i == j) {
    if (d != 0.0) throw std::invalid_argument("diagonal distance must be zero");
    return;
  }
  data_[offset(i, j)] = d;
}

std::vector<MergeStep> average_linkage(const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  std::vector<MergeStep> steps;
  if (n < 2) return steps;
  steps.reserve(n - 1);

  // Working copy updated in place with the Lance-Williams rule; a merged
  // cluster lives on in the slot of its smaller representative.
  std::vector<double> d(n * (n - 1) / 2);
  auto at = [n](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[at(i, j)] = matrix(i, j);
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  std::vector<std::size_t> chain;
  chain.reserve(n);

  for (std::size_t remaining = n; remaining > 1;) {
    if (chain.empty()) {
      chain.push_back(static_cast<std::size_t>(std::find(active.begin(), active.end(), 1) - active.begin()));
    }
    const std::size_t a = chain.back();
    const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : n;
    // Nearest active neighbour; ties prefer the previous chain element, then
    // the smallest index, which keeps the chain from cycling.
    std::size_t b = prev;
    double best = prev < n ? d[at(a, prev)] : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      const double dk = d[at(a, k)];
      if (dk < best || (dk == best && b != prev && k < b)) {
        best = dk;
        b = k;
      }
    }
    if (b != prev) {
      chain.push_back(b);
      continue;
    }
    chain.pop_back();
    chain.pop_back();
    const std::size_t keep = std::min(a, b);
    const std::size_t drop = std::max(a, b);
    const double na = static_cast<double>(size[keep]);
    const double nb = static_cast<double>(size[drop]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == keep || k == drop) continue;
      d[at(keep, k)] = (na * d[at(keep, k)] + nb * d[at(drop, k)]) / (na + nb);
    }
    active[drop] = 0;
    size[keep] += size[drop];
    steps.push_back({keep, drop, best, size[keep]});
    --remaining;
  }
  std::stable_sort(steps.begin(), steps.end(),
                   [](const MergeStep& x, const MergeStep& y) { return x.distance < y.distance; });
  return steps;
}

Clustering cluster_records(const DistanceMatrix& matrix, double cut_threshold, Linkage) {
  if (matrix.empty()) throw std::invalid_argument("cluster_records: empty distance matrix");
  if (!(cut_threshold > 0.0 && cut_threshold < 1.0)) {
    throw std::invalid_argument("cluster_records: cut threshold must lie in (0, 1)");
  }
  const std::size_t n = matrix.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Average linkage is monotone, so every merge at or below the cut joins two
  // subtrees that were themselves formed at or below it.
  for (const auto& step : average_linkage(matrix)) {
    if (step.distance > cut_threshold) break;
    const auto ra = find(step.left);
    const auto rb = find(step.right);
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  Clustering out;
  out.labels.assign(n, 0);
  std::vector<std::size_t> label_of_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (label_of_root[root] == n) label_of_root[root] = out.cluster_count++;
    out.labels[i] = label_of_root[root];
  }
  return out;
}

}  // namespace scholmig::disambig
