#pragma once

#include <cstddef>
#include <vector>

namespace scholmig::disambig {

/// Symmetric distance matrix with zero diagonal, stored condensed (upper
/// triangle). Entries lie in [0, 1].
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * (n > 0 ? n - 1 : 0) / 2, 0.0) {}

  /// Validates symmetry (to 1e-12), zero diagonal and the [0, 1] range.
  /// Throws std::invalid_argument.
  static DistanceMatrix from_full(const std::vector<std::vector<double>>& full);

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return data_[offset(i, j)];
  }
  /// Throws std::invalid_argument for i == j with a non-zero value or a value
  /// outside [0, 1].
  void set(std::size_t i, std::size_t j, double d);

 private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

enum class Linkage { kAverage };

/// One agglomeration: clusters represented by their smallest member index.
struct MergeStep {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

/// Full average-linkage (UPGMA) dendrogram in n - 1 steps, built with the
/// nearest-neighbour-chain algorithm in O(n^2) time. Steps are returned in
/// non-decreasing distance order.
std::vector<MergeStep> average_linkage(const DistanceMatrix& matrix);

struct Clustering {
  /// Cluster label per item; labels are numbered by first appearance.
  std::vector<std::size_t> labels;
  std::size_t cluster_count = 0;
};

/// Agglomerates while the merge distance does not exceed `cut_threshold`.
/// Throws std::invalid_argument on an empty matrix or a threshold outside
/// (0, 1).
Clustering cluster_records(const DistanceMatrix& matrix, double cut_threshold,
                           Linkage linkage = Linkage::kAverage);

}  // namespace scholmig::disambig
