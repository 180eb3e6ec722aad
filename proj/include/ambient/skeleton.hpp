#ifndef AMBIENT_SKELETON_HPP
#define AMBIENT_SKELETON_HPP

#include <cstddef>
#include <vector>

#include "ambient/clustering.hpp"

namespace ambient {

/// Pixels that belong to both a large Euclidean cluster and a large depth
/// cluster: the structural core of the scene.
class SkeletonMask {
 public:
  SkeletonMask() = default;
  SkeletonMask(int rows, int cols, std::vector<unsigned char> flags);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t count() const noexcept { return count_; }

  bool operator()(std::size_t index) const noexcept { return flags_[index] != 0; }
  bool operator()(PixelCoord p) const noexcept {
    return flags_[static_cast<std::size_t>(p.row * cols_ + p.col)] != 0;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<unsigned char> flags_;
  std::size_t count_ = 0;
};

struct SkeletonParams {
  /// Minimum Euclidean cluster size (large objects only).
  std::size_t n_e = 100;
  /// Minimum depth cluster size (drops fragments, keeps surfaces).
  std::size_t n_d = 30;
};

/// Drops Euclidean clusters below `n_e` and depth clusters below `n_d`, then
/// keeps pixels labeled by both. Throws ShapeMismatch for unaligned inputs.
SkeletonMask extract_skeleton(const ClusterLabeling& euclid, const ClusterLabeling& depth,
                              std::size_t n_e, std::size_t n_d);

inline SkeletonMask extract_skeleton(const ClusterLabeling& euclid, const ClusterLabeling& depth,
                                     const SkeletonParams& params) {
  return extract_skeleton(euclid, depth, params.n_e, params.n_d);
}

}  // namespace ambient

#endif  // AMBIENT_SKELETON_HPP
