#include "ambient/skeleton.hpp"

#include <algorithm>

namespace ambient {

SkeletonMask::SkeletonMask(int rows, int cols, std::vector<unsigned char> flags)
    : rows_(rows), cols_(cols), flags_(std::move(flags)) {
  if (flags_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::ShapeMismatch, "skeleton flag grid does not match rows x cols");
  }
  count_ = static_cast<std::size_t>(std::count_if(flags_.begin(), flags_.end(),
                                                  [](unsigned char f) { return f != 0; }));
}

SkeletonMask extract_skeleton(const ClusterLabeling& euclid, const ClusterLabeling& depth,
                              std::size_t n_e, std::size_t n_d) {
  if (euclid.rows() != depth.rows() || euclid.cols() != depth.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "euclidean and depth labelings differ in shape");
  }
  const ClusterLabeling large_objects = filter_small_clusters(euclid, n_e);
  const ClusterLabeling surfaces = filter_small_clusters(depth, n_d);
  const auto e = large_objects.labels();
  const auto d = surfaces.labels();
  std::vector<unsigned char> flags(e.size(), 0);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    flags[i] = (e[i] > 0 && d[i] > 0) ? 1 : 0;
  }
  return SkeletonMask(euclid.rows(), euclid.cols(), std::move(flags));
}

}  // namespace ambient
