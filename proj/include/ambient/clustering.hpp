#ifndef AMBIENT_CLUSTERING_HPP
#define AMBIENT_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ambient/core.hpp"
#include "ambient/ground_filter.hpp"

namespace ambient {

enum class ClusterMethod { Depth, AdaptiveEuclidean, FixedEuclidean, External };

std::string to_string(ClusterMethod method);

/// Which clusterer produced a labeling and with what thresholds. Fields that
/// do not apply to the method are left at zero.
struct ClusterMethodInfo {
  ClusterMethod method = ClusterMethod::External;
  double beta0_deg = 0.0;
  double gamma = 0.0;
  double eps = 0.0;
  int window = 0;
};

/// Per-pixel cluster ids. Id 0 means unlabeled (no return, ground, or removed);
/// real ids start at 1 and are assigned in row-major discovery order.
class ClusterLabeling {
 public:
  using Label = std::int32_t;

  ClusterLabeling() = default;
  ClusterLabeling(int rows, int cols, ClusterMethodInfo method = {});

  /// Wraps an existing label grid; cluster sizes are recounted.
  static ClusterLabeling from_labels(int rows, int cols, std::vector<Label> labels,
                                     ClusterMethodInfo method = {});

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const ClusterMethodInfo& method() const noexcept { return method_; }

  Label label(std::size_t index) const noexcept { return labels_[index]; }
  Label label(PixelCoord p) const noexcept {
    return labels_[static_cast<std::size_t>(p.row * cols_ + p.col)];
  }
  std::span<const Label> labels() const noexcept { return labels_; }

  /// Largest id ever assigned (ids of removed clusters stay reserved).
  Label max_label() const noexcept { return static_cast<Label>(sizes_.size()) - 1; }
  /// Pixel count of cluster `id`; 0 for removed or unknown ids.
  std::size_t cluster_size(Label id) const noexcept;
  /// Clusters with at least one pixel.
  std::size_t num_clusters() const noexcept;
  std::size_t labeled_count() const noexcept;

 private:
  friend class LabelingBuilder;
  friend ClusterLabeling filter_small_clusters(const ClusterLabeling&, std::size_t);

  int rows_ = 0;
  int cols_ = 0;
  ClusterMethodInfo method_;
  std::vector<Label> labels_;
  std::vector<std::size_t> sizes_{0};
};

struct DepthClusterParams {
  /// Merge threshold: neighbours join when beta exceeds it. Degrees in (0, 90).
  double beta0_deg = 10.0;
};

struct EuclideanClusterParams {
  /// Slack factor on the expected inter-beam spacing, >= 1.
  double gamma = 1.2;
  /// Search half-width in pixels (2 gives a 5x5 window).
  int window = 2;
};

/// Fixed-radius range-image Euclidean clustering, the usual baseline.
struct FixedEuclideanParams {
  double eps = 0.75;
  int window = 2;
};

/// Angle in degrees at the farther return between its beam and the segment
/// joining the two returns. The longer depth is always taken as the far side,
/// so the result is symmetric in the depth arguments. Returns a value in
/// (0, 180): a non-positive denominator yields beta >= 90.
///
/// Throws InvalidDepth for non-positive depths, InvalidInput for alpha <= 0.
double beta(double depth_a, double depth_b, double alpha_deg);

/// Distance threshold gamma * sin(alpha) * depth_b for two returns whose
/// nearer depth is `depth_b`.
double adaptive_threshold(double depth_b, double alpha_deg, double gamma);

/// Whether two returns pass beta > beta0, decided without evaluating atan.
/// `sin_alpha` and `one_minus_cos_alpha` come from the beam separation.
bool depth_edge_accepted(double depth_a, double depth_b, double sin_alpha,
                         double one_minus_cos_alpha, double tan_beta0) noexcept;

/// Connected components over 4-adjacent pixels (azimuth wraps) joined when
/// beta > beta0. Ground pixels and empty pixels are never labeled.
ClusterLabeling depth_cluster(const RangeImage& img, const GroundMask& ground,
                              const DepthClusterParams& params);

/// Connected components over the (2w+1)^2 window joined when the 3D distance
/// is below adaptive_threshold(min depth, beam separation, gamma).
ClusterLabeling euclidean_cluster(const RangeImage& img, const GroundMask& ground,
                                  const EuclideanClusterParams& params);

ClusterLabeling fixed_euclidean_cluster(const RangeImage& img, const GroundMask& ground,
                                        const FixedEuclideanParams& params);

/// Clears clusters smaller than `min_size`; surviving ids are unchanged.
ClusterLabeling filter_small_clusters(const ClusterLabeling& labeling, std::size_t min_size);

}  // namespace ambient

#endif  // AMBIENT_CLUSTERING_HPP
