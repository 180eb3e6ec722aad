#ifndef AMBIENT_EVAL_HPP
#define AMBIENT_EVAL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "ambient/clustering.hpp"
#include "ambient/core.hpp"

namespace ambient {

/// Ground-truth object box in the sensor frame. Yaw rotates about +z.
struct LabeledBox {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d dimensions = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  std::string tag;

  /// Points within `tolerance` of a face count as inside, so returns cast
  /// onto a box surface stay members despite rounding.
  bool contains(const Eigen::Vector3d& p, double tolerance = 1e-9) const;
};

struct BoxIoU {
  std::size_t box_index = 0;
  std::size_t box_points = 0;
  /// Best-matching cluster id, 0 when no cluster overlaps the box.
  ClusterLabeling::Label best_cluster = 0;
  double iou = 0.0;
};

struct IoUSummary {
  /// One entry per box that contains at least one return.
  std::vector<BoxIoU> per_box;
  /// Boxes without any return, left out of the averages.
  std::size_t skipped_boxes = 0;
  double mean_iou = 0.0;
  /// Share of evaluated boxes whose best IoU is >= 0.5.
  double fraction_above_half = 0.0;
};

/// Point-set IoU |A n B| / |A u B| between each box's returns and every
/// cluster, keeping the best cluster per box.
IoUSummary cluster_box_iou(const RangeImage& img, const ClusterLabeling& labeling,
                           std::span<const LabeledBox> boxes);

using Pose = Eigen::Isometry3d;
using Trajectory = std::vector<Pose>;

struct RelativePoseError {
  Pose error = Pose::Identity();
  double translation = 0.0;
  /// Rotation angle of the error transform, radians.
  double rotation = 0.0;
};

/// E_i = (Q_i^-1 Q_{i+delta})^-1 (P_i^-1 P_{i+delta}) for every i with
/// i + delta < n. `est` holds P, `gt` holds Q.
///
/// Throws LengthMismatch for unequal lengths and InvalidInput when there are
/// fewer than delta + 1 poses or a rotation is not orthonormal.
std::vector<RelativePoseError> rpe(std::span<const Pose> est, std::span<const Pose> gt,
                                   std::size_t delta = 1);

/// sqrt(mean(e^2)). Throws EmptyInput for an empty list.
double rmse(std::span<const double> errors);

}  // namespace ambient

#endif  // AMBIENT_EVAL_HPP
