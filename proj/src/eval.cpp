#include "ambient/eval.hpp"

#include <cmath>
#include <unordered_map>

namespace ambient {

bool LabeledBox::contains(const Eigen::Vector3d& p, double tolerance) const {
  const Eigen::Vector3d d = p - center;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  // Rotate into the box frame.
  const double lx = c * d.x() + s * d.y();
  const double ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= 0.5 * dimensions.x() + tolerance &&
         std::abs(ly) <= 0.5 * dimensions.y() + tolerance &&
         std::abs(d.z()) <= 0.5 * dimensions.z() + tolerance;
}

IoUSummary cluster_box_iou(const RangeImage& img, const ClusterLabeling& labeling,
                           std::span<const LabeledBox> boxes) {
  if (labeling.rows() != img.rows() || labeling.cols() != img.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "labeling does not match the range image");
  }
  const auto depths = img.depths();
  const auto points = img.points();
  const auto labels = labeling.labels();

  IoUSummary out;
  std::size_t above_half = 0;
  double iou_sum = 0.0;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const LabeledBox& box = boxes[b];
    if (!(box.dimensions.array() > 0.0).all()) {
      throw Error(ErrorCode::InvalidInput, "box " + std::to_string(b) + " has a non-positive size");
    }
    std::size_t box_points = 0;
    std::unordered_map<ClusterLabeling::Label, std::size_t> overlap;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(depths[i] > 0.0) || !box.contains(points[i].xyz())) continue;
      ++box_points;
      if (labels[i] > 0) ++overlap[labels[i]];
    }
    if (box_points == 0) {
      ++out.skipped_boxes;
      continue;
    }
    BoxIoU entry{b, box_points, 0, 0.0};
    for (const auto& [id, inter] : overlap) {
      const std::size_t uni = box_points + labeling.cluster_size(id) - inter;
      const double iou = static_cast<double>(inter) / static_cast<double>(uni);
      if (iou > entry.iou || (iou == entry.iou && id < entry.best_cluster)) {
        entry.iou = iou;
        entry.best_cluster = id;
      }
    }
    iou_sum += entry.iou;
    if (entry.iou >= 0.5) ++above_half;
    out.per_box.push_back(entry);
  }
  if (!out.per_box.empty()) {
    const auto n = static_cast<double>(out.per_box.size());
    out.mean_iou = iou_sum / n;
    out.fraction_above_half = static_cast<double>(above_half) / n;
  }
  return out;
}

namespace {

void check_rigid(const Pose& pose, std::size_t index, const char* which) {
  const Eigen::Matrix3d r = pose.linear();
  const double err = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-6) || !(std::abs(r.determinant() - 1.0) <= 1e-6)) {
    throw Error(ErrorCode::InvalidInput, std::string(which) + " pose " + std::to_string(index) +
                                             " is not a rigid transform");
  }
}

}  // namespace

std::vector<RelativePoseError> rpe(std::span<const Pose> est, std::span<const Pose> gt,
                                   std::size_t delta) {
  if (est.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, "estimate has " + std::to_string(est.size()) +
                                               " poses, ground truth " +
                                               std::to_string(gt.size()));
  }
  if (delta < 1 || est.size() < delta + 1) {
    throw Error(ErrorCode::InvalidInput, "need at least delta + 1 poses and delta >= 1");
  }
  for (std::size_t i = 0; i < est.size(); ++i) {
    check_rigid(est[i], i, "estimated");
    check_rigid(gt[i], i, "ground-truth");
  }
  std::vector<RelativePoseError> out;
  out.reserve(est.size() - delta);
  for (std::size_t i = 0; i + delta < est.size(); ++i) {
    const Pose gt_step = gt[i].inverse(Eigen::Isometry) * gt[i + delta];
    const Pose est_step = est[i].inverse(Eigen::Isometry) * est[i + delta];
    RelativePoseError e;
    e.error = gt_step.inverse(Eigen::Isometry) * est_step;
    e.translation = e.error.translation().norm();
    e.rotation = Eigen::AngleAxisd(e.error.linear()).angle();
    out.push_back(e);
  }
  return out;
}

double rmse(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorCode::EmptyInput, "rmse of an empty list");
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

}  // namespace ambient
