#ifndef AMBIENT_GROUND_FILTER_HPP
#define AMBIENT_GROUND_FILTER_HPP

#include <cstddef>
#include <vector>

#include "ambient/core.hpp"

namespace ambient {

struct GroundParams {
  /// Steepest slope between consecutive returns on a ray still treated as ground.
  double max_slope_deg = 10.0;
  /// Mount height of the sensor above the ground plane, meters.
  double sensor_height = 1.73;
  /// Ground may rise this far above the nominal plane (z = -sensor_height).
  double height_tolerance = 0.5;
  /// Slopes are measured between returns at least this far apart, meters.
  double slope_baseline = 0.2;

  /// Height threshold in the sensor frame.
  double max_ground_z() const noexcept { return -sensor_height + height_tolerance; }
};

/// Per-pixel ground flags aligned with a RangeImage.
class GroundMask {
 public:
  GroundMask() = default;
  GroundMask(int rows, int cols)
      : rows_(rows), cols_(cols), flags_(static_cast<std::size_t>(rows * cols), 0) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return flags_.empty(); }

  bool operator()(std::size_t index) const noexcept { return flags_[index] != 0; }
  bool operator()(PixelCoord p) const noexcept {
    return flags_[static_cast<std::size_t>(p.row * cols_ + p.col)] != 0;
  }
  void set(std::size_t index, bool ground) noexcept { flags_[index] = ground ? 1 : 0; }

  std::size_t count() const noexcept;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<unsigned char> flags_;
};

/// Slope-based ray classifier. Each column is walked from the lowest ring
/// upward; a return stays ground while it sits below `max_ground_z()` and the
/// slopes back to the ground run and forward to the next return, each taken
/// over at least `slope_baseline`, are under `max_slope_deg`.
/// The first non-ground return ends the ground run for that column.
GroundMask classify_ground(const RangeImage& img, const GroundParams& params = {});

}  // namespace ambient

#endif  // AMBIENT_GROUND_FILTER_HPP
