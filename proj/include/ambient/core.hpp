#ifndef AMBIENT_CORE_HPP
#define AMBIENT_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ambient/error.hpp"

namespace ambient {

/// One LiDAR return in the sensor frame (x forward, y left, z up), meters.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Eigen::Vector3d xyz() const { return {x, y, z}; }
  double range() const;
};

/// One revolution of returns.
using PointCloud = std::vector<Point>;

struct PixelCoord {
  int row = 0;
  int col = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Spinning-LiDAR beam geometry.
///
/// Rings are stored top-down: row 0 is the highest elevation. Column c covers
/// azimuths [c * res, (c + 1) * res) measured counter-clockwise from +x, so a
/// beam's nominal direction is the column center.
class SensorModel {
 public:
  /// `vertical_angles_deg` may be given in either increasing or decreasing
  /// order but must be strictly monotonic.
  SensorModel(int num_cols, std::vector<double> vertical_angles_deg, double max_range,
              double min_range = 0.5);

  /// Evenly spaced rings between `min_elevation_deg` and `max_elevation_deg`.
  static SensorModel uniform(int num_rings, int num_cols, double min_elevation_deg,
                             double max_elevation_deg, double max_range, double min_range = 0.5);

  /// Velodyne HDL-64E as used for KITTI: 64 rings over [-24.9, 2.0] deg, 1800 columns.
  static SensorModel hdl64();
  /// Velodyne HDL-32E: 32 rings over [-30.67, 10.67] deg, 1800 columns.
  static SensorModel hdl32();
  /// Velodyne VLP-16: 16 rings over [-15, 15] deg, 1800 columns.
  static SensorModel vlp16();

  int num_rings() const noexcept { return static_cast<int>(elevations_deg_.size()); }
  int num_cols() const noexcept { return num_cols_; }
  double horizontal_resolution() const noexcept { return 360.0 / num_cols_; }
  double max_range() const noexcept { return max_range_; }
  double min_range() const noexcept { return min_range_; }

  /// Ring elevations in row order (descending).
  std::span<const double> ring_elevations() const noexcept { return elevations_deg_; }
  double elevation(int row) const { return elevations_deg_[static_cast<std::size_t>(row)]; }
  double column_azimuth(int col) const noexcept { return (col + 0.5) * horizontal_resolution(); }

  /// Nearest ring for an elevation, or -1 when outside the vertical field of
  /// view (first/last ring extended by half the adjacent spacing).
  int row_for_elevation(double elevation_deg) const noexcept;
  /// Column for an azimuth in degrees; any real azimuth is wrapped into [0, 360).
  int col_for_azimuth(double azimuth_deg) const noexcept;

  /// Unit vector of the beam through the center of pixel (row, col).
  Eigen::Vector3d beam_direction(int row, int col) const;

 private:
  int num_cols_;
  std::vector<double> elevations_deg_;
  double max_range_;
  double min_range_;
};

/// Angle in degrees between two beams given their elevations and the signed
/// azimuth difference. Uses the haversine form, which stays accurate for the
/// sub-degree separations of neighbouring pixels.
double beam_separation_deg(double elevation_a_deg, double elevation_b_deg,
                           double azimuth_delta_deg) noexcept;

/// Dense rows x cols grid of ranges with back-pointers into the source cloud.
/// A depth of 0 marks "no return". Immutable once built.
class RangeImage {
 public:
  static constexpr std::int32_t kNoPoint = -1;

  /// Empty image (every pixel unoccupied).
  explicit RangeImage(SensorModel sensor);

  /// Builds an image by placing a return at `depths[r * cols + c]` meters
  /// along each pixel's center beam. Zero entries stay empty. Point indices
  /// equal pixel indices. Used for synthetic fixtures and unprojection tests.
  static RangeImage from_depths(const SensorModel& sensor, std::span<const double> depths);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return depth_.size(); }
  const SensorModel& sensor() const noexcept { return sensor_; }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }
  std::size_t index(PixelCoord p) const noexcept { return index(p.row, p.col); }
  bool in_bounds(PixelCoord p) const noexcept {
    return p.row >= 0 && p.row < rows_ && p.col >= 0 && p.col < cols_;
  }

  double depth(int row, int col) const noexcept { return depth_[index(row, col)]; }
  double depth(PixelCoord p) const noexcept { return depth_[index(p)]; }
  bool valid(int row, int col) const noexcept { return depth(row, col) > 0.0; }
  bool valid(PixelCoord p) const noexcept { return depth(p) > 0.0; }
  std::int32_t point_index(PixelCoord p) const noexcept { return point_index_[index(p)]; }
  const Point& point(PixelCoord p) const noexcept { return points_[index(p)]; }

  std::span<const double> depths() const noexcept { return depth_; }
  std::span<const std::int32_t> point_indices() const noexcept { return point_index_; }
  std::span<const Point> points() const noexcept { return points_; }

  std::size_t valid_count() const noexcept;

 private:
  friend RangeImage project(const PointCloud& cloud, const SensorModel& sensor);

  SensorModel sensor_;
  int rows_;
  int cols_;
  std::vector<double> depth_;
  std::vector<std::int32_t> point_index_;
  std::vector<Point> points_;
};

/// Spherical projection of a cloud. Points outside the vertical field of view
/// or the [min_range, max_range] band are dropped; when two points share a
/// pixel the nearer one is kept.
///
/// Throws EmptyInput for an empty cloud and EmptyProjection when nothing lands.
RangeImage project(const PointCloud& cloud, const SensorModel& sensor);

/// Reconstructs one point per valid pixel along the pixel-center beam.
PointCloud unproject(const RangeImage& img);

/// Valid pixels within `window` rows and (circularly) `window` columns of `p`,
/// excluding `p`. Rows do not wrap.
std::vector<PixelCoord> neighbors(const RangeImage& img, PixelCoord p, int window);

/// Angular separation of the beams through `a` and `b` in degrees.
/// Throws ZeroSeparation when a == b.
double beam_angle(const RangeImage& img, PixelCoord a, PixelCoord b);

/// Circular column offsets -w..w with duplicates removed when the window
/// spans the whole revolution.
std::vector<int> window_column_offsets(int cols, int window);

/// Beam separations for every (row, row offset, column offset) inside a
/// window. Values are bit-identical to beam_angle() for the same pixel pair.
class BeamAngleTable {
 public:
  BeamAngleTable(const SensorModel& sensor, int window);

  int window() const noexcept { return window_; }

  /// Angle between the beam at (row, c) and (row + dr, c + dc), degrees.
  double angle_deg(int row, int dr, int dc) const noexcept { return entry(row, dr, dc).angle_deg; }
  double sin_angle(int row, int dr, int dc) const noexcept { return entry(row, dr, dc).sin; }
  /// 1 - cos(angle), computed as 2 sin^2(angle / 2).
  double one_minus_cos(int row, int dr, int dc) const noexcept {
    return entry(row, dr, dc).one_minus_cos;
  }

 private:
  struct Entry {
    double angle_deg;
    double sin;
    double one_minus_cos;
  };

  const Entry& entry(int row, int dr, int dc) const noexcept {
    const int span = 2 * window_ + 1;
    return entries_[static_cast<std::size_t>((row * span + (dr + window_)) * span + (dc + window_))];
  }

  int window_;
  std::vector<Entry> entries_;
};

}  // namespace ambient

#endif  // AMBIENT_CORE_HPP
