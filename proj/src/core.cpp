#include "ambient/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ambient {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyProjection: return "EmptyProjection";
    case ErrorCode::InvalidSensor: return "InvalidSensor";
    case ErrorCode::ZeroSeparation: return "ZeroSeparation";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::InsufficientFeatures: return "InsufficientFeatures";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Column difference reduced to (-cols/2, cols/2].
int circular_delta(int delta, int cols) noexcept {
  int d = delta % cols;
  if (d < 0) d += cols;
  if (d > cols / 2) d -= cols;
  return d;
}

int wrap_col(int col, int cols) noexcept {
  int c = col % cols;
  return c < 0 ? c + cols : c;
}

}  // namespace

double Point::range() const { return std::sqrt(x * x + y * y + z * z); }

// ---------------------------------------------------------------------------
// SensorModel

SensorModel::SensorModel(int num_cols, std::vector<double> vertical_angles_deg, double max_range,
                         double min_range)
    : num_cols_(num_cols),
      elevations_deg_(std::move(vertical_angles_deg)),
      max_range_(max_range),
      min_range_(min_range) {
  if (elevations_deg_.size() < 2) {
    throw Error(ErrorCode::InvalidSensor, "need at least 2 rings");
  }
  if (num_cols_ < 4) {
    throw Error(ErrorCode::InvalidSensor, "need at least 4 columns");
  }
  if (!(max_range_ > 0.0) || !std::isfinite(max_range_)) {
    throw Error(ErrorCode::InvalidSensor, "max_range must be positive");
  }
  if (!(min_range_ >= 0.0) || min_range_ >= max_range_) {
    throw Error(ErrorCode::InvalidSensor, "min_range must lie in [0, max_range)");
  }
  for (double a : elevations_deg_) {
    if (!std::isfinite(a) || a <= -90.0 || a >= 90.0) {
      throw Error(ErrorCode::InvalidSensor, "vertical angle out of (-90, 90)");
    }
  }
  if (elevations_deg_.front() < elevations_deg_.back()) {
    std::reverse(elevations_deg_.begin(), elevations_deg_.end());
  }
  for (std::size_t i = 1; i < elevations_deg_.size(); ++i) {
    if (!(elevations_deg_[i] < elevations_deg_[i - 1])) {
      throw Error(ErrorCode::InvalidSensor, "vertical angles must be strictly monotonic");
    }
  }
}

SensorModel SensorModel::uniform(int num_rings, int num_cols, double min_elevation_deg,
                                 double max_elevation_deg, double max_range, double min_range) {
  if (num_rings < 2) throw Error(ErrorCode::InvalidSensor, "need at least 2 rings");
  std::vector<double> angles(static_cast<std::size_t>(num_rings));
  const double step = (max_elevation_deg - min_elevation_deg) / (num_rings - 1);
  for (int i = 0; i < num_rings; ++i) {
    angles[static_cast<std::size_t>(i)] = max_elevation_deg - step * i;
  }
  return SensorModel(num_cols, std::move(angles), max_range, min_range);
}

SensorModel SensorModel::hdl64() { return uniform(64, 1800, -24.9, 2.0, 120.0); }
SensorModel SensorModel::hdl32() { return uniform(32, 1800, -30.67, 10.67, 100.0); }
SensorModel SensorModel::vlp16() { return uniform(16, 1800, -15.0, 15.0, 100.0); }

int SensorModel::row_for_elevation(double elevation_deg) const noexcept {
  const auto& e = elevations_deg_;
  const std::size_t n = e.size();
  const double top = e[0] + 0.5 * (e[0] - e[1]);
  const double bottom = e[n - 1] - 0.5 * (e[n - 2] - e[n - 1]);
  if (!(elevation_deg <= top && elevation_deg >= bottom)) return -1;
  // First ring whose elevation is <= the query (descending order).
  auto it = std::lower_bound(e.begin(), e.end(), elevation_deg, std::greater<double>());
  if (it == e.begin()) return 0;
  if (it == e.end()) return static_cast<int>(n - 1);
  const auto hi = static_cast<std::size_t>(it - e.begin());
  // Ties go to the upper ring.
  return (e[hi - 1] - elevation_deg) <= (elevation_deg - e[hi]) ? static_cast<int>(hi - 1)
                                                                 : static_cast<int>(hi);
}

int SensorModel::col_for_azimuth(double azimuth_deg) const noexcept {
  double az = std::fmod(azimuth_deg, 360.0);
  if (az < 0.0) az += 360.0;
  const int col = static_cast<int>(std::floor(az / horizontal_resolution()));
  return wrap_col(col, num_cols_);
}

Eigen::Vector3d SensorModel::beam_direction(int row, int col) const {
  const double e = elevation(row) * kDegToRad;
  const double a = column_azimuth(col) * kDegToRad;
  return {std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
}

double beam_separation_deg(double elevation_a_deg, double elevation_b_deg,
                           double azimuth_delta_deg) noexcept {
  // Haversine form: symmetric in its arguments and well conditioned for small
  // separations.
  const double ea = elevation_a_deg * kDegToRad;
  const double eb = elevation_b_deg * kDegToRad;
  const double s_elev = std::sin(0.5 * (ea - eb));
  const double s_az = std::sin(0.5 * azimuth_delta_deg * kDegToRad);
  double h = s_elev * s_elev + (std::cos(ea) * std::cos(eb)) * (s_az * s_az);
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h)) * kRadToDeg;
}

// ---------------------------------------------------------------------------
// RangeImage

RangeImage::RangeImage(SensorModel sensor)
    : sensor_(std::move(sensor)),
      rows_(sensor_.num_rings()),
      cols_(sensor_.num_cols()),
      depth_(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0),
      point_index_(depth_.size(), kNoPoint),
      points_(depth_.size()) {}

RangeImage RangeImage::from_depths(const SensorModel& sensor, std::span<const double> depths) {
  RangeImage img(sensor);
  if (depths.size() != img.size()) {
    throw Error(ErrorCode::ShapeMismatch, "depth grid size " + std::to_string(depths.size()) +
                                              " != " + std::to_string(img.size()));
  }
  for (int r = 0; r < img.rows_; ++r) {
    for (int c = 0; c < img.cols_; ++c) {
      const std::size_t i = img.index(r, c);
      const double d = depths[i];
      if (d == 0.0) continue;
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw Error(ErrorCode::InvalidDepth, "pixel depth must be positive and finite");
      }
      const Eigen::Vector3d p = sensor.beam_direction(r, c) * d;
      img.depth_[i] = d;
      img.point_index_[i] = static_cast<std::int32_t>(i);
      img.points_[i] = Point{p.x(), p.y(), p.z(), 0.0};
    }
  }
  return img;
}

std::size_t RangeImage::valid_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(depth_.begin(), depth_.end(), [](double d) { return d > 0.0; }));
}

namespace {

// Bulk pixel lookup for project(). Ring membership is decided by comparing z
// against horizontal * tan(boundary elevation); columns by a cheap azimuth
// estimate corrected with exact sector tests against the column edges.
class PixelLocator {
 public:
  explicit PixelLocator(const SensorModel& sensor) : cols_(sensor.num_cols()) {
    const auto e = sensor.ring_elevations();
    const std::size_t n = e.size();
    tan_top_ = std::tan((e[0] + 0.5 * (e[0] - e[1])) * kDegToRad);
    tan_bottom_ = std::tan((e[n - 1] - 0.5 * (e[n - 2] - e[n - 1])) * kDegToRad);
    tan_mid_.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      tan_mid_[k] = std::tan(0.5 * (e[k] + e[k + 1]) * kDegToRad);
    }
    edge_x_.resize(static_cast<std::size_t>(cols_) + 1);
    edge_y_.resize(edge_x_.size());
    for (int c = 0; c <= cols_; ++c) {
      const double a = (c == cols_ ? 0.0 : c * sensor.horizontal_resolution()) * kDegToRad;
      edge_x_[static_cast<std::size_t>(c)] = std::cos(a);
      edge_y_[static_cast<std::size_t>(c)] = std::sin(a);
    }
    cols_per_rad_ = cols_ / (2.0 * std::numbers::pi);
  }

  /// -1 when outside the vertical field of view. `horizontal` must be > 0.
  int row(double z, double horizontal) const noexcept {
    if (!(z <= horizontal * tan_top_ && z >= horizontal * tan_bottom_)) return -1;
    // Rows whose lower boundary lies above the point.
    const auto it = std::partition_point(tan_mid_.begin(), tan_mid_.end(),
                                         [&](double t) { return z < horizontal * t; });
    return static_cast<int>(it - tan_mid_.begin());
  }

  int col(double x, double y) const noexcept {
    int c = static_cast<int>(approx_azimuth(x, y) * cols_per_rad_);
    if (c < 0) c += cols_;
    if (c >= cols_) c -= cols_;
    for (int guard = 0; guard < 4; ++guard) {
      if (below_edge(c, x, y)) {
        c = c == 0 ? cols_ - 1 : c - 1;
      } else if (!below_edge(c + 1, x, y)) {
        c = c + 1 == cols_ ? 0 : c + 1;
      } else {
        return c;
      }
    }
    double a = std::atan2(y, x);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    const int fallback = static_cast<int>(a * cols_per_rad_);
    return fallback >= cols_ ? fallback - cols_ : fallback;
  }

 private:
  // True when (x, y) lies clockwise of column edge `c`.
  bool below_edge(int c, double x, double y) const noexcept {
    const auto i = static_cast<std::size_t>(c);
    return edge_x_[i] * y - edge_y_[i] * x < 0.0;
  }

  // atan2 in [0, 2pi) to within ~1e-5 rad.
  static double approx_azimuth(double x, double y) noexcept {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    const bool swap = ay > ax;
    const double t = swap ? ax / ay : ay / ax;
    const double t2 = t * t;
    double a = t * (0.99997726 +
                    t2 * (-0.33262347 +
                          t2 * (0.19354346 + t2 * (-0.11643287 + t2 * (0.05265332 - t2 * 0.01172120)))));
    if (swap) a = 0.5 * std::numbers::pi - a;
    if (x < 0.0) a = std::numbers::pi - a;
    if (y < 0.0) a = 2.0 * std::numbers::pi - a;
    return a;
  }

  int cols_;
  double tan_top_ = 0.0;
  double tan_bottom_ = 0.0;
  std::vector<double> tan_mid_;
  std::vector<double> edge_x_;
  std::vector<double> edge_y_;
  double cols_per_rad_ = 0.0;
};

}  // namespace

RangeImage project(const PointCloud& cloud, const SensorModel& sensor) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyInput, "cannot project an empty cloud");

  RangeImage img(sensor);
  const PixelLocator locate(sensor);
  const double min2 = sensor.min_range() * sensor.min_range();
  const double max2 = sensor.max_range() * sensor.max_range();
  std::size_t landed = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud[i];
    const double h2 = p.x * p.x + p.y * p.y;
    const double r2 = h2 + p.z * p.z;
    if (!(r2 >= min2 && r2 <= max2) || !(r2 > 0.0) || !(h2 > 0.0)) continue;
    const double horizontal = std::sqrt(h2);
    const int row = locate.row(p.z, horizontal);
    if (row < 0) continue;
    const double range = std::sqrt(r2);
    const std::size_t idx = img.index(row, locate.col(p.x, p.y));
    if (img.depth_[idx] == 0.0) {
      ++landed;
    } else if (img.depth_[idx] <= range) {
      continue;
    }
    img.depth_[idx] = range;
    img.point_index_[idx] = static_cast<std::int32_t>(i);
    img.points_[idx] = p;
  }
  if (landed == 0) {
    throw Error(ErrorCode::EmptyProjection, "no point fell inside the sensor field of view");
  }
  return img;
}

PointCloud unproject(const RangeImage& img) {
  PointCloud out;
  out.reserve(img.valid_count());
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      const double d = img.depth(r, c);
      if (d <= 0.0) continue;
      const Eigen::Vector3d p = img.sensor().beam_direction(r, c) * d;
      out.push_back(Point{p.x(), p.y(), p.z(), img.point({r, c}).intensity});
    }
  }
  return out;
}

std::vector<int> window_column_offsets(int cols, int window) {
  std::vector<int> offsets;
  std::vector<bool> seen(static_cast<std::size_t>(cols), false);
  for (int dc = -window; dc <= window; ++dc) {
    const auto slot = static_cast<std::size_t>(wrap_col(dc, cols));
    if (seen[slot]) continue;
    seen[slot] = true;
    offsets.push_back(dc);
  }
  return offsets;
}

std::vector<PixelCoord> neighbors(const RangeImage& img, PixelCoord p, int window) {
  if (!img.in_bounds(p)) throw Error(ErrorCode::InvalidInput, "pixel out of bounds");
  if (window < 1) throw Error(ErrorCode::InvalidInput, "window must be >= 1");
  std::vector<PixelCoord> out;
  const auto offsets = window_column_offsets(img.cols(), window);
  for (int r = std::max(0, p.row - window); r <= std::min(img.rows() - 1, p.row + window); ++r) {
    for (int dc : offsets) {
      const PixelCoord q{r, wrap_col(p.col + dc, img.cols())};
      if (q == p || !img.valid(q)) continue;
      out.push_back(q);
    }
  }
  return out;
}

double beam_angle(const RangeImage& img, PixelCoord a, PixelCoord b) {
  if (!img.in_bounds(a) || !img.in_bounds(b)) {
    throw Error(ErrorCode::InvalidInput, "pixel out of bounds");
  }
  if (a == b) throw Error(ErrorCode::ZeroSeparation, "identical pixels");
  const SensorModel& s = img.sensor();
  const int dc = circular_delta(b.col - a.col, img.cols());
  return beam_separation_deg(s.elevation(a.row), s.elevation(b.row),
                             dc * s.horizontal_resolution());
}

BeamAngleTable::BeamAngleTable(const SensorModel& sensor, int window) : window_(window) {
  if (window < 1) throw Error(ErrorCode::InvalidInput, "window must be >= 1");
  const int span = 2 * window + 1;
  const int rows = sensor.num_rings();
  entries_.resize(static_cast<std::size_t>(rows * span * span),
                  Entry{0.0, 0.0, 0.0});
  for (int r = 0; r < rows; ++r) {
    for (int dr = -window; dr <= window; ++dr) {
      if (r + dr < 0 || r + dr >= rows) continue;
      for (int dc = -window; dc <= window; ++dc) {
        const int d = circular_delta(dc, sensor.num_cols());
        const double deg = beam_separation_deg(sensor.elevation(r), sensor.elevation(r + dr),
                                               d * sensor.horizontal_resolution());
        const double half = 0.5 * deg * kDegToRad;
        const double s_half = std::sin(half);
        entries_[static_cast<std::size_t>((r * span + (dr + window)) * span + (dc + window))] =
            Entry{deg, std::sin(deg * kDegToRad), 2.0 * s_half * s_half};
      }
    }
  }
}

}  // namespace ambient
