#include "ambient/ground_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ambient {

std::size_t GroundMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1));
}

GroundMask classify_ground(const RangeImage& img, const GroundParams& params) {
  if (!(params.max_slope_deg > 0.0 && params.max_slope_deg < 90.0)) {
    throw Error(ErrorCode::InvalidInput, "max_slope_deg must lie in (0, 90)");
  }
  if (!(params.slope_baseline >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "slope_baseline must be >= 0");
  }
  GroundMask mask(img.rows(), img.cols());
  const double max_z = params.max_ground_z();
  const double tan_max_slope = std::tan(params.max_slope_deg * std::numbers::pi / 180.0);

  // Slope over the signed horizontal advance; a return that does not move
  // outward is a vertical or overhanging surface.
  struct Profile {
    double h;
    double z;
  };
  const auto gentle = [&](const Profile& lower, const Profile& upper) {
    const double run = upper.h - lower.h;
    return run > 0.0 && std::abs(upper.z - lower.z) < run * tan_max_slope;
  };
  const auto far_enough = [&](const Profile& a, const Profile& b) {
    return std::hypot(b.h - a.h, b.z - a.z) >= params.slope_baseline;
  };
  const Profile foot{0.0, -params.sensor_height};

  std::vector<int> column;
  std::vector<Profile> prof;
  column.reserve(static_cast<std::size_t>(img.rows()));
  prof.reserve(column.capacity());
  for (int c = 0; c < img.cols(); ++c) {
    column.clear();
    prof.clear();
    for (int r = img.rows() - 1; r >= 0; --r) {
      if (!img.valid(r, c)) continue;
      const Point& p = img.point({r, c});
      column.push_back(r);
      prof.push_back({std::sqrt(p.x * p.x + p.y * p.y), p.z});
    }
    for (std::size_t j = 0; j < column.size(); ++j) {
      const Profile& p = prof[j];
      if (!(p.z < max_z)) break;
      // Every earlier return in the column is ground; slopes are taken over
      // at least the baseline so range noise on dense rings does not dominate.
      const Profile* anchor = &foot;
      for (std::size_t k = j; k-- > 0;) {
        if (far_enough(prof[k], p)) {
          anchor = &prof[k];
          break;
        }
      }
      if (!gentle(*anchor, p)) break;
      // The base of a wall sits barely above the last ground return; the
      // steep rise to the returns above it gives it away.
      std::size_t next = j + 1;
      while (next < column.size() && !far_enough(p, prof[next])) ++next;
      if (next < column.size() && !gentle(p, prof[next])) break;
      mask.set(img.index(column[j], c), true);
    }
  }
  return mask;
}

}  // namespace ambient
