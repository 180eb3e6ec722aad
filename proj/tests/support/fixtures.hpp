#ifndef AMBIENT_TESTS_FIXTURES_HPP
#define AMBIENT_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ambient/core.hpp"
#include "ambient/scene.hpp"

namespace fixtures {

// 16 x 900 spinning sensor used by the randomized suites.
inline ambient::SensorModel small_sensor() {
  return ambient::SensorModel::uniform(16, 900, -15.0, 15.0, 100.0);
}

// Depth grid of the plane x = distance seen by `sensor`, for columns facing +x
// within `half_fov_deg`; other pixels stay empty.
inline std::vector<double> wall_depths(const ambient::SensorModel& sensor, double distance,
                                       double half_fov_deg = 60.0) {
  std::vector<double> d(static_cast<std::size_t>(sensor.num_rings()) *
                            static_cast<std::size_t>(sensor.num_cols()),
                        0.0);
  for (int r = 0; r < sensor.num_rings(); ++r) {
    for (int c = 0; c < sensor.num_cols(); ++c) {
      double az = sensor.column_azimuth(c);
      if (az > 180.0) az -= 360.0;
      if (std::abs(az) > half_fov_deg) continue;
      const double e = sensor.elevation(r) * M_PI / 180.0;
      const double a = az * M_PI / 180.0;
      d[static_cast<std::size_t>(r * sensor.num_cols() + c)] = distance / (std::cos(e) * std::cos(a));
    }
  }
  return d;
}

inline ambient::RangeImage wall_image(const ambient::SensorModel& sensor, double distance,
                                      double half_fov_deg = 60.0) {
  const auto d = wall_depths(sensor, distance, half_fov_deg);
  return ambient::RangeImage::from_depths(sensor, d);
}

// Random piecewise scene on a depth grid: rectangular patches at random
// depths with small per-pixel jitter, on top of a sparse background, with
// random holes.
inline ambient::RangeImage random_patch_image(const ambient::SensorModel& sensor, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int rows = sensor.num_rings();
  const int cols = sensor.num_cols();
  std::vector<double> d(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
  for (auto& v : d) {
    if (unit(rng) < 0.3) v = 2.0 + 60.0 * unit(rng);
  }
  const int patches = 5 + static_cast<int>(unit(rng) * 20);
  for (int p = 0; p < patches; ++p) {
    const int r0 = static_cast<int>(unit(rng) * rows);
    const int c0 = static_cast<int>(unit(rng) * cols);
    const int h = 1 + static_cast<int>(unit(rng) * rows / 2);
    const int w = 1 + static_cast<int>(unit(rng) * cols / 6);
    const double base = 1.0 + 50.0 * unit(rng);
    const double tilt = (unit(rng) - 0.5) * 0.2;
    for (int r = r0; r < std::min(rows, r0 + h); ++r) {
      for (int k = 0; k < w; ++k) {
        const int c = (c0 + k) % cols;
        d[static_cast<std::size_t>(r * cols + c)] =
            std::max(0.6, base + tilt * k + 0.01 * (unit(rng) - 0.5));
      }
    }
  }
  for (auto& v : d) {
    if (unit(rng) < 0.05) v = 0.0;
  }
  return ambient::RangeImage::from_depths(sensor, d);
}

// One of corridor / room / clutter on the small sensor, with random noise.
inline ambient::SyntheticScene random_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ambient::SyntheticSceneSpec spec;
  spec.sensor = small_sensor();
  spec.seed = seed;
  spec.noise_sigma = 0.03 * unit(rng);
  switch (seed % 3) {
    case 0:
      spec.kind = ambient::SceneKind::Corridor;
      spec.corridor_width = 3.0 + 10.0 * unit(rng);
      break;
    case 1:
      spec.kind = ambient::SceneKind::Room;
      spec.room_length = 15.0 + 30.0 * unit(rng);
      spec.room_width = 15.0 + 30.0 * unit(rng);
      spec.num_boxes = static_cast<int>(unit(rng) * 10);
      break;
    default:
      spec.kind = ambient::SceneKind::Clutter;
      spec.num_boxes = 5 + static_cast<int>(unit(rng) * 25);
      break;
  }
  return ambient::generate_scene(spec);
}

}  // namespace fixtures

#endif  // AMBIENT_TESTS_FIXTURES_HPP
