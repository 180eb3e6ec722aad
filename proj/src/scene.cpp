#include "ambient/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace ambient {

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Corridor: return "corridor";
    case SceneKind::Room: return "room";
    case SceneKind::WallPair: return "wall-pair";
    case SceneKind::Clutter: return "clutter";
  }
  return "unknown";
}

std::optional<SceneKind> parse_scene_kind(const std::string& name) {
  if (name == "corridor") return SceneKind::Corridor;
  if (name == "room") return SceneKind::Room;
  if (name == "wall-pair") return SceneKind::WallPair;
  if (name == "clutter") return SceneKind::Clutter;
  return std::nullopt;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LabeledBox make_box(Eigen::Vector3d center, Eigen::Vector3d dims, double yaw, std::string tag) {
  LabeledBox b;
  b.center = center;
  b.dimensions = dims;
  b.yaw = yaw;
  b.tag = std::move(tag);
  return b;
}

/// Entry distance of a ray from the origin along unit `dir`, or +inf.
double ray_box(const LabeledBox& box, const Eigen::Vector3d& dir) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Eigen::Vector3d o = -box.center;
  const Eigen::Vector3d origin(c * o.x() + s * o.y(), -s * o.x() + c * o.y(), o.z());
  const Eigen::Vector3d d(c * dir.x() + s * dir.y(), -s * dir.x() + c * dir.y(), dir.z());
  double t_near = -kInf;
  double t_far = kInf;
  for (int i = 0; i < 3; ++i) {
    const double half = 0.5 * box.dimensions(i);
    if (std::abs(d(i)) < 1e-15) {
      if (std::abs(origin(i)) > half) return kInf;
      continue;
    }
    double t1 = (-half - origin(i)) / d(i);
    double t2 = (half - origin(i)) / d(i);
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
    if (t_near > t_far) return kInf;
  }
  return t_near > 0.0 ? t_near : kInf;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidScene, std::string(name) + " must be positive");
  }
}

class BoxPlacer {
 public:
  BoxPlacer(const SyntheticSceneSpec& spec, std::mt19937_64& rng) : spec_(spec), rng_(rng) {}

  /// Samples up to `count` non-overlapping boxes from `propose_center`,
  /// which receives the box's footprint radius and must keep clear of walls.
  template <class Propose>
  void place(int count, std::vector<LabeledBox>& objects, Propose&& propose_center) {
    std::uniform_real_distribution<double> size(spec_.box_min_size, spec_.box_max_size);
    std::uniform_real_distribution<double> yaw(0.0, std::numbers::pi);
    int placed = 0;
    for (int attempt = 0; placed < count && attempt < 1000 * std::max(count, 1); ++attempt) {
      const Eigen::Vector3d dims(size(rng_), size(rng_), size(rng_));
      const double radius = 0.5 * std::hypot(dims.x(), dims.y());
      const Eigen::Vector2d xy = propose_center(radius);
      if (xy.norm() < radius + 1.5) continue;
      bool overlaps = false;
      for (const auto& o : objects) {
        if (o.tag != "box") continue;
        const double r_other = 0.5 * std::hypot(o.dimensions.x(), o.dimensions.y());
        if ((o.center.head<2>() - xy).norm() < radius + r_other + 0.3) {
          overlaps = true;
          break;
        }
      }
      if (overlaps) continue;
      const double z = -spec_.sensor_height + 0.5 * dims.z();
      objects.push_back(make_box({xy.x(), xy.y(), z}, dims, yaw(rng_), "box"));
      ++placed;
    }
  }

 private:
  const SyntheticSceneSpec& spec_;
  std::mt19937_64& rng_;
};

}  // namespace

SyntheticScene generate_scene(const SyntheticSceneSpec& spec) {
  check_positive(spec.wall_height, "wall_height");
  check_positive(spec.wall_thickness, "wall_thickness");
  if (spec.ground) check_positive(spec.sensor_height, "sensor_height");
  if (!(spec.noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidScene, "noise_sigma must be >= 0");
  if (spec.num_boxes < 0) throw Error(ErrorCode::InvalidScene, "num_boxes must be >= 0");
  if (spec.num_boxes > 0) {
    check_positive(spec.box_min_size, "box_min_size");
    if (spec.box_max_size < spec.box_min_size) {
      throw Error(ErrorCode::InvalidScene, "box_max_size must be >= box_min_size");
    }
  }

  std::mt19937_64 rng(spec.seed);
  SyntheticScene scene;
  auto& objects = scene.objects;
  const double h = spec.sensor_height;
  const double wall_z = -h + 0.5 * spec.wall_height;
  const double t = spec.wall_thickness;

  switch (spec.kind) {
    case SceneKind::Corridor: {
      check_positive(spec.corridor_length, "corridor_length");
      check_positive(spec.corridor_width, "corridor_width");
      const double y = 0.5 * spec.corridor_width + 0.5 * t;
      const Eigen::Vector3d dims(spec.corridor_length, t, spec.wall_height);
      objects.push_back(make_box({0.0, y, wall_z}, dims, 0.0, "wall"));
      objects.push_back(make_box({0.0, -y, wall_z}, dims, 0.0, "wall"));
      break;
    }
    case SceneKind::Room: {
      check_positive(spec.room_length, "room_length");
      check_positive(spec.room_width, "room_width");
      const double hx = 0.5 * spec.room_length;
      const double hy = 0.5 * spec.room_width;
      objects.push_back(make_box({hx + 0.5 * t, 0.0, wall_z},
                                 {t, spec.room_width + 2 * t, spec.wall_height}, 0.0, "wall"));
      objects.push_back(make_box({-hx - 0.5 * t, 0.0, wall_z},
                                 {t, spec.room_width + 2 * t, spec.wall_height}, 0.0, "wall"));
      objects.push_back(
          make_box({0.0, hy + 0.5 * t, wall_z}, {spec.room_length, t, spec.wall_height}, 0.0, "wall"));
      objects.push_back(make_box({0.0, -hy - 0.5 * t, wall_z},
                                 {spec.room_length, t, spec.wall_height}, 0.0, "wall"));
      BoxPlacer placer(spec, rng);
      placer.place(spec.num_boxes, objects, [&](double radius) {
        const double mx = std::max(0.0, hx - radius - 1.0);
        const double my = std::max(0.0, hy - radius - 1.0);
        std::uniform_real_distribution<double> ux(-mx, mx);
        std::uniform_real_distribution<double> uy(-my, my);
        const double x = ux(rng);
        return Eigen::Vector2d(x, uy(rng));
      });
      break;
    }
    case SceneKind::WallPair: {
      check_positive(spec.near_wall_distance, "near_wall_distance");
      if (!(spec.far_wall_distance > spec.near_wall_distance + t)) {
        throw Error(ErrorCode::InvalidScene, "far wall must lie behind the near wall");
      }
      const double near_x = spec.near_wall_distance + 0.5 * t;
      const double far_x = spec.far_wall_distance + 0.5 * t;
      // The near wall tops out half a meter below the sensor so the far wall
      // stays visible around and above it as one connected surface.
      if (!(h > 0.5)) throw Error(ErrorCode::InvalidScene, "wall-pair needs sensor_height > 0.5");
      const double near_width = 0.8 * spec.near_wall_distance;
      const double near_height = h - 0.5;
      objects.push_back(make_box({near_x, 0.0, -h + 0.5 * near_height},
                                 {t, near_width, near_height}, 0.0, "wall"));
      objects.push_back(make_box({far_x, 0.0, wall_z + 0.5 * spec.wall_height},
                                 {t, 2.0 * spec.far_wall_distance, 2.0 * spec.wall_height}, 0.0,
                                 "wall"));
      break;
    }
    case SceneKind::Clutter: {
      check_positive(spec.clutter_radius, "clutter_radius");
      BoxPlacer placer(spec, rng);
      placer.place(spec.num_boxes, objects, [&](double radius) {
        std::uniform_real_distribution<double> ur(3.0 + radius,
                                                  std::max(3.0 + radius, spec.clutter_radius));
        std::uniform_real_distribution<double> ua(0.0, 2.0 * std::numbers::pi);
        const double r = ur(rng);
        const double a = ua(rng);
        return Eigen::Vector2d(r * std::cos(a), r * std::sin(a));
      });
      break;
    }
  }
  for (const auto& b : spec.extra_boxes) {
    for (int i = 0; i < 3; ++i) check_positive(b.dimensions(i), "box dimension");
    objects.push_back(b);
  }
  for (const auto& o : objects) {
    if (o.contains(Eigen::Vector3d::Zero())) {
      throw Error(ErrorCode::InvalidScene, "sensor origin lies inside a " + o.tag);
    }
  }
  if (spec.ground) scene.ground_plane = Eigen::Vector4d(0.0, 0.0, 1.0, h);

  const SensorModel& sensor = spec.sensor;
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  const std::size_t pixels =
      static_cast<std::size_t>(sensor.num_rings()) * static_cast<std::size_t>(sensor.num_cols());
  scene.cloud.reserve(pixels);
  scene.object_ids.reserve(pixels);
  for (int r = 0; r < sensor.num_rings(); ++r) {
    for (int c = 0; c < sensor.num_cols(); ++c) {
      const Eigen::Vector3d dir = sensor.beam_direction(r, c);
      double best = kInf;
      int hit = -1;
      if (spec.ground && dir.z() < 0.0) {
        best = -h / dir.z();
        hit = 0;
      }
      for (std::size_t i = 0; i < objects.size(); ++i) {
        const double d = ray_box(objects[i], dir);
        if (d < best) {
          best = d;
          hit = static_cast<int>(i) + 1;
        }
      }
      if (hit < 0 || best > sensor.max_range() || best < sensor.min_range()) continue;
      double range = best;
      if (spec.noise_sigma > 0.0) range += noise(rng);
      if (range < sensor.min_range() || range > sensor.max_range()) continue;
      const Eigen::Vector3d p = dir * range;
      scene.cloud.push_back(Point{p.x(), p.y(), p.z(), hit == 0 ? 0.1 : 0.5});
      scene.object_ids.push_back(hit);
    }
  }
  return scene;
}

}  // namespace ambient
