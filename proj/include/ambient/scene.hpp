#ifndef AMBIENT_SCENE_HPP
#define AMBIENT_SCENE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ambient/core.hpp"
#include "ambient/eval.hpp"

namespace ambient {

enum class SceneKind { Corridor, Room, WallPair, Clutter };

std::string to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(const std::string& name);

/// Analytic scene description for the ray-casting generator. Every solid is
/// an oriented box; walls are boxes `wall_thickness` thick.
struct SyntheticSceneSpec {
  SceneKind kind = SceneKind::Corridor;
  SensorModel sensor = SensorModel::hdl64();
  /// Ground plane at z = -sensor_height.
  double sensor_height = 1.73;
  bool ground = true;

  double wall_height = 4.0;
  double wall_thickness = 0.2;

  // Corridor: two walls parallel to x at y = +-width / 2.
  double corridor_length = 200.0;
  double corridor_width = 6.0;

  // Room: four walls enclosing length (x) by width (y), centered on the sensor.
  double room_length = 30.0;
  double room_width = 30.0;

  // Wall pair: two walls facing the sensor along +x, with nothing between.
  double near_wall_distance = 5.0;
  double far_wall_distance = 20.0;

  // Random boxes (room and clutter).
  int num_boxes = 5;
  double box_min_size = 0.5;
  double box_max_size = 3.0;
  /// Clutter boxes are scattered between 3 m and this radius.
  double clutter_radius = 30.0;

  /// Extra objects added to any scene kind.
  std::vector<LabeledBox> extra_boxes;

  /// Standard deviation of Gaussian range noise, meters.
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticScene {
  PointCloud cloud;
  /// Per point: 0 for ground, otherwise 1 + index into `objects`.
  std::vector<int> object_ids;
  std::vector<LabeledBox> objects;
  /// Ground plane as (a, b, c, d) with a x + b y + c z + d = 0.
  Eigen::Vector4d ground_plane = Eigen::Vector4d(0.0, 0.0, 1.0, 0.0);
};

/// Casts one ray through every pixel center of the sensor and keeps the
/// nearest hit within the sensor's range band. Deterministic for a seed.
///
/// Throws InvalidScene when a length is not positive, noise is negative, or
/// the sensor sits inside a solid.
SyntheticScene generate_scene(const SyntheticSceneSpec& spec);

}  // namespace ambient

#endif  // AMBIENT_SCENE_HPP
