#include <cmath>
#include <cstring>
#include <set>

#include <gtest/gtest.h>

#include "ambient/scene.hpp"

using namespace ambient;

TEST(Scene, CorridorPointsLieOnWallsOrGround) {
  SyntheticSceneSpec spec;
  spec.kind = SceneKind::Corridor;
  spec.corridor_width = 6.0;
  const auto scene = generate_scene(spec);
  ASSERT_GT(scene.cloud.size(), 50000U);
  ASSERT_EQ(scene.objects.size(), 2U);
  for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
    const auto& p = scene.cloud[i];
    const int id = scene.object_ids[i];
    if (id == 0) {
      EXPECT_NEAR(p.z, -spec.sensor_height, 1e-9);
    } else {
      // Inner faces of the two walls.
      EXPECT_NEAR(std::abs(p.y), 0.5 * spec.corridor_width, 1e-9);
    }
  }
  const Eigen::Vector4d plane = scene.ground_plane;
  EXPECT_NEAR(plane.head<3>().norm(), 1.0, 1e-12);
  EXPECT_NEAR(plane.w() / plane.z(), spec.sensor_height, 1e-12);
}

TEST(Scene, RoomObjectsPartitionReturns) {
  SyntheticSceneSpec spec;
  spec.kind = SceneKind::Room;
  spec.num_boxes = 5;
  spec.seed = 12;
  const auto scene = generate_scene(spec);
  ASSERT_EQ(scene.objects.size(), 9U);
  for (std::size_t k = 4; k < 9; ++k) EXPECT_EQ(scene.objects[k].tag, "box");
  std::set<int> seen;
  for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
    const int id = scene.object_ids[i];
    ASSERT_GE(id, 0);
    ASSERT_LE(id, static_cast<int>(scene.objects.size()));
    if (id > 0) {
      EXPECT_TRUE(scene.objects[static_cast<std::size_t>(id - 1)].contains(scene.cloud[i].xyz()));
      seen.insert(id);
    }
  }
  EXPECT_GE(seen.size(), 8U);
}

TEST(Scene, DeterministicUnderSeed) {
  SyntheticSceneSpec spec;
  spec.kind = SceneKind::Clutter;
  spec.num_boxes = 12;
  spec.noise_sigma = 0.02;
  spec.seed = 31;
  const auto a = generate_scene(spec);
  const auto b = generate_scene(spec);
  ASSERT_EQ(a.cloud.size(), b.cloud.size());
  EXPECT_EQ(0, std::memcmp(a.cloud.data(), b.cloud.data(), a.cloud.size() * sizeof(Point)));
  EXPECT_EQ(a.object_ids, b.object_ids);
  spec.seed = 32;
  const auto c = generate_scene(spec);
  EXPECT_FALSE(c.cloud.size() == a.cloud.size() &&
               std::memcmp(a.cloud.data(), c.cloud.data(), a.cloud.size() * sizeof(Point)) == 0);
}

TEST(Scene, InvalidSpecs) {
  SyntheticSceneSpec spec;
  spec.corridor_width = -1.0;
  EXPECT_THROW(generate_scene(spec), Error);
  spec = {};
  spec.noise_sigma = -0.1;
  EXPECT_THROW(generate_scene(spec), Error);
  spec = {};
  spec.kind = SceneKind::Clutter;
  spec.num_boxes = 0;
  spec.extra_boxes = {LabeledBox{{0, 0, 0}, {2, 2, 2}, 0.0, "cage"}};
  try {
    generate_scene(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidScene);
  }
}

TEST(Scene, KindNames) {
  for (auto k : {SceneKind::Corridor, SceneKind::Room, SceneKind::WallPair, SceneKind::Clutter}) {
    EXPECT_EQ(parse_scene_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_scene_kind("forest").has_value());
}
