#include <gtest/gtest.h>

#include "ambient/ground_filter.hpp"
#include "ambient/scene.hpp"
#include "support/fixtures.hpp"

using namespace ambient;

namespace {

struct Counted {
  std::size_t total = 0;
  std::size_t ground = 0;
};

// Pixels whose return came from object `id`, and how many of them are flagged.
Counted count_object(const SyntheticScene& scene, const RangeImage& img, const GroundMask& mask,
                     int id) {
  Counted out;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const auto idx = img.point_indices()[i];
    if (idx < 0 || scene.object_ids[static_cast<std::size_t>(idx)] != id) continue;
    ++out.total;
    if (mask(i)) ++out.ground;
  }
  return out;
}

SyntheticSceneSpec open_field(double sigma) {
  SyntheticSceneSpec spec;
  spec.kind = SceneKind::Clutter;
  spec.num_boxes = 0;
  spec.noise_sigma = sigma;
  spec.seed = 3;
  return spec;
}

}  // namespace

TEST(Ground, FlatPlaneIsGround) {
  for (double sigma : {0.0, 0.01}) {
    const auto scene = generate_scene(open_field(sigma));
    const auto img = project(scene.cloud, SensorModel::hdl64());
    const auto mask = classify_ground(img);
    const auto c = count_object(scene, img, mask, 0);
    ASSERT_GT(c.total, 10000U);
    EXPECT_GE(static_cast<double>(c.ground), 0.99 * static_cast<double>(c.total)) << "sigma " << sigma;
  }
}

TEST(Ground, WallIsNeverGround) {
  auto spec = open_field(0.0);
  for (double x : {4.0, 8.0, 15.0}) {
    spec.extra_boxes = {LabeledBox{{x, 0.0, 0.27}, {0.2, 20.0, 4.0}, 0.0, "wall"}};
    const auto scene = generate_scene(spec);
    const auto img = project(scene.cloud, SensorModel::hdl64());
    const auto mask = classify_ground(img);
    const auto wall = count_object(scene, img, mask, 1);
    ASSERT_GT(wall.total, 100U);
    EXPECT_EQ(wall.ground, 0U) << "wall at " << x;
    const auto floor = count_object(scene, img, mask, 0);
    EXPECT_GE(static_cast<double>(floor.ground), 0.98 * static_cast<double>(floor.total));
  }
}

TEST(Ground, EmptyImageHasNoGround) {
  const RangeImage img(SensorModel::vlp16());
  const auto mask = classify_ground(img);
  EXPECT_EQ(mask.rows(), img.rows());
  EXPECT_EQ(mask.cols(), img.cols());
  EXPECT_EQ(mask.count(), 0U);
}

TEST(Ground, RejectsBadSlope) {
  const RangeImage img(SensorModel::vlp16());
  EXPECT_THROW(classify_ground(img, GroundParams{0.0, 1.73, 0.5}), Error);
  EXPECT_THROW(classify_ground(img, GroundParams{90.0, 1.73, 0.5}), Error);
}

TEST(Ground, FlagsOnlyLowValidReturns) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto scene = fixtures::random_scene(seed);
    const auto img = project(scene.cloud, fixtures::small_sensor());
    const GroundParams params;
    const auto mask = classify_ground(img, params);
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (!mask(i)) continue;
      ASSERT_GT(img.depths()[i], 0.0);
      EXPECT_LT(img.points()[i].z, params.max_ground_z());
    }
  }
}

TEST(Ground, MoreTolerantSlopeNeverLosesGround) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto scene = fixtures::random_scene(seed);
    const auto img = project(scene.cloud, fixtures::small_sensor());
    const auto strict = classify_ground(img, GroundParams{5.0, 1.73, 0.5});
    const auto loose = classify_ground(img, GroundParams{20.0, 1.73, 0.5});
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (strict(i)) EXPECT_TRUE(loose(i)) << "seed " << seed << " pixel " << i;
    }
  }
}
