#include <gtest/gtest.h>

#include "ambient/skeleton.hpp"
#include "support/fixtures.hpp"

using namespace ambient;

namespace {

ClusterLabeling uniform_labels(int rows, int cols, ClusterLabeling::Label id) {
  return ClusterLabeling::from_labels(
      rows, cols, std::vector<ClusterLabeling::Label>(static_cast<std::size_t>(rows * cols), id));
}

}  // namespace

TEST(Skeleton, FullIntersection) {
  const auto e = uniform_labels(10, 20, 1);
  const auto d = uniform_labels(10, 20, 1);
  const auto sk = extract_skeleton(e, d, 100, 30);
  EXPECT_EQ(sk.count(), 200U);
}

TEST(Skeleton, SmallDepthClusterExcluded) {
  std::vector<ClusterLabeling::Label> dl(200, 1);
  dl[5] = 2;
  dl[6] = 2;
  const auto e = uniform_labels(10, 20, 1);
  const auto d = ClusterLabeling::from_labels(10, 20, dl);
  const auto sk = extract_skeleton(e, d, 100, 30);
  EXPECT_EQ(sk.count(), 198U);
  EXPECT_FALSE(sk(5));
  EXPECT_FALSE(sk(6));
  EXPECT_TRUE(sk(7));
}

TEST(Skeleton, SmallEuclideanClusterExcluded) {
  std::vector<ClusterLabeling::Label> el(200, 1);
  for (int i = 0; i < 50; ++i) el[static_cast<std::size_t>(i)] = 2;
  const auto e = ClusterLabeling::from_labels(10, 20, el);
  const auto d = uniform_labels(10, 20, 1);
  const auto sk = extract_skeleton(e, d, 100, 30);
  EXPECT_EQ(sk.count(), 150U);
}

TEST(Skeleton, WallWithLeavesKeepsOnlyWall) {
  const auto s = SensorModel::vlp16();
  std::vector<double> d(static_cast<std::size_t>(s.num_rings() * s.num_cols()), 0.0);
  std::vector<bool> is_wall(d.size(), false);
  for (int r = 0; r < s.num_rings(); ++r) {
    for (int c = 0; c < 60; ++c) {
      const auto i = static_cast<std::size_t>(r * s.num_cols() + c);
      d[i] = 6.0;
      is_wall[i] = true;
    }
  }
  // Five-pixel leaves, each at its own depth and far from everything else.
  for (int leaf = 0; leaf < 20; ++leaf) {
    const int c0 = 200 + leaf * 60;
    const int r0 = (leaf * 3) % 12;
    const double depth = 3.0 + leaf;
    for (int k = 0; k < 5; ++k) d[static_cast<std::size_t>((r0 + k % 2) * s.num_cols() + c0 + k / 2)] = depth;
  }
  const auto img = RangeImage::from_depths(s, d);
  const GroundMask none(img.rows(), img.cols());
  const auto e = euclidean_cluster(img, none, {});
  const auto dc = depth_cluster(img, none, {10.0});
  EXPECT_EQ(e.num_clusters(), 21U);
  const auto sk = extract_skeleton(e, dc, 30, 30);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(sk(i), static_cast<bool>(is_wall[i])) << i;
  EXPECT_EQ(sk.count(), 16U * 60U);
}

TEST(Skeleton, ShapeMismatch) {
  EXPECT_THROW(extract_skeleton(uniform_labels(10, 20, 1), uniform_labels(20, 10, 1), 1, 1), Error);
  EXPECT_THROW(SkeletonMask(2, 2, std::vector<unsigned char>(3, 0)), Error);
}

TEST(SkeletonProperties, Invariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scene = fixtures::random_scene(seed);
    const auto img = project(scene.cloud, fixtures::small_sensor());
    const auto ground = classify_ground(img);
    const auto e = euclidean_cluster(img, ground, {});
    const auto d = depth_cluster(img, ground, {10.0});

    const auto all = extract_skeleton(e, d, 1, 1);
    const auto base = extract_skeleton(e, d, 100, 30);
    const auto bigger_e = extract_skeleton(e, d, 300, 30);
    const auto bigger_d = extract_skeleton(e, d, 100, 90);
    const auto fe = filter_small_clusters(e, 100);
    const auto fd = filter_small_clusters(d, 30);
    std::size_t both = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      EXPECT_EQ(all(i), e.label(i) > 0 && d.label(i) > 0);
      EXPECT_EQ(base(i), fe.label(i) > 0 && fd.label(i) > 0);
      if (base(i)) {
        EXPECT_GT(img.depths()[i], 0.0);
        EXPECT_FALSE(ground(i));
        ++both;
      }
      if (bigger_e(i)) EXPECT_TRUE(base(i));
      if (bigger_d(i)) EXPECT_TRUE(base(i));
    }
    EXPECT_EQ(base.count(), both);
    EXPECT_LE(base.count(), std::min(fe.labeled_count(), fd.labeled_count()));
    EXPECT_LE(bigger_e.count(), base.count());
    EXPECT_LE(bigger_d.count(), base.count());
  }
}
