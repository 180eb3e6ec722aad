#ifndef AMBIENT_DEGENERATION_HPP
#define AMBIENT_DEGENERATION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ambient/core.hpp"
#include "ambient/skeleton.hpp"

namespace ambient {

/// A weighted surface normal sampled from the skeleton.
struct NormalFeature {
  /// Unit normal, oriented toward the sensor origin.
  Eigen::Vector3d unit_normal = Eigen::Vector3d::UnitZ();
  /// Confidence ln((d_max - depth) * neighbor_count + 1).
  double weight = 0.0;
  PixelCoord source_pixel;
  std::size_t neighbor_count = 0;
  double depth = 0.0;

  Eigen::Vector3d weighted() const { return weight * unit_normal; }
};

struct NormalFieldParams {
  /// Fraction of skeleton pixels sampled, in (0, 1].
  double sample_fraction = 0.10;
  /// Neighborhood half-width in pixels.
  int window = 2;
  /// Neighbours whose depth differs from the center by this much or more are
  /// left out of the neighborhood, meters.
  double depth_gate = 0.5;
  /// Smallest neighborhood (center included) that yields a normal.
  std::size_t min_neighbors = 5;
  std::uint64_t rng_seed = 42;
};

struct DegenerationParams {
  double beta0_min_deg = 10.0;
  double beta0_max_deg = 60.0;
  /// Below this many features the frame falls back to beta0_min.
  std::size_t min_features = 10;
};

/// Anisotropy of the projected normal field.
struct DegenerationDegree {
  /// Major-axis over minor-axis component mass, >= 1; +inf when the minor
  /// axis carries no mass.
  double k = 1.0;
  /// 1 - 1/k, in [0, 1].
  double mu = 0.0;
  /// Unit major axis of the horizontal normal field.
  Eigen::Vector2d principal_direction = Eigen::Vector2d::UnitX();
};

struct DegenerationReport {
  double k = 1.0;
  double mu = 0.0;
  Eigen::Vector2d principal_direction = Eigen::Vector2d::UnitX();
  double beta0_dynamic = 0.0;
  std::size_t num_features = 0;
  std::uint64_t frame_id = 0;
  /// Set when too few features were found and beta0_min was used.
  bool fallback = false;
};

struct FeatureWeight {
  double value = 0.0;
  /// The depth exceeded d_max and the weight was clamped to 0.
  bool clamped = false;
};

struct MappedThreshold {
  double beta0_deg = 0.0;
  /// mu was outside [0, 1] and got clamped.
  bool clamped = false;
};

/// 3D points of the skeleton pixels in the w-window around `p` (columns wrap)
/// whose depth differs from depth(p) by less than the gate, `p` included.
std::vector<Eigen::Vector3d> neighborhood_set(const RangeImage& img, const SkeletonMask& skeleton,
                                              PixelCoord p, const NormalFieldParams& params);

/// Least-variance principal axis of `points`, flipped to face the origin.
///
/// Throws TooFewPoints below `min_points` and DegenerateNeighborhood when the
/// points do not span a plane (coincident or collinear).
Eigen::Vector3d pca_normal(std::span<const Eigen::Vector3d> points, std::size_t min_points = 3);

/// ln((d_max - d_i) * N_i + 1). A depth beyond d_max yields a clamped zero.
FeatureWeight normal_weight(double d_i, std::int64_t n_i, double d_max);

/// Samples skeleton pixels with probability `sample_fraction` (seeded) and
/// fits a weighted normal to each sampled neighborhood that is large enough.
/// d_max is the sensor's max range.
std::vector<NormalFeature> extract_normal_field(const RangeImage& img,
                                                const SkeletonMask& skeleton,
                                                const NormalFieldParams& params);

/// Projects weighted normals onto the ground plane, finds the principal axes
/// of their second-moment matrix and returns k = sum|major| / sum|minor|.
///
/// Throws InsufficientFeatures below `min_features` or when every weight is 0.
DegenerationDegree degeneration_degree(std::span<const NormalFeature> features,
                                       std::size_t min_features = 10);

/// Linear map from mu to beta0: mu = 0 gives beta0_max, mu = 1 gives beta0_min.
MappedThreshold map_threshold(double mu, double beta0_min_deg, double beta0_max_deg);

/// degeneration_degree + map_threshold, falling back to beta0_min when the
/// field is too sparse to analyze.
DegenerationReport analyze_degeneration(std::span<const NormalFeature> features,
                                        const DegenerationParams& params,
                                        std::uint64_t frame_id = 0);

}  // namespace ambient

#endif  // AMBIENT_DEGENERATION_HPP
