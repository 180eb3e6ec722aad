#include "ambient/degeneration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace ambient {

namespace {

// Collinear or coincident neighborhoods leave the middle eigenvalue at
// round-off level relative to the largest.
constexpr double kRankTolerance = 1e-10;

void gather_neighborhood(const RangeImage& img, const SkeletonMask& skeleton, PixelCoord p,
                         int window, double depth_gate, std::span<const int> col_offsets,
                         std::vector<Eigen::Vector3d>& out) {
  out.clear();
  const double center_depth = img.depth(p);
  const int cols = img.cols();
  const auto depths = img.depths();
  const auto points = img.points();
  for (int r = std::max(0, p.row - window); r <= std::min(img.rows() - 1, p.row + window); ++r) {
    for (int dc : col_offsets) {
      int c = p.col + dc;
      if (c < 0) {
        c += cols;
      } else if (c >= cols) {
        c -= cols;
      }
      const std::size_t i = img.index(r, c);
      if (!skeleton(i)) continue;
      if (!(std::abs(depths[i] - center_depth) < depth_gate)) continue;
      out.push_back(points[i].xyz());
    }
  }
}

void check_params(const NormalFieldParams& params) {
  if (!(params.sample_fraction > 0.0 && params.sample_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "sample_fraction must lie in (0, 1]");
  }
  if (params.window < 1) throw Error(ErrorCode::InvalidInput, "window must be >= 1");
  if (!(params.depth_gate > 0.0)) throw Error(ErrorCode::InvalidInput, "depth_gate must be > 0");
  if (params.min_neighbors < 3) throw Error(ErrorCode::InvalidInput, "min_neighbors must be >= 3");
}

}  // namespace

std::vector<Eigen::Vector3d> neighborhood_set(const RangeImage& img, const SkeletonMask& skeleton,
                                              PixelCoord p, const NormalFieldParams& params) {
  check_params(params);
  if (skeleton.rows() != img.rows() || skeleton.cols() != img.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "skeleton does not match the range image");
  }
  if (!img.in_bounds(p)) throw Error(ErrorCode::InvalidInput, "pixel out of bounds");
  if (!skeleton(p)) throw Error(ErrorCode::InvalidInput, "pixel is not a skeleton point");
  const auto offsets = window_column_offsets(img.cols(), params.window);
  std::vector<Eigen::Vector3d> out;
  gather_neighborhood(img, skeleton, p, params.window, params.depth_gate, offsets, out);
  return out;
}

Eigen::Vector3d pca_normal(std::span<const Eigen::Vector3d> points, std::size_t min_points) {
  if (points.size() < std::max<std::size_t>(min_points, 3)) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(points.size()) + " points, need " +
                                             std::to_string(std::max<std::size_t>(min_points, 3)));
  }
  const double n = static_cast<double>(points.size());
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= n;

  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - centroid;
    covariance.noalias() += d * d.transpose();
  }
  covariance /= n;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateNeighborhood, "eigen decomposition failed");
  }
  // Eigenvalues come back in increasing order.
  const Eigen::Vector3d& lambda = solver.eigenvalues();
  if (!(lambda(2) > 0.0) || lambda(1) <= kRankTolerance * lambda(2)) {
    throw Error(ErrorCode::DegenerateNeighborhood, "points do not span a plane");
  }
  Eigen::Vector3d normal = solver.eigenvectors().col(0).normalized();
  if (normal.dot(-centroid) < 0.0) normal = -normal;
  return normal;
}

FeatureWeight normal_weight(double d_i, std::int64_t n_i, double d_max) {
  if (n_i < 0) throw Error(ErrorCode::InvalidInput, "neighbor count must be >= 0");
  if (!(d_i > 0.0)) throw Error(ErrorCode::InvalidDepth, "depth must be positive");
  if (!(d_max > 0.0)) throw Error(ErrorCode::InvalidInput, "d_max must be positive");
  if (d_i > d_max) return {0.0, true};
  return {std::log((d_max - d_i) * static_cast<double>(n_i) + 1.0), false};
}

std::vector<NormalFeature> extract_normal_field(const RangeImage& img,
                                                const SkeletonMask& skeleton,
                                                const NormalFieldParams& params) {
  check_params(params);
  if (skeleton.rows() != img.rows() || skeleton.cols() != img.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "skeleton does not match the range image");
  }
  const auto offsets = window_column_offsets(img.cols(), params.window);
  const double d_max = img.sensor().max_range();

  // Acceptance uses the top 53 bits of each draw so the sample set depends
  // only on the seed, not on the standard library's distributions.
  std::mt19937_64 rng(params.rng_seed);
  const auto draw = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<NormalFeature> features;
  std::vector<Eigen::Vector3d> neighborhood;
  neighborhood.reserve(static_cast<std::size_t>((2 * params.window + 1) * (2 * params.window + 1)));

  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      if (!skeleton(img.index(r, c))) continue;
      if (!(draw() < params.sample_fraction)) continue;
      const PixelCoord p{r, c};
      gather_neighborhood(img, skeleton, p, params.window, params.depth_gate, offsets,
                          neighborhood);
      if (neighborhood.size() < params.min_neighbors) continue;
      Eigen::Vector3d normal;
      try {
        normal = pca_normal(neighborhood, params.min_neighbors);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateNeighborhood) continue;
        throw;
      }
      const double depth = img.depth(p);
      const auto count = neighborhood.size();
      features.push_back(NormalFeature{
          normal, normal_weight(depth, static_cast<std::int64_t>(count), d_max).value, p, count,
          depth});
    }
  }
  return features;
}

DegenerationDegree degeneration_degree(std::span<const NormalFeature> features,
                                       std::size_t min_features) {
  if (features.size() < min_features) {
    throw Error(ErrorCode::InsufficientFeatures, std::to_string(features.size()) +
                                                     " features, need " +
                                                     std::to_string(min_features));
  }
  // Second moment about the origin: invariant to the sign of each normal.
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const auto& f : features) {
    const double x = f.weight * f.unit_normal.x();
    const double y = f.weight * f.unit_normal.y();
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  if (!(sxx + syy > 0.0)) {
    throw Error(ErrorCode::InsufficientFeatures, "normal field has no horizontal mass");
  }
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  Eigen::Vector2d major(std::cos(theta), std::sin(theta));
  if (major.x() < 0.0 || (major.x() == 0.0 && major.y() < 0.0)) major = -major;
  const Eigen::Vector2d minor(-major.y(), major.x());

  double along = 0.0;
  double across = 0.0;
  for (const auto& f : features) {
    const Eigen::Vector2d v(f.weight * f.unit_normal.x(), f.weight * f.unit_normal.y());
    along += std::abs(v.dot(major));
    across += std::abs(v.dot(minor));
  }

  DegenerationDegree out;
  out.principal_direction = major;
  if (across == 0.0) {
    out.k = std::numeric_limits<double>::infinity();
    out.mu = 1.0;
  } else {
    out.k = std::max(1.0, along / across);
    out.mu = 1.0 - 1.0 / out.k;
  }
  return out;
}

MappedThreshold map_threshold(double mu, double beta0_min_deg, double beta0_max_deg) {
  if (!(beta0_min_deg > 0.0 && beta0_min_deg < beta0_max_deg && beta0_max_deg < 90.0)) {
    throw Error(ErrorCode::InvalidInput, "need 0 < beta0_min < beta0_max < 90");
  }
  if (std::isnan(mu)) throw Error(ErrorCode::InvalidInput, "mu is NaN");
  MappedThreshold out;
  if (mu < 0.0 || mu > 1.0) {
    mu = std::clamp(mu, 0.0, 1.0);
    out.clamped = true;
  }
  out.beta0_deg = mu * (beta0_min_deg - beta0_max_deg) + beta0_max_deg;
  return out;
}

DegenerationReport analyze_degeneration(std::span<const NormalFeature> features,
                                        const DegenerationParams& params,
                                        std::uint64_t frame_id) {
  DegenerationReport report;
  report.frame_id = frame_id;
  report.num_features = features.size();
  try {
    const DegenerationDegree degree = degeneration_degree(features, params.min_features);
    report.k = degree.k;
    report.mu = degree.mu;
    report.principal_direction = degree.principal_direction;
    report.beta0_dynamic = map_threshold(degree.mu, params.beta0_min_deg, params.beta0_max_deg)
                               .beta0_deg;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientFeatures) throw;
    // A frame too sparse to analyze is treated as fully degenerate.
    map_threshold(1.0, params.beta0_min_deg, params.beta0_max_deg);
    report.k = std::numeric_limits<double>::infinity();
    report.mu = 1.0;
    report.beta0_dynamic = params.beta0_min_deg;
    report.fallback = true;
  }
  return report;
}

}  // namespace ambient
