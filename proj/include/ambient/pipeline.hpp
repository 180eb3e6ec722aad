#ifndef AMBIENT_PIPELINE_HPP
#define AMBIENT_PIPELINE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ambient/clustering.hpp"
#include "ambient/core.hpp"
#include "ambient/degeneration.hpp"
#include "ambient/ground_filter.hpp"
#include "ambient/skeleton.hpp"

namespace ambient {

/// Every threshold of the per-frame filter.
struct PipelineConfig {
  SensorModel sensor = SensorModel::hdl64();
  bool ground_enabled = true;
  GroundParams ground;
  EuclideanClusterParams euclidean;
  SkeletonParams skeleton;
  NormalFieldParams normals;
  DegenerationParams degeneration;
  /// beta0 of the first depth-clustering pass; beta0_min when unset.
  std::optional<double> initial_beta0;
  /// Replaces the dynamic threshold in the final pass (analysis still runs).
  std::optional<double> force_beta0;
  /// Frames processed concurrently by process_sequence.
  std::size_t workers = 1;

  double first_pass_beta0() const noexcept {
    return initial_beta0.value_or(degeneration.beta0_min_deg);
  }
};

enum class Stage : std::size_t {
  Project,
  Ground,
  DepthFirstPass,
  Euclidean,
  Skeleton,
  NormalField,
  Degree,
  DepthFinalPass,
  Filter,
  Total,
};

inline constexpr std::size_t kStageCount = static_cast<std::size_t>(Stage::Total) + 1;

std::string_view to_string(Stage stage) noexcept;

/// Wall-clock milliseconds per stage.
struct StageTimings {
  std::array<double, kStageCount> ms{};

  double& operator[](Stage s) noexcept { return ms[static_cast<std::size_t>(s)]; }
  double operator[](Stage s) const noexcept { return ms[static_cast<std::size_t>(s)]; }
  /// Depth first pass plus adaptive Euclidean.
  double clustering_ms() const noexcept {
    return (*this)[Stage::DepthFirstPass] + (*this)[Stage::Euclidean];
  }
  /// Normal field extraction plus degree analysis.
  double degeneration_ms() const noexcept {
    return (*this)[Stage::NormalField] + (*this)[Stage::Degree];
  }
};

struct FrameResult {
  RangeImage image;
  GroundMask ground;
  ClusterLabeling first_pass;
  ClusterLabeling euclidean;
  SkeletonMask skeleton;
  std::vector<NormalFeature> features;
  DegenerationReport report;
  /// Final-pass depth labeling after small-cluster removal.
  ClusterLabeling final_pass;
  /// beta0 actually used by the final pass.
  double final_beta0 = 0.0;

  /// Points of surviving final clusters, with their final-pass labels.
  PointCloud cleaned_cloud;
  std::vector<ClusterLabeling::Label> cleaned_labels;
  /// Ground returns, passed through untouched.
  PointCloud ground_cloud;
  /// Non-ground returns dropped by the final pass.
  std::size_t removed_count = 0;
  /// Input points that did not survive projection (out of view, out of
  /// range, or occluded within a pixel).
  std::size_t unprojected_count = 0;

  StageTimings timings;
};

/// Project, remove ground, cluster twice, extract the skeleton, estimate the
/// degeneration degree and re-run depth clustering with the mapped beta0.
FrameResult process_frame(const PointCloud& cloud, const PipelineConfig& config,
                          std::uint64_t frame_id = 0);

struct FrameError {
  ErrorCode code = ErrorCode::InvalidInput;
  std::string message;
};

/// Outcome of one frame in a sequence: exactly one of result / error is set.
struct FrameOutcome {
  std::size_t index = 0;
  std::optional<FrameResult> result;
  std::optional<FrameError> error;
};

using FrameSource = std::function<PointCloud(std::size_t index)>;
using FrameSink = std::function<void(FrameOutcome&&)>;

/// Runs frames 0..count-1 through process_frame on `config.workers` threads.
/// `sink` is called once per frame in input order, never concurrently.
/// Failures from `source` or the pipeline are reported inline.
void process_sequence(std::size_t count, const FrameSource& source, const PipelineConfig& config,
                      const FrameSink& sink);

std::vector<FrameOutcome> process_sequence(std::span<const PointCloud> frames,
                                           const PipelineConfig& config);

}  // namespace ambient

#endif  // AMBIENT_PIPELINE_HPP
