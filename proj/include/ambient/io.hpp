#ifndef AMBIENT_IO_HPP
#define AMBIENT_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ambient/core.hpp"
#include "ambient/degeneration.hpp"
#include "ambient/eval.hpp"
#include "ambient/pipeline.hpp"

namespace ambient::io {

struct ScanReadResult {
  PointCloud cloud;
  /// Records with a NaN or infinite field, skipped.
  std::size_t dropped_non_finite = 0;
};

/// KITTI velodyne layout: little-endian float32 quadruples (x, y, z, intensity).
/// Throws FormatError (with the byte offset of the partial record) when the
/// size is not a multiple of 16.
ScanReadResult parse_kitti_bin(std::span<const std::byte> bytes);
ScanReadResult read_kitti_bin(const std::filesystem::path& path);
void write_kitti_bin(const PointCloud& cloud, const std::filesystem::path& path);

/// ASCII PCD with at least x, y, z fields; `intensity` is read when present.
ScanReadResult read_pcd_ascii(const std::filesystem::path& path);

/// Picks the reader from the extension (.bin or .pcd).
ScanReadResult read_scan(const std::filesystem::path& path);

struct LabeledPoint {
  float x = 0.0F;
  float y = 0.0F;
  float z = 0.0F;
  std::uint32_t label = 0;
};

/// Label values written for pipeline output.
inline constexpr std::uint32_t kRemovedLabel = 0;
inline constexpr std::uint32_t kGroundLabel = 1;
/// File label of a final-pass cluster id.
inline constexpr std::uint32_t cluster_file_label(std::int32_t id) {
  return static_cast<std::uint32_t>(id) + 1;
}

void write_labeled_pcd(std::span<const LabeledPoint> points, const std::filesystem::path& path);
std::vector<LabeledPoint> read_labeled_pcd(const std::filesystem::path& path);

struct LabeledCloudOptions {
  /// Also write the dropped non-ground returns with label 0.
  bool include_removed = false;
};

/// Ground (label 1) and surviving cluster points (final id + 1) of a frame.
/// Throws IoError when the file cannot be written.
void write_labeled_cloud(const FrameResult& result, const std::filesystem::path& path,
                         const LabeledCloudOptions& options = {});

/// Points of a range image with a per-pixel label grid.
std::vector<LabeledPoint> labeled_points(const RangeImage& img,
                                         std::span<const std::int32_t> labels);

/// KITTI odometry poses: one row-major 3x4 [R|t] per line.
Trajectory read_kitti_poses(const std::filesystem::path& path);
void write_kitti_poses(std::span<const Pose> poses, const std::filesystem::path& path);

/// Box list: one `cx cy cz dx dy dz yaw [tag]` per line, `#` starts a comment.
std::vector<LabeledBox> read_boxes(const std::filesystem::path& path);
void write_boxes(std::span<const LabeledBox> boxes, const std::filesystem::path& path);

/// Per-frame RPE as CSV: index,translation_m,rotation_rad.
void write_rpe_csv(std::span<const RelativePoseError> errors, const std::filesystem::path& path);

/// k is written as null when infinite.
nlohmann::json to_json(const DegenerationReport& report);
nlohmann::json to_json(const StageTimings& timings);
nlohmann::json to_json(const IoUSummary& summary);
/// Report, counts and timings of one processed frame.
nlohmann::json frame_summary(const FrameResult& result);

}  // namespace ambient::io

#endif  // AMBIENT_IO_HPP
