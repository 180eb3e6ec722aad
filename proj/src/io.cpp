#include "ambient/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ambient::io {

namespace {

namespace fs = std::filesystem;

float read_le_float(const std::byte* p) {
  std::array<std::byte, 4> raw;
  std::memcpy(raw.data(), p, 4);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  return std::bit_cast<float>(raw);
}

void append_le_float(std::string& out, float v) {
  auto raw = std::bit_cast<std::array<char, 4>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.append(raw.data(), raw.size());
}

std::ofstream open_for_write(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_for_read(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

[[noreturn]] void format_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

struct PcdHeader {
  std::vector<std::string> fields;
  std::size_t points = 0;
  std::size_t data_line = 0;
};

PcdHeader read_pcd_header(std::istream& in, const fs::path& path, std::size_t& line_no) {
  PcdHeader header;
  bool have_points = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "FIELDS") {
      std::string f;
      while (ss >> f) header.fields.push_back(f);
    } else if (key == "POINTS") {
      if (!(ss >> header.points)) format_error(path, line_no, "bad POINTS value");
      have_points = true;
    } else if (key == "DATA") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") format_error(path, line_no, "only DATA ascii is supported");
      header.data_line = line_no;
      break;
    }
  }
  if (header.data_line == 0) format_error(path, line_no, "missing DATA line");
  if (header.fields.empty()) format_error(path, line_no, "missing FIELDS line");
  if (!have_points) format_error(path, line_no, "missing POINTS line");
  return header;
}

int field_index(const PcdHeader& h, const std::string& name) {
  const auto it = std::find(h.fields.begin(), h.fields.end(), name);
  return it == h.fields.end() ? -1 : static_cast<int>(it - h.fields.begin());
}

// Reads one ASCII PCD record into `values`, raising positional errors.
void read_pcd_record(const std::string& line, const PcdHeader& h, const fs::path& path,
                     std::size_t line_no, std::vector<double>& values) {
  std::istringstream ss(line);
  values.clear();
  std::string token;
  while (ss >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') format_error(path, line_no, "bad number '" + token + "'");
    values.push_back(v);
  }
  if (values.size() != h.fields.size()) {
    format_error(path, line_no,
                 "expected " + std::to_string(h.fields.size()) + " values, got " +
                     std::to_string(values.size()));
  }
}

}  // namespace

ScanReadResult parse_kitti_bin(std::span<const std::byte> bytes) {
  constexpr std::size_t kRecord = 16;
  if (bytes.size() % kRecord != 0) {
    const std::size_t offset = bytes.size() - bytes.size() % kRecord;
    throw Error(ErrorCode::FormatError, "truncated KITTI record at byte offset " +
                                            std::to_string(offset) + " (file size " +
                                            std::to_string(bytes.size()) + ")");
  }
  ScanReadResult out;
  out.cloud.reserve(bytes.size() / kRecord);
  for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
    const float x = read_le_float(bytes.data() + off);
    const float y = read_le_float(bytes.data() + off + 4);
    const float z = read_le_float(bytes.data() + off + 8);
    const float i = read_le_float(bytes.data() + off + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(i)) {
      ++out.dropped_non_finite;
      continue;
    }
    out.cloud.push_back(Point{x, y, z, i});
  }
  return out;
}

ScanReadResult read_kitti_bin(const fs::path& path) {
  auto in = open_for_read(path, std::ios::binary);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_kitti_bin(std::as_bytes(std::span<const char>(raw)));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_kitti_bin(const PointCloud& cloud, const fs::path& path) {
  std::string buffer;
  buffer.reserve(cloud.size() * 16);
  for (const auto& p : cloud) {
    append_le_float(buffer, static_cast<float>(p.x));
    append_le_float(buffer, static_cast<float>(p.y));
    append_le_float(buffer, static_cast<float>(p.z));
    append_le_float(buffer, static_cast<float>(p.intensity));
  }
  auto out = open_for_write(path, std::ios::binary);
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  finish_write(out, path);
}

ScanReadResult read_pcd_ascii(const fs::path& path) {
  auto in = open_for_read(path);
  std::size_t line_no = 0;
  const PcdHeader h = read_pcd_header(in, path, line_no);
  const int ix = field_index(h, "x");
  const int iy = field_index(h, "y");
  const int iz = field_index(h, "z");
  const int ii = field_index(h, "intensity");
  if (ix < 0 || iy < 0 || iz < 0) format_error(path, h.data_line, "FIELDS must include x y z");

  ScanReadResult out;
  out.cloud.reserve(h.points);
  std::vector<double> values;
  std::string line;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    read_pcd_record(line, h, path, line_no, values);
    ++records;
    const Point p{values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                  values[static_cast<std::size_t>(iz)],
                  ii >= 0 ? values[static_cast<std::size_t>(ii)] : 0.0};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      ++out.dropped_non_finite;
      continue;
    }
    out.cloud.push_back(p);
  }
  if (records != h.points) {
    format_error(path, line_no,
                 "header declares " + std::to_string(h.points) + " points, found " +
                     std::to_string(records));
  }
  return out;
}

ScanReadResult read_scan(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".bin") return read_kitti_bin(path);
  if (ext == ".pcd") return read_pcd_ascii(path);
  throw Error(ErrorCode::FormatError, path.string() + ": unknown scan extension '" + ext + "'");
}

void write_labeled_pcd(std::span<const LabeledPoint> points, const fs::path& path) {
  auto out = open_for_write(path);
  out << "# .PCD v0.7 - Point Cloud Data file format\n"
      << "VERSION 0.7\n"
      << "FIELDS x y z label\n"
      << "SIZE 4 4 4 4\n"
      << "TYPE F F F U\n"
      << "COUNT 1 1 1 1\n"
      << "WIDTH " << points.size() << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << points.size() << "\n"
      << "DATA ascii\n";
  // max_digits10 keeps float32 values lossless through the text round trip.
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (const auto& p : points) {
    out << p.x << ' ' << p.y << ' ' << p.z << ' ' << p.label << '\n';
  }
  finish_write(out, path);
}

std::vector<LabeledPoint> read_labeled_pcd(const fs::path& path) {
  auto in = open_for_read(path);
  std::size_t line_no = 0;
  const PcdHeader h = read_pcd_header(in, path, line_no);
  const int ix = field_index(h, "x");
  const int iy = field_index(h, "y");
  const int iz = field_index(h, "z");
  const int il = field_index(h, "label");
  if (ix < 0 || iy < 0 || iz < 0 || il < 0) {
    format_error(path, h.data_line, "FIELDS must include x y z label");
  }
  std::vector<LabeledPoint> out;
  out.reserve(h.points);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    read_pcd_record(line, h, path, line_no, values);
    const double label = values[static_cast<std::size_t>(il)];
    if (label < 0 || label != std::floor(label)) format_error(path, line_no, "bad label");
    out.push_back(LabeledPoint{static_cast<float>(values[static_cast<std::size_t>(ix)]),
                               static_cast<float>(values[static_cast<std::size_t>(iy)]),
                               static_cast<float>(values[static_cast<std::size_t>(iz)]),
                               static_cast<std::uint32_t>(label)});
  }
  if (out.size() != h.points) {
    format_error(path, line_no,
                 "header declares " + std::to_string(h.points) + " points, found " +
                     std::to_string(out.size()));
  }
  return out;
}

void write_labeled_cloud(const FrameResult& result, const fs::path& path,
                         const LabeledCloudOptions& options) {
  std::vector<LabeledPoint> pts;
  pts.reserve(result.cleaned_cloud.size() + result.ground_cloud.size());
  const auto depths = result.image.depths();
  const auto points = result.image.points();
  const auto labels = result.final_pass.labels();
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (!(depths[i] > 0.0)) continue;
    std::uint32_t label = kRemovedLabel;
    if (result.ground(i)) {
      label = kGroundLabel;
    } else if (labels[i] > 0) {
      label = cluster_file_label(labels[i]);
    } else if (!options.include_removed) {
      continue;
    }
    const Point& p = points[i];
    pts.push_back(LabeledPoint{static_cast<float>(p.x), static_cast<float>(p.y),
                               static_cast<float>(p.z), label});
  }
  write_labeled_pcd(pts, path);
}

std::vector<LabeledPoint> labeled_points(const RangeImage& img,
                                         std::span<const std::int32_t> labels) {
  if (labels.size() != img.size()) {
    throw Error(ErrorCode::ShapeMismatch, "label grid does not match the range image");
  }
  std::vector<LabeledPoint> out;
  const auto depths = img.depths();
  const auto points = img.points();
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (!(depths[i] > 0.0)) continue;
    out.push_back(LabeledPoint{static_cast<float>(points[i].x), static_cast<float>(points[i].y),
                               static_cast<float>(points[i].z),
                               static_cast<std::uint32_t>(std::max(0, labels[i]))});
  }
  return out;
}

Trajectory read_kitti_poses(const fs::path& path) {
  auto in = open_for_read(path);
  Trajectory poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (blank(line)) continue;
    std::istringstream ss(line);
    std::array<double, 12> v{};
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(ss >> v[k])) format_error(path, line_no, "expected 12 numbers per pose");
    }
    std::string extra;
    if (ss >> extra) format_error(path, line_no, "more than 12 values on a pose line");
    Pose pose = Pose::Identity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        pose.matrix()(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
      }
    }
    poses.push_back(pose);
  }
  return poses;
}

void write_kitti_poses(std::span<const Pose> poses, const fs::path& path) {
  auto out = open_for_write(path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& pose : poses) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (r + c > 0) out << ' ';
        out << pose.matrix()(r, c);
      }
    }
    out << '\n';
  }
  finish_write(out, path);
}

std::vector<LabeledBox> read_boxes(const fs::path& path) {
  auto in = open_for_read(path);
  std::vector<LabeledBox> boxes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (blank(line)) continue;
    std::istringstream ss(line);
    LabeledBox b;
    if (!(ss >> b.center.x() >> b.center.y() >> b.center.z() >> b.dimensions.x() >>
          b.dimensions.y() >> b.dimensions.z() >> b.yaw)) {
      format_error(path, line_no, "expected cx cy cz dx dy dz yaw [tag]");
    }
    ss >> b.tag;
    if (!(b.dimensions.array() > 0.0).all()) format_error(path, line_no, "box size must be > 0");
    boxes.push_back(std::move(b));
  }
  return boxes;
}

void write_boxes(std::span<const LabeledBox> boxes, const fs::path& path) {
  auto out = open_for_write(path);
  out << "# cx cy cz dx dy dz yaw tag\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& b : boxes) {
    out << b.center.x() << ' ' << b.center.y() << ' ' << b.center.z() << ' ' << b.dimensions.x()
        << ' ' << b.dimensions.y() << ' ' << b.dimensions.z() << ' ' << b.yaw;
    if (!b.tag.empty()) out << ' ' << b.tag;
    out << '\n';
  }
  finish_write(out, path);
}

void write_rpe_csv(std::span<const RelativePoseError> errors, const fs::path& path) {
  auto out = open_for_write(path);
  out << "index,translation_m,rotation_rad\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out << i << ',' << errors[i].translation << ',' << errors[i].rotation << '\n';
  }
  finish_write(out, path);
}

nlohmann::json to_json(const DegenerationReport& report) {
  nlohmann::json j;
  j["frame_id"] = report.frame_id;
  j["k"] = std::isfinite(report.k) ? nlohmann::json(report.k) : nlohmann::json(nullptr);
  j["mu"] = report.mu;
  j["principal_direction"] = {report.principal_direction.x(), report.principal_direction.y()};
  j["beta0_dynamic"] = report.beta0_dynamic;
  j["num_features"] = report.num_features;
  j["fallback"] = report.fallback;
  return j;
}

nlohmann::json to_json(const StageTimings& timings) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t s = 0; s < kStageCount; ++s) {
    j[std::string(to_string(static_cast<Stage>(s)))] = timings.ms[s];
  }
  return j;
}

nlohmann::json to_json(const IoUSummary& summary) {
  nlohmann::json j;
  j["mean_iou"] = summary.mean_iou;
  j["fraction_iou_ge_0_5"] = summary.fraction_above_half;
  j["evaluated_boxes"] = summary.per_box.size();
  j["skipped_boxes"] = summary.skipped_boxes;
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& b : summary.per_box) {
    boxes.push_back({{"box", b.box_index},
                     {"points", b.box_points},
                     {"best_cluster", b.best_cluster},
                     {"iou", b.iou}});
  }
  j["boxes"] = std::move(boxes);
  return j;
}

nlohmann::json frame_summary(const FrameResult& result) {
  nlohmann::json j;
  j["report"] = to_json(result.report);
  j["final_beta0"] = result.final_beta0;
  j["valid_pixels"] = result.image.valid_count();
  j["ground_points"] = result.ground_cloud.size();
  j["cleaned_points"] = result.cleaned_cloud.size();
  j["removed_points"] = result.removed_count;
  j["unprojected_points"] = result.unprojected_count;
  j["skeleton_points"] = result.skeleton.count();
  j["final_clusters"] = result.final_pass.num_clusters();
  j["timings_ms"] = to_json(result.timings);
  return j;
}

}  // namespace ambient::io
