#include "ambient/clustering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ambient {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr ClusterLabeling::Label kIneligible = -1;

struct Offset {
  int dr;
  int dc;
};

void check_aligned(const RangeImage& img, const GroundMask& ground) {
  if (!ground.empty() && (ground.rows() != img.rows() || ground.cols() != img.cols())) {
    throw Error(ErrorCode::ShapeMismatch, "ground mask does not match the range image");
  }
}

std::vector<Offset> window_offsets(int cols, int window) {
  std::vector<Offset> out;
  const auto dcs = window_column_offsets(cols, window);
  for (int dr = -window; dr <= window; ++dr) {
    for (int dc : dcs) {
      if (dr == 0 && dc == 0) continue;
      out.push_back({dr, dc});
    }
  }
  return out;
}

}  // namespace

class LabelingBuilder {
 public:
  static ClusterLabeling make(int rows, int cols, ClusterMethodInfo info,
                              std::vector<ClusterLabeling::Label> labels,
                              std::vector<std::size_t> sizes) {
    ClusterLabeling out;
    out.rows_ = rows;
    out.cols_ = cols;
    out.method_ = info;
    out.labels_ = std::move(labels);
    out.sizes_ = std::move(sizes);
    return out;
  }

  /// BFS flood fill. `accept(from, to, k, row)` decides the edge from `from`
  /// (in `row`) along offsets[k]; ineligible pixels (empty or ground) are never
  /// visited.
  template <class Accept>
  static ClusterLabeling flood_fill(const RangeImage& img, const GroundMask& ground,
                                    std::span<const Offset> offsets, ClusterMethodInfo info,
                                    Accept&& accept) {
    check_aligned(img, ground);
    const int rows = img.rows();
    const int cols = img.cols();
    const auto depths = img.depths();
    std::vector<ClusterLabeling::Label> labels(img.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!(depths[i] > 0.0) || (!ground.empty() && ground(i))) labels[i] = kIneligible;
    }

    int reach = 0;
    std::vector<std::ptrdiff_t> linear(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      reach = std::max(reach, std::abs(offsets[k].dc));
      linear[k] = static_cast<std::ptrdiff_t>(offsets[k].dr) * cols + offsets[k].dc;
    }
    // Offsets are sorted by row step, so the in-bounds ones for a row form a
    // contiguous range.
    std::vector<std::pair<std::size_t, std::size_t>> row_range(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      std::size_t lo = 0;
      while (lo < offsets.size() && r + offsets[lo].dr < 0) ++lo;
      std::size_t hi = lo;
      while (hi < offsets.size() && r + offsets[hi].dr < rows) ++hi;
      row_range[static_cast<std::size_t>(r)] = {lo, hi};
    }

    std::vector<std::size_t> sizes{0};
    std::vector<std::uint32_t> queue;
    queue.reserve(img.size());
    ClusterLabeling::Label next = 1;

    for (std::size_t seed = 0; seed < labels.size(); ++seed) {
      if (labels[seed] != 0) continue;
      labels[seed] = next;
      queue.clear();
      queue.push_back(static_cast<std::uint32_t>(seed));
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t cur = queue[head];
        const int r = static_cast<int>(cur / static_cast<std::size_t>(cols));
        const int c = static_cast<int>(cur - static_cast<std::size_t>(r) * static_cast<std::size_t>(cols));
        const auto [k_lo, k_hi] = row_range[static_cast<std::size_t>(r)];
        const auto visit = [&](std::size_t k, std::size_t nb) {
          if (labels[nb] != 0 || !accept(cur, nb, k, r)) return;
          labels[nb] = next;
          queue.push_back(static_cast<std::uint32_t>(nb));
        };
        if (c >= reach && c < cols - reach) {
          for (std::size_t k = k_lo; k < k_hi; ++k) {
            visit(k, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cur) + linear[k]));
          }
        } else {
          for (std::size_t k = k_lo; k < k_hi; ++k) {
            int nc = c + offsets[k].dc;
            if (nc < 0) {
              nc += cols;
            } else if (nc >= cols) {
              nc -= cols;
            }
            visit(k, static_cast<std::size_t>(r + offsets[k].dr) * static_cast<std::size_t>(cols) +
                         static_cast<std::size_t>(nc));
          }
        }
      }
      sizes.push_back(queue.size());
      ++next;
    }
    for (auto& l : labels) {
      if (l == kIneligible) l = 0;
    }
    return make(rows, cols, info, std::move(labels), std::move(sizes));
  }
};

namespace {

// Per (row, offset) values of a BeamAngleTable laid out for the flood fill.
template <class F>
std::vector<double> per_row_table(const RangeImage& img, std::span<const Offset> offsets,
                                  const BeamAngleTable& table, F&& value) {
  const std::size_t k_count = offsets.size();
  std::vector<double> out(static_cast<std::size_t>(img.rows()) * k_count, 0.0);
  for (int r = 0; r < img.rows(); ++r) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const int nr = r + offsets[k].dr;
      if (nr < 0 || nr >= img.rows()) continue;
      out[static_cast<std::size_t>(r) * k_count + k] = value(table, r, offsets[k].dr, offsets[k].dc);
    }
  }
  return out;
}

}  // namespace

std::string to_string(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::Depth: return "depth";
    case ClusterMethod::AdaptiveEuclidean: return "adaptive-euclidean";
    case ClusterMethod::FixedEuclidean: return "fixed-euclidean";
    case ClusterMethod::External: return "external";
  }
  return "unknown";
}

ClusterLabeling::ClusterLabeling(int rows, int cols, ClusterMethodInfo method)
    : rows_(rows),
      cols_(cols),
      method_(method),
      labels_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {}

ClusterLabeling ClusterLabeling::from_labels(int rows, int cols, std::vector<Label> labels,
                                             ClusterMethodInfo method) {
  if (labels.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::ShapeMismatch, "label grid size does not match rows x cols");
  }
  Label max_id = 0;
  for (Label l : labels) {
    if (l < 0) throw Error(ErrorCode::InvalidInput, "negative cluster id");
    max_id = std::max(max_id, l);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(max_id) + 1, 0);
  for (Label l : labels) {
    if (l > 0) ++sizes[static_cast<std::size_t>(l)];
  }
  return LabelingBuilder::make(rows, cols, method, std::move(labels), std::move(sizes));
}

std::size_t ClusterLabeling::cluster_size(Label id) const noexcept {
  if (id <= 0 || static_cast<std::size_t>(id) >= sizes_.size()) return 0;
  return sizes_[static_cast<std::size_t>(id)];
}

std::size_t ClusterLabeling::num_clusters() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(sizes_.begin() + 1, sizes_.end(), [](std::size_t s) { return s > 0; }));
}

std::size_t ClusterLabeling::labeled_count() const noexcept {
  std::size_t total = 0;
  for (std::size_t i = 1; i < sizes_.size(); ++i) total += sizes_[i];
  return total;
}

double beta(double depth_a, double depth_b, double alpha_deg) {
  if (!(depth_a > 0.0) || !(depth_b > 0.0)) {
    throw Error(ErrorCode::InvalidDepth, "depths must be positive");
  }
  if (!(alpha_deg > 0.0)) throw Error(ErrorCode::InvalidInput, "alpha must be positive");
  const double far = std::max(depth_a, depth_b);
  const double near = std::min(depth_a, depth_b);
  const double alpha = alpha_deg * kDegToRad;
  const double s_half = std::sin(0.5 * alpha);
  // far - near cos(alpha), rewritten to avoid cancellation at small alpha.
  const double denominator = (far - near) + near * 2.0 * s_half * s_half;
  return std::atan2(near * std::sin(alpha), denominator) * kRadToDeg;
}

double adaptive_threshold(double depth_b, double alpha_deg, double gamma) {
  if (!(depth_b > 0.0)) throw Error(ErrorCode::InvalidDepth, "depth must be positive");
  return gamma * std::sin(alpha_deg * kDegToRad) * depth_b;
}

bool depth_edge_accepted(double depth_a, double depth_b, double sin_alpha,
                         double one_minus_cos_alpha, double tan_beta0) noexcept {
  const double far = std::max(depth_a, depth_b);
  const double near = std::min(depth_a, depth_b);
  const double numerator = near * sin_alpha;
  const double denominator = (far - near) + near * one_minus_cos_alpha;
  // beta >= 90 deg whenever the denominator is not positive.
  return denominator <= 0.0 || numerator > denominator * tan_beta0;
}

ClusterLabeling depth_cluster(const RangeImage& img, const GroundMask& ground,
                              const DepthClusterParams& params) {
  if (!(params.beta0_deg > 0.0 && params.beta0_deg < 90.0)) {
    throw Error(ErrorCode::InvalidInput, "beta0 must lie in (0, 90) degrees");
  }
  const BeamAngleTable table(img.sensor(), 1);
  const double tan_beta0 = std::tan(params.beta0_deg * kDegToRad);
  static constexpr std::array<Offset, 4> kFour{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
  const auto sin_alpha = per_row_table(img, kFour, table, [](const BeamAngleTable& t, int r, int dr, int dc) {
    return t.sin_angle(r, dr, dc);
  });
  const auto one_minus_cos = per_row_table(
      img, kFour, table,
      [](const BeamAngleTable& t, int r, int dr, int dc) { return t.one_minus_cos(r, dr, dc); });
  const auto depths = img.depths();

  ClusterMethodInfo info{ClusterMethod::Depth, params.beta0_deg, 0.0, 0.0, 1};
  return LabelingBuilder::flood_fill(
      img, ground, kFour, info, [&](std::size_t from, std::size_t to, std::size_t k, int row) {
        const std::size_t slot = static_cast<std::size_t>(row) * kFour.size() + k;
        return depth_edge_accepted(depths[from], depths[to], sin_alpha[slot], one_minus_cos[slot],
                                   tan_beta0);
      });
}

ClusterLabeling euclidean_cluster(const RangeImage& img, const GroundMask& ground,
                                  const EuclideanClusterParams& params) {
  if (!(params.gamma >= 1.0)) throw Error(ErrorCode::InvalidInput, "gamma must be >= 1");
  if (params.window < 1) throw Error(ErrorCode::InvalidInput, "window must be >= 1");
  const BeamAngleTable table(img.sensor(), params.window);
  const auto offsets = window_offsets(img.cols(), params.window);
  const double gamma = params.gamma;
  const auto reach = per_row_table(img, offsets, table,
                                   [gamma](const BeamAngleTable& t, int r, int dr, int dc) {
                                     return gamma * t.sin_angle(r, dr, dc);
                                   });
  const std::size_t k_count = offsets.size();
  struct Packed {
    double x, y, z, depth;
  };
  std::vector<Packed> packed(img.size());
  {
    const auto depths = img.depths();
    const auto points = img.points();
    for (std::size_t i = 0; i < packed.size(); ++i) {
      packed[i] = {points[i].x, points[i].y, points[i].z, depths[i]};
    }
  }

  ClusterMethodInfo info{ClusterMethod::AdaptiveEuclidean, 0.0, gamma, 0.0, params.window};
  return LabelingBuilder::flood_fill(
      img, ground, offsets, info, [&](std::size_t from, std::size_t to, std::size_t k, int row) {
        const Packed& a = packed[from];
        const Packed& b = packed[to];
        const double d0 = reach[static_cast<std::size_t>(row) * k_count + k] * std::min(a.depth, b.depth);
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        const double dz = a.z - b.z;
        return dx * dx + dy * dy + dz * dz < d0 * d0;
      });
}

ClusterLabeling fixed_euclidean_cluster(const RangeImage& img, const GroundMask& ground,
                                        const FixedEuclideanParams& params) {
  if (!(params.eps > 0.0)) throw Error(ErrorCode::InvalidInput, "eps must be positive");
  if (params.window < 1) throw Error(ErrorCode::InvalidInput, "window must be >= 1");
  const auto offsets = window_offsets(img.cols(), params.window);
  const auto points = img.points();
  const double eps2 = params.eps * params.eps;

  ClusterMethodInfo info{ClusterMethod::FixedEuclidean, 0.0, 0.0, params.eps, params.window};
  return LabelingBuilder::flood_fill(img, ground, offsets, info,
                                     [&](std::size_t from, std::size_t to, std::size_t, int) {
                                       const Point& a = points[from];
                                       const Point& b = points[to];
                                       const double dx = a.x - b.x;
                                       const double dy = a.y - b.y;
                                       const double dz = a.z - b.z;
                                       return dx * dx + dy * dy + dz * dz < eps2;
                                     });
}

ClusterLabeling filter_small_clusters(const ClusterLabeling& labeling, std::size_t min_size) {
  ClusterLabeling out = labeling;
  bool any_removed = false;
  for (std::size_t id = 1; id < out.sizes_.size(); ++id) {
    if (out.sizes_[id] > 0 && out.sizes_[id] < min_size) {
      out.sizes_[id] = 0;
      any_removed = true;
    }
  }
  if (!any_removed) return out;
  for (auto& l : out.labels_) {
    if (l > 0 && out.sizes_[static_cast<std::size_t>(l)] == 0) l = 0;
  }
  return out;
}

}  // namespace ambient
