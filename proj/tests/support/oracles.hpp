#ifndef AMBIENT_TESTS_ORACLES_HPP
#define AMBIENT_TESTS_ORACLES_HPP

// Reference implementations used to check the library. They share no code
// with src/ beyond reading sensor geometry and image contents.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "ambient/clustering.hpp"
#include "ambient/core.hpp"
#include "ambient/ground_filter.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline Eigen::Vector3d unit_from_angles(double elevation_deg, double azimuth_deg) {
  const double e = deg2rad(elevation_deg);
  const double a = deg2rad(azimuth_deg);
  return {std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
}

// Beam through the center of pixel (row, col), rebuilt from the ring table.
inline Eigen::Vector3d beam(const ambient::SensorModel& s, int row, int col) {
  const double az = (col + 0.5) * 360.0 / s.num_cols();
  return unit_from_angles(s.ring_elevations()[static_cast<std::size_t>(row)], az);
}

// Angle between two directions via atan2(|u x v|, u . v), degrees.
inline double angle_between_deg(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  return rad2deg(std::atan2(u.cross(v).norm(), u.dot(v)));
}

inline double beam_angle_deg(const ambient::SensorModel& s, ambient::PixelCoord a,
                             ambient::PixelCoord b) {
  return angle_between_deg(beam(s, a.row, a.col), beam(s, b.row, b.col));
}

// Angle criterion evaluated directly: far side is OA.
inline double beta_deg(double d1, double d2, double alpha_deg) {
  const double oa = std::max(d1, d2);
  const double ob = std::min(d1, d2);
  const double a = deg2rad(alpha_deg);
  return rad2deg(std::atan2(ob * std::sin(a), oa - ob * std::cos(a)));
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const std::size_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Component id per pixel (-1 where not eligible), from union-find roots.
using Partition = std::vector<long>;

inline bool eligible(const ambient::RangeImage& img, const ambient::GroundMask& ground,
                     std::size_t i) {
  return img.depths()[i] > 0.0 && (ground.empty() || !ground(i));
}

inline Partition finish(const ambient::RangeImage& img, const ambient::GroundMask& ground,
                        UnionFind& uf) {
  Partition out(img.size(), -1);
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (eligible(img, ground, i)) out[i] = static_cast<long>(uf.find(i));
  }
  return out;
}

inline std::size_t flat(const ambient::RangeImage& img, int r, int c) {
  const int cols = img.cols();
  const int wc = ((c % cols) + cols) % cols;
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(wc);
}

// Depth clustering: every 4-adjacent pair (azimuth wraps) tested with the
// closed-form beta.
inline Partition depth_partition(const ambient::RangeImage& img, const ambient::GroundMask& ground,
                                 double beta0_deg) {
  UnionFind uf(img.size());
  const auto& s = img.sensor();
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      const std::size_t a = flat(img, r, c);
      if (!eligible(img, ground, a)) continue;
      const std::array<std::array<int, 2>, 2> steps{{{0, 1}, {1, 0}}};
      for (const auto& st : steps) {
        const int nr = r + st[0];
        if (nr >= img.rows()) continue;
        const std::size_t b = flat(img, nr, c + st[1]);
        if (b == a || !eligible(img, ground, b)) continue;
        const double alpha =
            beam_angle_deg(s, {r, c}, {nr, static_cast<int>(b % static_cast<std::size_t>(img.cols()))});
        if (beta_deg(img.depths()[a], img.depths()[b], alpha) > beta0_deg) uf.unite(a, b);
      }
    }
  }
  return finish(img, ground, uf);
}

// Adaptive Euclidean clustering: every pixel pair inside the window, distance
// against gamma * sin(alpha) * min depth.
inline Partition euclid_partition(const ambient::RangeImage& img, const ambient::GroundMask& ground,
                                  double gamma, int window) {
  UnionFind uf(img.size());
  const auto& s = img.sensor();
  const auto pts = img.points();
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      const std::size_t a = flat(img, r, c);
      if (!eligible(img, ground, a)) continue;
      for (int nr = std::max(0, r - window); nr <= std::min(img.rows() - 1, r + window); ++nr) {
        for (int dc = -window; dc <= window; ++dc) {
          const std::size_t b = flat(img, nr, c + dc);
          if (b == a || !eligible(img, ground, b)) continue;
          const int bc = static_cast<int>(b % static_cast<std::size_t>(img.cols()));
          const double alpha = deg2rad(beam_angle_deg(s, {r, c}, {nr, bc}));
          const double d0 = gamma * std::sin(alpha) * std::min(img.depths()[a], img.depths()[b]);
          const Eigen::Vector3d pa(pts[a].x, pts[a].y, pts[a].z);
          const Eigen::Vector3d pb(pts[b].x, pts[b].y, pts[b].z);
          if ((pa - pb).norm() < d0) uf.unite(a, b);
        }
      }
    }
  }
  return finish(img, ground, uf);
}

// Whether a labeling equals an oracle partition up to relabeling.
inline bool same_partition(const ambient::ClusterLabeling& labeling, const Partition& ref) {
  if (labeling.labels().size() != ref.size()) return false;
  std::map<long, long> fwd;
  std::map<long, long> bwd;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const long got = labeling.label(i);
    const long want = ref[i];
    if ((got == 0) != (want < 0)) return false;
    if (want < 0) continue;
    const auto [f, f_new] = fwd.emplace(want, got);
    if (!f_new && f->second != got) return false;
    const auto [b, b_new] = bwd.emplace(got, want);
    if (!b_new && b->second != want) return false;
  }
  return true;
}

// Whether every cluster of `fine` sits inside one cluster of `coarse`.
inline bool refines(const ambient::ClusterLabeling& fine, const ambient::ClusterLabeling& coarse) {
  std::map<long, long> owner;
  for (std::size_t i = 0; i < fine.labels().size(); ++i) {
    const long f = fine.label(i);
    if (f == 0) continue;
    const long c = coarse.label(i);
    if (c == 0) return false;
    const auto [it, inserted] = owner.emplace(f, c);
    if (!inserted && it->second != c) return false;
  }
  return true;
}

// Cyclic Jacobi eigen-solver for a symmetric 3x3 matrix, long double.
struct Eigen3 {
  std::array<long double, 3> values{};
  std::array<std::array<long double, 3>, 3> vectors{};  // columns
};

inline Eigen3 jacobi3(const Eigen::Matrix3d& m) {
  long double a[3][3];
  long double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-60L) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::fabs(a[p][q]) < 1e-300L) continue;
        const long double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const long double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const long double c = 1 / std::sqrt(t * t + 1);
        const long double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const long double akp = a[k][p];
          const long double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const long double apk = a[p][k];
          const long double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const long double vkp = v[k][p];
          const long double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  Eigen3 out;
  for (int i = 0; i < 3; ++i) {
    out.values[static_cast<std::size_t>(i)] = a[i][i];
    for (int k = 0; k < 3; ++k) out.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = v[k][i];
  }
  return out;
}

// Smallest-eigenvalue direction of the (1/N) covariance, unoriented.
inline Eigen::Vector3d plane_normal(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());
  const Eigen3 e = jacobi3(cov);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (e.values[i] < e.values[best]) best = i;
  }
  Eigen::Vector3d n(static_cast<double>(e.vectors[0][best]), static_cast<double>(e.vectors[1][best]),
                    static_cast<double>(e.vectors[2][best]));
  return n.normalized();
}

// Angle between two lines (sign ignored), radians.
inline double line_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

// k from weighted horizontal vectors, with the major axis found by a fine
// sweep over directions instead of an eigen-decomposition.
inline double anisotropy_by_sweep(const std::vector<Eigen::Vector2d>& v, int steps = 20000) {
  double best_moment = -1.0;
  double best_theta = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double theta = kPi * i / steps;
    const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    double m = 0.0;
    for (const auto& x : v) m += x.dot(u) * x.dot(u);
    if (m > best_moment) {
      best_moment = m;
      best_theta = theta;
    }
  }
  const Eigen::Vector2d major(std::cos(best_theta), std::sin(best_theta));
  const Eigen::Vector2d minor(-major.y(), major.x());
  double along = 0.0;
  double across = 0.0;
  for (const auto& x : v) {
    along += std::abs(x.dot(major));
    across += std::abs(x.dot(minor));
  }
  return across == 0.0 ? INFINITY : std::max(1.0, along / across);
}

}  // namespace oracle

#endif  // AMBIENT_TESTS_ORACLES_HPP
