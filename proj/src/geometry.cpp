#include "owc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "owc/error.hpp"

namespace owc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::InsufficientPoints: return "insufficient-points";
    case ErrorKind::DegenerateCloud: return "degenerate-cloud";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::ZeroVector: return "zero-vector";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Format: return "format";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Build: return "build";
    case ErrorKind::Merge: return "merge";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::Config: return "config";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

double squared_distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

PointCloud::PointCloud(std::string id, std::vector<Point3> points,
                       std::optional<std::string> label)
    : id_(std::move(id)), points_(std::move(points)), label_(std::move(label)) {
  if (points_.empty()) {
    throw Error(ErrorKind::EmptyInput, "point cloud '" + id_ + "' has no points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (double c : points_[i]) {
      if (!std::isfinite(c)) {
        throw Error(ErrorKind::Validation,
                    "point cloud '" + id_ + "': non-finite coordinate at point " +
                        std::to_string(i));
      }
    }
  }
}

PointCloud PointCloud::with_points(std::vector<Point3> points) const {
  return PointCloud(id_, std::move(points), label_);
}

Point3 RotationMatrix::apply(const Point3& p) const noexcept {
  Point3 out{};
  for (int r = 0; r < 3; ++r) {
    out[r] = m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2];
  }
  return out;
}

double RotationMatrix::determinant() const noexcept {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

std::vector<std::size_t> fps(const PointCloud& cloud, std::size_t k,
                             std::size_t start, FpsOptions options) {
  const auto& pts = cloud.points();
  const std::size_t n = pts.size();
  if (k == 0) {
    throw Error(ErrorKind::Config, "fps: k must be positive");
  }
  if (start >= n) {
    throw Error(ErrorKind::Config, "fps: start index " + std::to_string(start) +
                                       " out of range for " + std::to_string(n) +
                                       " points");
  }
  if (k > n && !options.pad) {
    throw Error(ErrorKind::InsufficientPoints,
                "fps: cloud '" + cloud.id() + "' has " + std::to_string(n) +
                    " points, " + std::to_string(k) + " requested");
  }

  const std::size_t take = std::min(k, n);
  std::vector<std::size_t> selected;
  selected.reserve(k);
  selected.push_back(start);

  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  min_dist[start] = -1.0;
  std::size_t last = start;
  while (selected.size() < take) {
    std::size_t best = n;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_dist[i] < 0.0) continue;
      const double d = squared_distance(pts[i], pts[last]);
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    selected.push_back(best);
    min_dist[best] = -1.0;
    last = best;
  }

  for (std::size_t i = 0; selected.size() < k; ++i) {
    selected.push_back(selected[i % take]);
  }
  return selected;
}

Point3 centroid(std::span<const Point3> points) noexcept {
  Point3 sum{0.0, 0.0, 0.0};
  for (const auto& p : points) {
    sum[0] += p[0];
    sum[1] += p[1];
    sum[2] += p[2];
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  return {sum[0] * inv, sum[1] * inv, sum[2] * inv};
}

namespace {

// Rounding in the division (or a later rotation) can leave the farthest point
// an ulp outside the unit sphere; shrink until every norm is <= 1.
void shrink_into_unit_ball(std::vector<Point3>& pts) {
  for (int guard = 0; guard < 8; ++guard) {
    double max_sq = 0.0;
    for (const auto& p : pts) max_sq = std::max(max_sq, squared_distance(p, {0.0, 0.0, 0.0}));
    if (std::sqrt(max_sq) <= 1.0) return;
    const double shrink = 1.0 - std::numeric_limits<double>::epsilon();
    for (auto& p : pts) {
      for (double& c : p) c *= shrink;
    }
  }
}

}  // namespace

PointCloud center_and_scale(const PointCloud& cloud) {
  const auto& pts = cloud.points();
  if (pts.size() < 2) {
    throw Error(ErrorKind::DegenerateCloud,
                "cloud '" + cloud.id() + "' needs at least 2 points to normalize");
  }
  const Point3 c = centroid(pts);
  std::vector<Point3> shifted(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    shifted[i] = {pts[i][0] - c[0], pts[i][1] - c[1], pts[i][2] - c[2]};
  }
  // Second pass removes the residual mean left by rounding in the first.
  const Point3 residual = centroid(shifted);
  double max_sq = 0.0;
  for (auto& p : shifted) {
    for (int a = 0; a < 3; ++a) p[a] -= residual[a];
    max_sq = std::max(max_sq, squared_distance(p, {0.0, 0.0, 0.0}));
  }
  const double radius = std::sqrt(max_sq);
  if (!(radius > 0.0)) {
    throw Error(ErrorKind::DegenerateCloud,
                "cloud '" + cloud.id() + "' has zero spread (all points coincide)");
  }
  for (auto& p : shifted) {
    for (double& v : p) v /= radius;
  }
  shrink_into_unit_ball(shifted);
  return cloud.with_points(std::move(shifted));
}

RotationMatrix random_rotation(std::mt19937_64& stream) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double w = 0, x = 0, y = 0, z = 0, norm = 0;
  do {
    w = gauss(stream);
    x = gauss(stream);
    y = gauss(stream);
    z = gauss(stream);
    norm = std::sqrt(w * w + x * x + y * y + z * z);
  } while (norm < 1e-12);
  w /= norm;
  x /= norm;
  y /= norm;
  z /= norm;

  RotationMatrix r;
  r.m = {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
          {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
          {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
  return r;
}

PointCloud rotate(const PointCloud& cloud, const RotationMatrix& rotation) {
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points()) out.push_back(rotation.apply(p));
  return cloud.with_points(std::move(out));
}

PointCloud augment(const PointCloud& cloud, const AugmentConfig& cfg) {
  if (cfg.target_points == 0) {
    throw Error(ErrorKind::Config, "augment: target_points must be >= 1");
  }
  const auto order = fps(cloud, cfg.target_points, 0, FpsOptions{cfg.pad});
  std::vector<Point3> sampled;
  sampled.reserve(order.size());
  for (std::size_t i : order) sampled.push_back(cloud.points()[i]);

  PointCloud normalized = center_and_scale(cloud.with_points(std::move(sampled)));
  if (!cfg.rotate) return normalized;

  std::mt19937_64 stream(cfg.seed);
  PointCloud rotated = rotate(normalized, random_rotation(stream));
  std::vector<Point3> pts = rotated.points();
  shrink_into_unit_ball(pts);
  return rotated.with_points(std::move(pts));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace owc
