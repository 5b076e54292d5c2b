#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace owc {

using Point3 = std::array<double, 3>;

/// An ordered set of 3-D points with identity and an optional category label.
///
/// Construction validates the invariants (non-empty, all coordinates finite);
/// the point order is meaningful and preserved by every operation that does
/// not explicitly resample.
class PointCloud {
 public:
  PointCloud(std::string id, std::vector<Point3> points,
             std::optional<std::string> label = std::nullopt);

  const std::string& id() const noexcept { return id_; }
  const std::vector<Point3>& points() const noexcept { return points_; }
  const std::optional<std::string>& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return points_.size(); }

  PointCloud with_points(std::vector<Point3> points) const;

 private:
  std::string id_;
  std::vector<Point3> points_;
  std::optional<std::string> label_;
};

/// Proper rotation (orthonormal, det +1).
struct RotationMatrix {
  std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  Point3 apply(const Point3& p) const noexcept;
  double determinant() const noexcept;
  static RotationMatrix identity() { return {}; }
};

struct AugmentConfig {
  std::size_t target_points = 1024;
  bool rotate = false;
  std::uint64_t seed = 0;
  // Pad by repeating the selection when the cloud has fewer points than
  // target_points instead of failing.
  bool pad = false;
};

struct FpsOptions {
  bool pad = false;
};

/// Greedy farthest point sampling. Returns k indices in selection order,
/// starting at `start`; ties go to the lowest index. With `pad` set and
/// k > N, all N points are selected and the sequence is extended by cycling
/// through the selection order.
std::vector<std::size_t> fps(const PointCloud& cloud, std::size_t k,
                             std::size_t start = 0, FpsOptions options = {});

/// (points - centroid) / max distance to centroid.
PointCloud center_and_scale(const PointCloud& cloud);

/// Uniform SO(3) sample from a normalized Gaussian quaternion.
RotationMatrix random_rotation(std::mt19937_64& stream);

PointCloud rotate(const PointCloud& cloud, const RotationMatrix& rotation);

/// fps(target_points, start 0) -> center_and_scale -> optional rotation
/// drawn from a stream seeded with cfg.seed.
PointCloud augment(const PointCloud& cloud, const AugmentConfig& cfg);

/// SplitMix64 mix of a base seed with a stream index; used to give every
/// sample of a run its own reproducible rotation.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

Point3 centroid(std::span<const Point3> points) noexcept;

}  // namespace owc
