#include "owc/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "owc/error.hpp"

namespace owc {

namespace {

// One unit of mass in fixed point. 2^32 per sample keeps the sum for the
// 523,776 pairs of a 1024-point cloud far below 2^64.
constexpr std::uint64_t kUnit = std::uint64_t{1} << 32;

class SoftHistogram {
 public:
  SoftHistogram(std::size_t bins, double range) : counts_(bins, 0), range_(range) {}

  void add(double value) {
    const std::size_t bins = counts_.size();
    if (bins == 1) {
      counts_[0] += kUnit;
      return;
    }
    double t = value / range_ * static_cast<double>(bins - 1);
    t = std::clamp(t, 0.0, static_cast<double>(bins - 1));
    auto lo = static_cast<std::size_t>(std::floor(t));
    if (lo >= bins - 1) {
      counts_[bins - 1] += kUnit;
      return;
    }
    const auto upper = static_cast<std::uint64_t>(
        std::llround((t - static_cast<double>(lo)) * static_cast<double>(kUnit)));
    counts_[lo] += kUnit - upper;
    counts_[lo + 1] += upper;
  }

  void append_normalized(std::vector<double>& out) const {
    std::uint64_t total = 0;
    for (auto c : counts_) total += c;
    const long double inv = 1.0L / static_cast<long double>(total);
    for (auto c : counts_) {
      out.push_back(static_cast<double>(static_cast<long double>(c) * inv));
    }
  }

 private:
  std::vector<std::uint64_t> counts_;
  double range_;
};

double distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

FeatureVector builtin_descriptor(const PointCloud& cloud,
                                 const DescriptorConfig& cfg) {
  if (cfg.pair_bins == 0 || cfg.radial_bins == 0) {
    throw Error(ErrorKind::Config, "descriptor bins must be positive");
  }
  if (cfg.max_pairs && *cfg.max_pairs == 0) {
    throw Error(ErrorKind::Config, "max_pairs must be positive when set");
  }
  const auto& pts = cloud.points();
  const std::size_t n = pts.size();
  if (n < 2) {
    throw Error(ErrorKind::DegenerateCloud,
                "descriptor needs at least 2 points (cloud '" + cloud.id() + "')");
  }

  SoftHistogram pairs(cfg.pair_bins, 2.0);
  const std::uint64_t all_pairs =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  if (!cfg.max_pairs || *cfg.max_pairs >= all_pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.add(distance(pts[i], pts[j]));
    }
  } else {
    std::mt19937_64 stream(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < *cfg.max_pairs; ++s) {
      std::size_t i = pick(stream);
      std::size_t j = pick(stream);
      while (j == i) j = pick(stream);
      pairs.add(distance(pts[i], pts[j]));
    }
  }

  SoftHistogram radii(cfg.radial_bins, 1.0);
  for (const auto& p : pts) radii.add(distance(p, {0.0, 0.0, 0.0}));

  FeatureVector out;
  out.values.reserve(cfg.dim());
  pairs.append_normalized(out.values);
  radii.append_normalized(out.values);
  return out;
}

FeatureVector pool_matrix_feature(const MatrixView& matrix, TokenAxis axis,
                                  std::string source) {
  if (matrix.rows == 0 || matrix.cols == 0 || matrix.data.empty()) {
    throw Error(ErrorKind::EmptyInput, "pool_matrix_feature: empty matrix");
  }
  if (matrix.data.size() != matrix.rows * matrix.cols) {
    throw Error(ErrorKind::Shape, "pool_matrix_feature: data length " +
                                      std::to_string(matrix.data.size()) +
                                      " does not match " + std::to_string(matrix.rows) +
                                      "x" + std::to_string(matrix.cols));
  }
  for (double v : matrix.data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Validation, "pool_matrix_feature: non-finite entry");
    }
  }

  FeatureVector out;
  out.source = std::move(source);
  const auto at = [&](std::size_t r, std::size_t c) {
    return matrix.data[r * matrix.cols + c];
  };
  if (axis == TokenAxis::Columns) {
    out.values.resize(matrix.rows);
    for (std::size_t r = 0; r < matrix.rows; ++r) {
      double best = at(r, 0);
      for (std::size_t c = 1; c < matrix.cols; ++c) best = std::max(best, at(r, c));
      out.values[r] = best;
    }
  } else {
    out.values.resize(matrix.cols);
    for (std::size_t c = 0; c < matrix.cols; ++c) {
      double best = at(0, c);
      for (std::size_t r = 1; r < matrix.rows; ++r) best = std::max(best, at(r, c));
      out.values[c] = best;
    }
  }
  return out;
}

}  // namespace owc
