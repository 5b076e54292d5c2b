#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "owc/geometry.hpp"

namespace owc {

/// A D-dimensional embedding of one point cloud. `source` names the producer
/// ("builtin" or a backend name) so mixed banks can be detected.
struct FeatureVector {
  std::vector<double> values;
  std::string source = "builtin";

  std::size_t dim() const noexcept { return values.size(); }
};

struct DescriptorConfig {
  std::size_t pair_bins = 64;    // pairwise distances over [0, 2]
  std::size_t radial_bins = 32;  // point radii over [0, 1]
  std::optional<std::size_t> max_pairs;
  std::uint64_t seed = 0;

  std::size_t dim() const noexcept { return pair_bins + radial_bins; }
};

/// Pair-distance (D2) histogram followed by a radial histogram, each
/// soft-binned by linear interpolation between bin nodes and L1-normalized.
///
/// Input is expected to be augmented (centered, unit radius). Both blocks
/// depend only on distances, so the result is invariant to rotation and, when
/// all pairs are used, bitwise invariant to point order: bin mass is
/// accumulated in 64-bit fixed point, which is associative.
FeatureVector builtin_descriptor(const PointCloud& cloud,
                                 const DescriptorConfig& cfg = {});

enum class TokenAxis {
  Columns,  // F x T matrix, reduce each row over its T columns
  Rows,     // T x F matrix, reduce each column over its T rows
};

/// Row-major dense matrix view for backend outputs.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Max-pool a matrix-valued feature over its token axis.
FeatureVector pool_matrix_feature(const MatrixView& matrix, TokenAxis axis,
                                  std::string source = "builtin");

}  // namespace owc
