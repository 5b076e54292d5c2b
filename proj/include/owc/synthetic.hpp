#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "owc/geometry.hpp"

namespace owc::synthetic {

// Analytic test shapes, sampled uniformly over their surfaces.
enum class Shape { Sphere, Box, Cylinder, Torus, Table };

const std::vector<Shape>& all_shapes();
std::string shape_name(Shape shape);

/// `n` surface points plus isotropic Gaussian noise of std `noise`.
PointCloud sample_shape(Shape shape, std::size_t n, double noise, std::mt19937_64& rng,
                        std::string id, std::string label);

struct BenchmarkConfig {
  std::size_t anchors_per_class = 7;
  std::size_t tests_per_class = 50;
  std::size_t points_per_cloud = 1536;
  double noise = 0.02;
  std::uint64_t seed = 2024;
};

struct Benchmark {
  std::vector<std::string> categories;
  std::vector<PointCloud> anchors;  // grouped by category, labeled
  std::vector<PointCloud> tests;    // aligned pose, labeled
};

/// Anchors and test samples are drawn from independent streams derived from
/// cfg.seed; the same config always yields the same clouds.
Benchmark make_benchmark(const BenchmarkConfig& cfg);

/// Each test cloud under its own uniform random rotation (open pose).
std::vector<PointCloud> rotate_all(const std::vector<PointCloud>& clouds, std::uint64_t seed);

}  // namespace owc::synthetic
