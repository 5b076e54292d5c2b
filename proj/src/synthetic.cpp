#include "owc/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "owc/error.hpp"

namespace owc::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rect {
  Point3 origin;
  Point3 u;  // edge vectors
  Point3 v;
  double area() const {
    const double cu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    const double cv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return cu * cv;  // edges are orthogonal
  }
  Point3 at(double s, double t) const {
    return {origin[0] + s * u[0] + t * v[0], origin[1] + s * u[1] + t * v[1],
            origin[2] + s * u[2] + t * v[2]};
  }
};

Point3 sample_rects(const std::vector<Rect>& rects, std::mt19937_64& rng) {
  std::vector<double> weights;
  for (const auto& r : rects) weights.push_back(r.area());
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& r = rects[pick(rng)];
  return r.at(unit(rng), unit(rng));
}

std::vector<Rect> box_faces(double w, double d, double h, double z0) {
  const double x0 = -w / 2, y0 = -d / 2;
  return {
      {{x0, y0, z0}, {w, 0, 0}, {0, d, 0}},      {{x0, y0, z0 + h}, {w, 0, 0}, {0, d, 0}},
      {{x0, y0, z0}, {w, 0, 0}, {0, 0, h}},      {{x0, y0 + d, z0}, {w, 0, 0}, {0, 0, h}},
      {{x0, y0, z0}, {0, d, 0}, {0, 0, h}},      {{x0 + w, y0, z0}, {0, d, 0}, {0, 0, h}},
  };
}

Point3 surface_point(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  switch (shape) {
    case Shape::Sphere: {
      double x, y, z, n;
      do {
        x = gauss(rng);
        y = gauss(rng);
        z = gauss(rng);
        n = std::sqrt(x * x + y * y + z * z);
      } while (n < 1e-12);
      return {x / n, y / n, z / n};
    }
    case Shape::Box: {
      static const std::vector<Rect> faces = box_faces(2.0, 1.2, 0.8, -0.4);
      return sample_rects(faces, rng);
    }
    case Shape::Cylinder: {
      constexpr double r = 0.5, h = 2.0;
      const double side = 2 * kPi * r * h;
      const double caps = 2 * kPi * r * r;
      const double theta = 2 * kPi * unit(rng);
      if (unit(rng) * (side + caps) < side) {
        return {r * std::cos(theta), r * std::sin(theta), h * (unit(rng) - 0.5)};
      }
      const double rho = r * std::sqrt(unit(rng));
      const double z = unit(rng) < 0.5 ? -h / 2 : h / 2;
      return {rho * std::cos(theta), rho * std::sin(theta), z};
    }
    case Shape::Torus: {
      constexpr double big = 1.0, small = 0.3;
      double phi;
      // Area element is proportional to (big + small cos phi).
      do {
        phi = 2 * kPi * unit(rng);
      } while (unit(rng) * (big + small) > big + small * std::cos(phi));
      const double theta = 2 * kPi * unit(rng);
      const double ring = big + small * std::cos(phi);
      return {ring * std::cos(theta), ring * std::sin(theta), small * std::sin(phi)};
    }
    case Shape::Table: {
      static const std::vector<Rect> planes = {
          {{-1.0, -0.6, 0.75}, {2.0, 0, 0}, {0, 1.2, 0}},
          {{-0.8, -0.45, -0.75}, {1.6, 0, 0}, {0, 0.9, 0}},
      };
      return sample_rects(planes, rng);
    }
  }
  throw Error(ErrorKind::Config, "unknown shape");
}

}  // namespace

const std::vector<Shape>& all_shapes() {
  static const std::vector<Shape> shapes = {Shape::Sphere, Shape::Box, Shape::Cylinder,
                                            Shape::Torus, Shape::Table};
  return shapes;
}

std::string shape_name(Shape shape) {
  switch (shape) {
    case Shape::Sphere: return "sphere";
    case Shape::Box: return "box";
    case Shape::Cylinder: return "cylinder";
    case Shape::Torus: return "torus";
    case Shape::Table: return "table";
  }
  return "unknown";
}

PointCloud sample_shape(Shape shape, std::size_t n, double noise, std::mt19937_64& rng,
                        std::string id, std::string label) {
  std::normal_distribution<double> gauss(0.0, noise > 0 ? noise : 1.0);
  std::vector<Point3> pts(n);
  for (auto& p : pts) {
    p = surface_point(shape, rng);
    if (noise > 0) {
      for (double& c : p) c += gauss(rng);
    }
  }
  return PointCloud(std::move(id), std::move(pts), std::move(label));
}

Benchmark make_benchmark(const BenchmarkConfig& cfg) {
  Benchmark out;
  std::mt19937_64 anchor_rng(derive_seed(cfg.seed, 0));
  std::mt19937_64 test_rng(derive_seed(cfg.seed, 1));
  for (Shape s : all_shapes()) {
    const std::string name = shape_name(s);
    out.categories.push_back(name);
    for (std::size_t j = 0; j < cfg.anchors_per_class; ++j) {
      out.anchors.push_back(sample_shape(s, cfg.points_per_cloud, cfg.noise, anchor_rng,
                                         name + "/anchor" + std::to_string(j), name));
    }
    for (std::size_t j = 0; j < cfg.tests_per_class; ++j) {
      out.tests.push_back(sample_shape(s, cfg.points_per_cloud, cfg.noise, test_rng,
                                       name + "/test" + std::to_string(j), name));
    }
  }
  return out;
}

std::vector<PointCloud> rotate_all(const std::vector<PointCloud>& clouds, std::uint64_t seed) {
  std::vector<PointCloud> out;
  out.reserve(clouds.size());
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    std::mt19937_64 stream(derive_seed(seed, i));
    out.push_back(rotate(clouds[i], random_rotation(stream)));
  }
  return out;
}

}  // namespace owc::synthetic
