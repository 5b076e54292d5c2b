// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if
// any core criterion fails; the backend protocol line is informational.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "owc/backend.hpp"
#include "owc/classifier.hpp"
#include "owc/descriptor.hpp"
#include "owc/evaluation.hpp"
#include "owc/formats.hpp"
#include "owc/geometry.hpp"
#include "owc/synthetic.hpp"

using namespace owc;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, bool core, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass && core) ++failures;
  std::printf("%s %-22s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FeatureVector fv(std::vector<double> v) { return FeatureVector{std::move(v), "random"}; }

// ---------------------------------------------------------------------------

Outcome fps_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::size_t checks = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng() % 64;
    const auto pts = oracle::random_points(rng, n);
    const PointCloud cloud("c", pts);
    for (std::size_t k = 1; k <= n; ++k, ++checks) {
      if (fps(cloud, k, 0) != oracle::fps(pts, k, 0)) {
        return {false, fmt("mismatch on cloud %d (N=%zu, k=%zu)", c, n, k)};
      }
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 10.0, fmt("%zu (cloud, k) pairs identical, %.2f s (limit 10 s)", checks, secs)};
}

double max_norm(const PointCloud& c) {
  double m = 0;
  for (const auto& p : c.points()) m = std::max(m, std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  return m;
}

Outcome augmentation() {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> shift(-50, 50);
  double worst_centroid = 0, min_r = 2, max_r = 0;
  bool deterministic = true;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 64 + rng() % 2000;
    auto pts = oracle::random_points(rng, n, std::exp(shift(rng) / 10));
    const double dx = shift(rng), dy = shift(rng), dz = shift(rng);
    for (auto& p : pts) p = {p[0] + dx, p[1] + dy, p[2] + dz};
    const PointCloud cloud("c", pts);
    const std::size_t k = std::min<std::size_t>(n, 1024);
    const auto out = augment(cloud, AugmentConfig{k, i % 2 == 0, static_cast<std::uint64_t>(i), false});
    const auto c = centroid(out.points());
    worst_centroid = std::max({worst_centroid, std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
    const double r = max_norm(out);
    min_r = std::min(min_r, r);
    max_r = std::max(max_r, r);
    if (i % 2 == 1) {
      deterministic = deterministic && out.points() == augment(cloud, AugmentConfig{k, false, 0, false}).points();
    }
  }
  const bool ok = worst_centroid <= 1e-7 && min_r >= 1 - 1e-7 && max_r <= 1.0 && deterministic;
  return {ok, fmt("centroid inf-norm %.2e (<=1e-7), radius [%.12f, %.12f], rerun %s", worst_centroid,
                  min_r, max_r, deterministic ? "bitwise equal" : "DIFFERS")};
}

Outcome rotation_invariance() {
  std::mt19937_64 rng(3003);
  double worst = 0;
  for (int c = 0; c < 100; ++c) {
    const auto cloud = augment(PointCloud("c", oracle::random_points(rng, 1200)),
                               AugmentConfig{1024, false, 0, false});
    const auto base = builtin_descriptor(cloud).values;
    for (int r = 0; r < 10; ++r) {
      const auto turned = builtin_descriptor(rotate(cloud, random_rotation(rng))).values;
      double s = 0;
      for (std::size_t i = 0; i < base.size(); ++i) s += (base[i] - turned[i]) * (base[i] - turned[i]);
      worst = std::max(worst, std::sqrt(s));
    }
  }
  return {worst <= 1e-6, fmt("max L2 deviation %.2e over 1000 rotations (<=1e-6)", worst)};
}

Outcome classifier_oracle() {
  std::mt19937_64 rng(4004);
  std::normal_distribution<double> g;
  std::lognormal_distribution<double> scale(0.0, 3.0);
  auto random_bank = [&](std::size_t dim) {
    std::vector<std::vector<std::vector<double>>> raw(1 + rng() % 8);
    for (auto& cat : raw) {
      cat.resize(1 + rng() % 7);
      for (auto& a : cat) {
        a.resize(dim);
        for (double& x : a) x = g(rng);
      }
    }
    return raw;
  };
  auto to_bank = [](const std::vector<std::vector<std::vector<double>>>& raw) {
    std::vector<Category> cats;
    for (std::size_t c = 0; c < raw.size(); ++c) {
      Category cat{"c" + std::to_string(c), {}};
      for (const auto& a : raw[c]) cat.anchors.push_back({fv(a), {}});
      cats.push_back(std::move(cat));
    }
    return AnchorBank(std::move(cats));
  };
  for (int t = 0; t < 500; ++t) {
    const std::size_t dim = 2 + rng() % 63;
    const auto raw = random_bank(dim);
    std::vector<double> q(dim);
    for (double& x : q) x = g(rng);
    const auto want = oracle::argmin(raw, q);
    const auto got = predict(to_bank(raw), fv(q));
    if (got.category_index != want.category || std::abs(got.best_distance - want.distance) > 1e-12) {
      return {false, fmt("oracle mismatch on case %d", t)};
    }
  }
  for (int t = 0; t < 500; ++t) {
    const std::size_t dim = 2 + rng() % 63;
    auto raw = random_bank(dim);
    std::vector<double> q(dim);
    for (double& x : q) x = g(rng);
    const auto before = predict(to_bank(raw), fv(q)).category_index;
    const double cq = scale(rng);
    for (double& x : q) x *= cq;
    for (auto& cat : raw) {
      for (auto& a : cat) {
        const double ca = scale(rng);
        for (double& x : a) x *= ca;
      }
    }
    if (predict(to_bank(raw), fv(q)).category_index != before) {
      return {false, fmt("scaling changed the category on trial %d", t)};
    }
  }
  return {true, "500 argmin cases identical; 500 positive rescalings kept the category"};
}

Outcome metrics() {
  std::mt19937_64 rng(5005);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nc = 1 + rng() % 10, n = 1 + rng() % 200;
    std::vector<std::string> cats;
    for (std::size_t k = 0; k < nc; ++k) cats.push_back("k" + std::to_string(k));
    std::vector<std::size_t> ti(n), pi(n);
    std::vector<Prediction> preds(n);
    std::vector<LabeledId> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      ti[i] = rng() % nc;
      pi[i] = rng() % 2 ? ti[i] : rng() % nc;
      preds[i].sample_id = truth[i].id = "s" + std::to_string(i);
      preds[i].predicted = cats[pi[i]];
      truth[i].label = cats[ti[i]];
    }
    const auto want = oracle::count(ti, pi, nc);
    const auto got = evaluate(preds, truth, cats);
    if (got.confusion != want.confusion || std::abs(got.oacc - want.oacc) > 1e-9 ||
        std::abs(got.macc - want.macc) > 1e-9) {
      return {false, fmt("counting oracle mismatch on case %d", t)};
    }
  }
  // Published ten-class per-class row; its reported mAcc is 59.2.
  const std::vector<double> row = {80.0, 40.0, 37.0, 73.3, 73.3, 36.0, 44.2, 49.0, 79.0, 80.0};
  std::vector<std::string> cats;
  std::vector<Prediction> preds;
  std::vector<LabeledId> truth;
  for (std::size_t k = 0; k < row.size(); ++k) cats.push_back("c" + std::to_string(k));
  for (std::size_t k = 0; k < row.size(); ++k) {
    const auto ok = static_cast<std::size_t>(std::lround(row[k] * 10));
    for (std::size_t i = 0; i < 1000; ++i) {
      Prediction p;
      p.sample_id = cats[k] + "/" + std::to_string(i);
      p.predicted = i < ok ? cats[k] : cats[(k + 1) % row.size()];
      truth.push_back({p.sample_id, cats[k]});
      preds.push_back(std::move(p));
    }
  }
  const double macc = evaluate(preds, truth, cats).macc;
  return {std::abs(macc - 59.2) <= 0.05,
          fmt("100 cases match the counting oracle; reference row mAcc %.2f (59.2 +/- 0.05)", macc)};
}

// ---------------------------------------------------------------------------
// Synthetic benchmark, shared by the end-to-end, ablation and ensemble checks.

struct BenchState {
  std::vector<std::string> categories;
  AnchorBank bank;
  AnchorBank bank_b;
  LabeledFeatures aligned;
  LabeledFeatures rotated;
  double seconds = 0;
};

const AugmentConfig kAugment{1024, true, 7, false};

AnchorBank bank_for(const synthetic::Benchmark& b) {
  std::vector<AnchorSource> sources;
  for (const auto& a : b.anchors) {
    const auto c = std::find(b.categories.begin(), b.categories.end(), *a.label()) - b.categories.begin();
    sources.push_back({a, static_cast<std::size_t>(c), {a.id(), "synthetic", 0, "A " + *a.label() + "."}});
  }
  return build_bank_from_sources(b.categories, sources, kAugment, builtin_featurizer());
}

LabeledFeatures features_for(const std::vector<PointCloud>& clouds) {
  LabeledFeatures out;
  for (const auto& c : clouds) {
    out.ids.push_back(c.id());
    out.labels.push_back(*c.label());
  }
  out.features = featurize_clouds(clouds, kAugment, builtin_featurizer());
  return out;
}

BenchState& bench() {
  static BenchState state = [] {
    const auto t0 = Clock::now();
    synthetic::BenchmarkConfig cfg;  // 5 shapes, 7 anchors, 50 tests, sigma 0.02
    const auto b = synthetic::make_benchmark(cfg);
    const auto bank = bank_for(b);
    BenchState s{b.categories, bank, bank, features_for(b.tests),
                 features_for(synthetic::rotate_all(b.tests, 99)), 0};
    s.seconds = seconds_since(t0);
    cfg.seed = 7777;  // second, independently seeded anchor set
    s.bank_b = bank_for(synthetic::make_benchmark(cfg));
    return s;
  }();
  return state;
}

Outcome synthetic_benchmark() {
  auto& s = bench();
  const double aligned = evaluate_bank(s.bank, s.aligned).oacc;
  const double rotated = evaluate_bank(s.bank, s.rotated).oacc;
  const bool ok = rotated >= 90.0 && aligned >= 90.0 && std::abs(aligned - rotated) <= 2.0 && s.seconds < 60.0;
  return {ok, fmt("oAcc aligned %.1f%%, rotated %.1f%% (>=90, gap %.1f <=2), %.1f s single-threaded (<60)",
                  aligned, rotated, std::abs(aligned - rotated), s.seconds)};
}

Outcome ablation_trend() {
  auto& s = bench();
  const std::vector<std::size_t> counts = {1, 7};
  const auto r = ablate_anchors(s.bank, s.rotated, counts, 10, 11);
  return {r.rows[1].mean_oacc >= r.rows[0].mean_oacc,
          fmt("mean oAcc N_a=1 %.1f%% (std %.1f), N_a=7 %.1f%% over 10 trials", r.rows[0].mean_oacc,
              r.rows[0].std_oacc, r.rows[1].mean_oacc)};
}

Outcome ensemble() {
  auto& s = bench();
  const auto merged = merge_banks(s.bank, s.bank_b);
  for (const auto* tests : {&s.aligned, &s.rotated}) {
    for (const auto& f : tests->features) {
      const double m = predict(merged, f).best_distance;
      if (m > predict(s.bank, f).best_distance || m > predict(s.bank_b, f).best_distance) {
        return {false, "merging raised a best_distance"};
      }
    }
  }
  const double a = evaluate_bank(s.bank, s.rotated).oacc;
  const double b = evaluate_bank(s.bank_b, s.rotated).oacc;
  const double m = evaluate_bank(merged, s.rotated).oacc;
  return {m >= std::max(a, b) - 2.0,
          fmt("best_distance never rose on 500 queries; oAcc A %.1f%%, B %.1f%%, A+B %.1f%%", a, b, m)};
}

Outcome format_round_trips() {
  std::mt19937_64 rng(9009);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const PointCloud cloud("c", oracle::random_points(rng, 1 + rng() % 500, std::pow(10.0, t % 5 - 2)));
    for (const auto& back : {parse_off(write_off(cloud)), parse_xyz(write_xyz(cloud))}) {
      if (back.size() != cloud.size()) return {false, "point count changed"};
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(back.points()[i][a] - cloud.points()[i][a]));
      }
    }
  }
  std::normal_distribution<float> g(0.0f, 1e3f);
  for (int t = 0; t < 100; ++t) {
    FeatureTable table;
    table.dim = 1 + rng() % 64;
    const std::size_t count = 1 + rng() % 16;
    for (std::size_t i = 0; i < count; ++i) table.ids.push_back("row" + std::to_string(i));
    for (std::size_t i = 0; i < count * table.dim; ++i) table.values.push_back(rng() % 7 == 0 ? -0.0f : g(rng));
    const auto back = decode_feature_file(encode_feature_file(table));
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      if (std::bit_cast<std::uint32_t>(back.values[i]) != std::bit_cast<std::uint32_t>(table.values[i])) {
        return {false, "feature file payload not bitwise identical"};
      }
    }
    if (back.ids != table.ids || back.dim != table.dim) return {false, "feature file header/ids changed"};
  }
  const std::vector<std::uint8_t> golden = {0x41, 0x46, 0x56, 0x31, 0x01, 0x00, 0x01, 0x00, 0x00,
                                            0x00, 0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x3F,
                                            0x00, 0x00, 0x00, 0x40, 0x01, 0x00, 0x00, 0x00, 0x61};
  const bool golden_ok = encode_feature_file(FeatureTable{2, {"a"}, {1.0f, 2.0f}}) == golden;
  return {worst <= 1e-6 && golden_ok,
          fmt("OFF/XYZ max error %.1e (<=1e-6); 100 feature files bitwise; golden bytes %s", worst,
              golden_ok ? "exact" : "DIFFER")};
}

Outcome backend_protocol() {
  const std::string cmd = std::string("'") + OWC_ECHO_BACKEND + "' --mode builtin --batch-limit 4";
  const auto conf = run_conformance(cmd);
  std::string failed;
  for (const auto& c : conf.checks) {
    if (!c.passed) failed += " " + c.name;
  }
  auto backend = std::make_shared<BackendProcess>(cmd);
  const auto b = synthetic::make_benchmark({2, 4, 600, 0.02, 5});
  const AugmentConfig cfg{256, true, 3, false};
  const auto local = featurize_clouds(b.tests, cfg, builtin_featurizer());
  const auto remote = featurize_clouds(b.tests, cfg, backend_featurizer(backend));
  bool parity = local.size() == remote.size();
  for (std::size_t i = 0; parity && i < local.size(); ++i) parity = local[i].values == remote[i].values;
  return {conf.passed() && parity,
          fmt("%zu conformance checks %s; echo backend features %s builtin", conf.checks.size(),
              failed.empty() ? "passed" : ("failed:" + failed).c_str(), parity ? "identical to" : "DIFFER from")};
}

}  // namespace

int main() {
  report("fps-oracle", true, fps_oracle);
  report("augmentation", true, augmentation);
  report("rotation-invariance", true, rotation_invariance);
  report("classifier-oracle", true, classifier_oracle);
  report("metrics", true, metrics);
  report("synthetic-benchmark", true, synthetic_benchmark);
  report("ablation-trend", true, ablation_trend);
  report("ensemble", true, ensemble);
  report("format-round-trips", true, format_round_trips);
  report("backend-protocol", false, backend_protocol);
  std::printf("%s\n", failures == 0 ? "ALL CORE CRITERIA PASSED" : "CORE CRITERIA FAILED");
  return failures == 0 ? 0 : 1;
}
