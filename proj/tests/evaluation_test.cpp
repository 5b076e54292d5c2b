#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "owc/error.hpp"
#include "owc/evaluation.hpp"

using namespace owc;

namespace {

std::vector<Prediction> preds_of(const std::vector<std::string>& labels) {
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Prediction p;
    p.sample_id = "s" + std::to_string(i);
    p.predicted = labels[i];
    out.push_back(p);
  }
  return out;
}

std::vector<LabeledId> truth_of(const std::vector<std::string>& labels) {
  std::vector<LabeledId> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({"s" + std::to_string(i), labels[i]});
  return out;
}

FeatureVector fv(std::vector<double> v) { return FeatureVector{std::move(v), "test"}; }

}  // namespace

TEST_CASE("evaluate: hand-counted example") {
  const auto r = evaluate(preds_of({"A", "B", "B", "B", "A"}), truth_of({"A", "A", "B", "B", "B"}),
                          {"A", "B"});
  CHECK(r.oacc == doctest::Approx(60.0));
  CHECK(r.per_class_acc[0] == doctest::Approx(50.0));
  CHECK(r.per_class_acc[1] == doctest::Approx(200.0 / 3.0));
  CHECK(r.macc == doctest::Approx(58.333333).epsilon(1e-6));
  CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{1, 1}, {1, 2}});
  CHECK(r.n_samples == 5);
}

TEST_CASE("evaluate: perfect predictions") {
  const std::vector<std::string> labels = {"x", "y", "z", "y"};
  const auto r = evaluate(preds_of(labels), truth_of(labels), {"x", "y", "z"});
  CHECK(r.oacc == 100.0);
  CHECK(r.macc == 100.0);
}

TEST_CASE("mAcc is the mean of a published per-class row") {
  const std::vector<double> row = {80.0, 40.0, 37.0, 73.3, 73.3, 36.0, 44.2, 49.0, 79.0, 80.0};
  // Build a confusion matrix whose recalls reproduce the row exactly: class k
  // gets 1000 samples, round(10 * row[k]) of them correct.
  std::vector<std::string> cats, truth, pred;
  for (std::size_t k = 0; k < row.size(); ++k) cats.push_back("c" + std::to_string(k));
  for (std::size_t k = 0; k < row.size(); ++k) {
    const auto ok = static_cast<std::size_t>(std::lround(row[k] * 10));
    for (std::size_t i = 0; i < 1000; ++i) {
      truth.push_back(cats[k]);
      pred.push_back(i < ok ? cats[k] : cats[(k + 1) % cats.size()]);
    }
  }
  const auto r = evaluate(preds_of(pred), truth_of(truth), cats);
  for (std::size_t k = 0; k < row.size(); ++k) CHECK(r.per_class_acc[k] == doctest::Approx(row[k]));
  CHECK(r.macc == doctest::Approx(59.18).epsilon(1e-9));
  CHECK(std::abs(r.macc - 59.2) <= 0.05);
}

TEST_CASE("evaluate agrees with the counting oracle and ignores sample order") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nc = 1 + rng() % 6;
    const std::size_t n = 1 + rng() % 60;
    std::vector<std::string> cats;
    for (std::size_t k = 0; k < nc; ++k) cats.push_back("k" + std::to_string(k));
    std::vector<std::size_t> ti(n), pi(n);
    std::vector<std::string> tl(n), pl(n);
    for (std::size_t i = 0; i < n; ++i) {
      ti[i] = rng() % nc;
      pi[i] = rng() % 3 == 0 ? ti[i] : rng() % nc;
      tl[i] = cats[ti[i]];
      pl[i] = cats[pi[i]];
    }
    const auto want = oracle::count(ti, pi, nc);
    auto preds = preds_of(pl);
    const auto truth = truth_of(tl);
    const auto got = evaluate(preds, truth, cats);
    REQUIRE(got.confusion == want.confusion);
    REQUIRE(got.oacc == doctest::Approx(want.oacc).epsilon(1e-12));
    REQUIRE(got.macc == doctest::Approx(want.macc).epsilon(1e-12));

    std::shuffle(preds.begin(), preds.end(), rng);
    const auto shuffled = evaluate(preds, truth, cats);
    REQUIRE(shuffled.confusion == got.confusion);
    REQUIRE(shuffled.oacc == got.oacc);
    REQUIRE(shuffled.macc == got.macc);
  }
}

TEST_CASE("absent classes are flagged and excluded from mAcc") {
  const auto r = evaluate(preds_of({"A", "C"}), truth_of({"A", "A"}), {"A", "B", "C"});
  CHECK(r.absent_classes == std::vector<std::string>{"B", "C"});
  CHECK(std::isnan(r.per_class_acc[1]));
  CHECK(r.macc == doctest::Approx(50.0));
}

TEST_CASE("evaluate alignment errors") {
  const auto check_alignment = [](auto&& fn) {
    try {
      fn();
      FAIL("expected alignment error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Alignment);
    }
  };
  check_alignment([] { evaluate(preds_of({"A"}), truth_of({"A", "A"}), {"A"}); });
  check_alignment([] {
    auto p = preds_of({"A", "A"});
    p[1].sample_id = "zzz";
    evaluate(p, truth_of({"A", "A"}), {"A"});
  });
  check_alignment([] { evaluate(preds_of({"Q"}), truth_of({"A"}), {"A"}); });
  check_alignment([] { evaluate(preds_of({"A"}), truth_of({"Q"}), {"A"}); });
  check_alignment([] {
    auto p = preds_of({"A", "A"});
    p[1].sample_id = p[0].sample_id;
    evaluate(p, std::vector<LabeledId>{{"s0", "A"}, {"s9", "A"}}, {"A"});
  });
}

namespace {

// Two well-separated clusters; each category holds 6 anchors, one of which is
// a deliberately misleading outlier pointing at the other class.
struct Toy {
  AnchorBank bank;
  LabeledFeatures tests;
};

Toy toy() {
  std::mt19937_64 rng(91);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<Category> cats = {{"east", {}}, {"north", {}}};
  for (int j = 0; j < 6; ++j) {
    cats[0].anchors.push_back({fv({1 + g(rng), g(rng), 0.1}), {}});
    cats[1].anchors.push_back({fv({g(rng), 1 + g(rng), 0.1}), {}});
  }
  cats[0].anchors[5].feature = fv({0.05, 1, 0.1});
  LabeledFeatures tests;
  for (int i = 0; i < 40; ++i) {
    const bool east = i % 2 == 0;
    tests.ids.push_back("t" + std::to_string(i));
    tests.labels.push_back(east ? "east" : "north");
    tests.features.push_back(east ? fv({1 + g(rng), g(rng), 0.1}) : fv({g(rng), 1 + g(rng), 0.1}));
  }
  return {AnchorBank(std::move(cats)), std::move(tests)};
}

}  // namespace

TEST_CASE("ablate_anchors") {
  const auto [bank, tests] = toy();
  const std::vector<std::size_t> full = {6};
  const auto sweep = ablate_anchors(bank, tests, full, 3, 5);
  const auto direct = evaluate_bank(bank, tests);
  REQUIRE(sweep.rows.size() == 1);
  CHECK(sweep.rows[0].mean_oacc == doctest::Approx(direct.oacc));
  CHECK(sweep.rows[0].std_oacc == 0.0);
  CHECK(sweep.rows[0].std_macc == 0.0);

  const std::vector<std::size_t> counts = {1, 2, 3, 4, 5, 6};
  const auto a = ablate_anchors(bank, tests, counts, 10, 42);
  const auto b = ablate_anchors(bank, tests, counts, 10, 42);
  REQUIRE(a.rows.size() == counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    CHECK(a.rows[i].anchors_per_class == counts[i]);
    CHECK(a.rows[i].mean_oacc == b.rows[i].mean_oacc);
    CHECK(a.rows[i].std_oacc == b.rows[i].std_oacc);
    CHECK(a.rows[i].std_oacc >= 0.0);
  }
  CHECK(a.trials == 10);
  CHECK(a.seed == 42);

  const std::vector<std::size_t> too_many = {7};
  CHECK_THROWS_AS(ablate_anchors(bank, tests, too_many, 1, 0), Error);
  CHECK_THROWS_AS(ablate_anchors(bank, tests, counts, 0, 0), Error);
}

TEST_CASE("export_embedding_2d") {
  SUBCASE("axis-aligned data maps its dominant axis to x") {
    std::vector<FeatureVector> f = {fv({3, 0}), fv({-3, 0}), fv({0, 1}), fv({0, -1})};
    std::vector<std::string> ids = {"a", "b", "c", "d"}, labels(4, "l");
    const auto rows = export_embedding_2d(f, ids, labels);
    CHECK(rows[0].x == doctest::Approx(3.0));
    CHECK(rows[1].x == doctest::Approx(-3.0));
    CHECK(std::abs(rows[0].y) < 1e-12);
    CHECK(std::abs(rows[2].y) == doctest::Approx(1.0));
    CHECK(rows[2].y == doctest::Approx(1.0));  // sign convention: largest entry positive
  }
  SUBCASE("rank-1 data has a zero second coordinate") {
    std::vector<FeatureVector> f;
    std::vector<std::string> ids, labels;
    for (int i = 0; i < 10; ++i) {
      const double t = i * 0.7 - 2;
      f.push_back(fv({1 + 2 * t, -1 + t, 3 - 0.5 * t}));
      ids.push_back(std::to_string(i));
      labels.push_back("line");
    }
    for (const auto& r : export_embedding_2d(f, ids, labels)) CHECK(std::abs(r.y) <= 1e-9);
  }
  SUBCASE("duplicating every sample keeps the projection") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    std::vector<FeatureVector> f;
    std::vector<std::string> ids, labels;
    for (int i = 0; i < 12; ++i) {
      f.push_back(fv({g(rng) * 3, g(rng) * 2, g(rng), g(rng) * 0.5}));
      ids.push_back(std::to_string(i));
      labels.push_back("x");
    }
    const auto once = export_embedding_2d(f, ids, labels);
    auto f2 = f;
    f2.insert(f2.end(), f.begin(), f.end());
    auto ids2 = ids;
    ids2.insert(ids2.end(), ids.begin(), ids.end());
    auto labels2 = labels;
    labels2.insert(labels2.end(), labels.begin(), labels.end());
    const auto twice = export_embedding_2d(f2, ids2, labels2);
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(twice[i].x == doctest::Approx(once[i].x).epsilon(1e-9));
      CHECK(twice[i].y == doctest::Approx(once[i].y).epsilon(1e-9));
      CHECK(twice[i + once.size()].x == doctest::Approx(once[i].x).epsilon(1e-9));
    }
  }
  SUBCASE("needs two samples") {
    std::vector<FeatureVector> f = {fv({1, 2})};
    std::vector<std::string> ids = {"a"}, labels = {"l"};
    CHECK_THROWS_AS(export_embedding_2d(f, ids, labels), Error);
  }
}
