#include "owc/classifier.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <set>
#include <thread>

#include "owc/error.hpp"
#include "owc/formats.hpp"

namespace owc {

namespace {

double squared_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Empty string when the vector is usable as an anchor or query.
std::string feature_problem(const FeatureVector& f, std::size_t dim) {
  if (f.values.empty()) return "empty feature vector";
  if (dim != 0 && f.dim() != dim) {
    return "dimension " + std::to_string(f.dim()) + " (expected " +
           std::to_string(dim) + ")";
  }
  for (double v : f.values) {
    if (!std::isfinite(v)) return "non-finite value";
  }
  if (squared_norm(f.values) == 0.0) return "zero vector";
  return {};
}

}  // namespace

AnchorBank::AnchorBank(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  if (categories_.empty()) {
    throw Error(ErrorKind::Validation, "anchor bank has no categories");
  }
  std::set<std::string> seen;
  for (const auto& cat : categories_) {
    if (!seen.insert(cat.name).second) {
      throw Error(ErrorKind::Validation, "duplicate category '" + cat.name + "'");
    }
    if (cat.anchors.empty()) {
      throw Error(ErrorKind::Validation, "category '" + cat.name + "' has no anchors");
    }
    for (std::size_t j = 0; j < cat.anchors.size(); ++j) {
      const auto& f = cat.anchors[j].feature;
      if (feature_dim_ == 0) feature_dim_ = f.dim();
      const auto problem = feature_problem(f, feature_dim_);
      if (!problem.empty()) {
        throw Error(problem == "zero vector" ? ErrorKind::ZeroVector
                                             : ErrorKind::Validation,
                    "category '" + cat.name + "' anchor " + std::to_string(j) + ": " +
                        problem);
      }
    }
  }
}

std::size_t AnchorBank::anchor_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : categories_) n += c.anchors.size();
  return n;
}

std::size_t AnchorBank::min_anchors_per_category() const noexcept {
  std::size_t n = categories_.front().anchors.size();
  for (const auto& c : categories_) n = std::min(n, c.anchors.size());
  return n;
}

std::optional<std::size_t> AnchorBank::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> AnchorBank::names() const {
  std::vector<std::string> out;
  out.reserve(categories_.size());
  for (const auto& c : categories_) out.push_back(c.name);
  return out;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Shape, "cosine_distance: dimension mismatch (" +
                                      std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorKind::ZeroVector, "cosine_distance: zero-norm vector");
  }
  const double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(d, 0.0, 2.0);
}

double cosine_distance(const FeatureVector& a, const FeatureVector& b) {
  return cosine_distance(std::span<const double>(a.values),
                         std::span<const double>(b.values));
}

Featurizer builtin_featurizer(DescriptorConfig cfg) {
  return [cfg](std::span<const PointCloud> clouds) {
    std::vector<FeatureVector> out;
    out.reserve(clouds.size());
    for (const auto& c : clouds) out.push_back(builtin_descriptor(c, cfg));
    return out;
  };
}

AnchorBank build_bank_from_sources(const std::vector<std::string>& categories,
                                   std::span<const AnchorSource> sources,
                                   const AugmentConfig& cfg, const Featurizer& featurizer) {
  if (categories.empty()) throw Error(ErrorKind::Build, "no categories");
  const auto describe = [&](std::size_t i) {
    const auto& src = sources[i];
    std::string where = "anchor '" + src.cloud.id() + "'";
    if (!src.provenance.source_file.empty()) where += " (" + src.provenance.source_file + ")";
    return where;
  };

  std::vector<std::size_t> per_category(categories.size(), 0);
  std::vector<PointCloud> clouds;
  clouds.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].category >= categories.size()) {
      throw Error(ErrorKind::Build, describe(i) + ": category index out of range");
    }
    ++per_category[sources[i].category];
    try {
      AugmentConfig local = cfg;
      local.seed = derive_seed(cfg.seed, i);
      clouds.push_back(augment(sources[i].cloud, local));
    } catch (const Error& e) {
      throw Error(ErrorKind::Build, describe(i) + ": " + e.what());
    }
  }
  for (std::size_t c = 0; c < categories.size(); ++c) {
    if (per_category[c] == 0) {
      throw Error(ErrorKind::Build, "category '" + categories[c] + "' has no anchors");
    }
  }

  std::vector<FeatureVector> features;
  try {
    features = featurizer(clouds);
  } catch (const Error& e) {
    throw Error(ErrorKind::Build, std::string("featurization failed: ") + e.what());
  }
  if (features.size() != clouds.size()) {
    throw Error(ErrorKind::Build, "featurizer returned " + std::to_string(features.size()) +
                                      " vectors for " + std::to_string(clouds.size()) +
                                      " anchors");
  }

  const std::size_t dim = features.front().dim();
  std::vector<Category> bank(categories.size());
  for (std::size_t c = 0; c < categories.size(); ++c) bank[c].name = categories[c];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto problem = feature_problem(features[i], dim);
    if (!problem.empty()) {
      throw Error(problem == "zero vector" ? ErrorKind::ZeroVector : ErrorKind::Build,
                  describe(i) + ": " + problem);
    }
    bank[sources[i].category].anchors.push_back(
        {std::move(features[i]), sources[i].provenance});
  }
  return AnchorBank(std::move(bank));
}

std::vector<FeatureVector> featurize_clouds(std::span<const PointCloud> clouds,
                                            const AugmentConfig& cfg,
                                            const Featurizer& featurizer) {
  std::vector<PointCloud> augmented;
  augmented.reserve(clouds.size());
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    AugmentConfig local = cfg;
    local.seed = derive_seed(cfg.seed, i);
    augmented.push_back(augment(clouds[i], local));
  }
  auto features = featurizer(augmented);
  if (features.size() != clouds.size()) {
    throw Error(ErrorKind::Backend, "featurizer returned " + std::to_string(features.size()) +
                                        " vectors for " + std::to_string(clouds.size()) +
                                        " clouds");
  }
  return features;
}

AnchorBank build_bank(const AnchorManifest& manifest, const AugmentConfig& cfg,
                      const Featurizer& featurizer) {
  if (manifest.categories.empty()) {
    throw Error(ErrorKind::Build, "manifest has no categories");
  }
  std::vector<std::string> names;
  std::vector<AnchorSource> sources;
  for (std::size_t c = 0; c < manifest.categories.size(); ++c) {
    const auto& cat = manifest.categories[c];
    names.push_back(cat.name);
    if (cat.anchors.empty()) {
      throw Error(ErrorKind::Build, "category '" + cat.name + "' has no anchors");
    }
    for (std::size_t a = 0; a < cat.anchors.size(); ++a) {
      const auto& entry = cat.anchors[a];
      try {
        sources.push_back(
            {load_point_cloud(entry.file, cat.name + "/" + std::to_string(a), cat.name), c,
             AnchorProvenance{entry.file.string(), entry.generator, entry.seed,
                              entry.prompt_index < cat.prompts.size()
                                  ? cat.prompts[entry.prompt_index]
                                  : std::string{}}});
      } catch (const Error& e) {
        throw Error(ErrorKind::Build, "category '" + cat.name + "' anchor " +
                                          std::to_string(a) + ": " + e.what());
      }
    }
  }
  return build_bank_from_sources(names, sources, cfg, featurizer);
}

AnchorBank merge_banks(const AnchorBank& a, const AnchorBank& b) {
  if (a.feature_dim() != b.feature_dim()) {
    throw Error(ErrorKind::Merge, "cannot merge banks of dimension " +
                                      std::to_string(a.feature_dim()) + " and " +
                                      std::to_string(b.feature_dim()));
  }
  const auto names_a = a.names();
  auto sorted_a = names_a;
  auto sorted_b = b.names();
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  if (sorted_a != sorted_b) {
    throw Error(ErrorKind::Merge, "cannot merge banks with different category sets");
  }

  std::vector<Category> merged = a.categories();
  for (auto& cat : merged) {
    const auto& other = b.categories()[*b.index_of(cat.name)];
    cat.anchors.insert(cat.anchors.end(), other.anchors.begin(), other.anchors.end());
  }
  return AnchorBank(std::move(merged));
}

Prediction predict(const AnchorBank& bank, const FeatureVector& test,
                   const PredictOptions& options, std::string sample_id) {
  if (test.dim() != bank.feature_dim()) {
    throw Error(ErrorKind::Shape, "sample '" + sample_id + "': feature dimension " +
                                      std::to_string(test.dim()) + ", bank expects " +
                                      std::to_string(bank.feature_dim()));
  }
  if (squared_norm(test.values) == 0.0) {
    throw Error(ErrorKind::ZeroVector, "sample '" + sample_id + "': zero feature vector");
  }

  Prediction out;
  out.sample_id = std::move(sample_id);
  double best = 3.0;
  const auto& cats = bank.categories();
  for (std::size_t i = 0; i < cats.size(); ++i) {
    double class_score = 0.0;
    double class_min = 3.0;
    for (std::size_t j = 0; j < cats[i].anchors.size(); ++j) {
      const double d = cosine_distance(cats[i].anchors[j].feature, test);
      if (options.retain_distances) out.per_anchor_distances.push_back({i, j, d});
      class_score += d;
      class_min = std::min(class_min, d);
    }
    const double score = options.mode == PredictMode::ClassMean
                             ? class_score / static_cast<double>(cats[i].anchors.size())
                             : class_min;
    if (score < best) {
      best = score;
      out.category_index = i;
    }
  }
  out.predicted = cats[out.category_index].name;
  out.best_distance = best;
  return out;
}

std::vector<Prediction> predict_batch(const AnchorBank& bank,
                                      std::span<const FeatureVector> tests,
                                      std::span<const std::string> ids,
                                      const PredictOptions& options,
                                      unsigned threads) {
  if (!ids.empty() && ids.size() != tests.size()) {
    throw Error(ErrorKind::Shape, "predict_batch: ids and features differ in length");
  }
  std::vector<Prediction> out(tests.size());
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = predict(bank, tests[i], options, ids.empty() ? std::string{} : ids[i]);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tests.size())));
  if (threads <= 1) {
    work(0, tests.size());
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (tests.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(tests.size(), begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

AnchorBank select_anchors(const AnchorBank& bank,
                          const std::vector<std::vector<std::size_t>>& keep) {
  if (keep.size() != bank.size()) {
    throw Error(ErrorKind::Config, "select_anchors: one index list per category required");
  }
  std::vector<Category> out;
  out.reserve(bank.size());
  for (std::size_t c = 0; c < bank.size(); ++c) {
    const auto& src = bank.categories()[c];
    Category cat{src.name, {}};
    for (std::size_t j : keep[c]) {
      if (j >= src.anchors.size()) {
        throw Error(ErrorKind::Config, "select_anchors: index " + std::to_string(j) +
                                           " out of range for category '" + src.name +
                                           "'");
      }
      cat.anchors.push_back(src.anchors[j]);
    }
    out.push_back(std::move(cat));
  }
  return AnchorBank(std::move(out));
}

}  // namespace owc
