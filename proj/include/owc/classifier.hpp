#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "owc/descriptor.hpp"
#include "owc/geometry.hpp"

namespace owc {

struct AnchorManifest;

struct AnchorProvenance {
  std::string source_file;
  std::string generator;
  std::int64_t seed = 0;
  std::string prompt;
};

struct Anchor {
  FeatureVector feature;
  AnchorProvenance provenance;
};

struct Category {
  std::string name;
  std::vector<Anchor> anchors;
};

/// The training-free classifier: per-category anchor features of a common
/// dimension. Immutable after construction; all invariants (unique names,
/// non-empty categories, matching dims, finite nonzero vectors) are checked
/// by the constructor.
class AnchorBank {
 public:
  explicit AnchorBank(std::vector<Category> categories);

  const std::vector<Category>& categories() const noexcept { return categories_; }
  std::size_t size() const noexcept { return categories_.size(); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t anchor_count() const noexcept;
  std::size_t min_anchors_per_category() const noexcept;
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<Category> categories_;
  std::size_t feature_dim_ = 0;
};

/// 1 - cos(a, b), clamped to [0, 2].
double cosine_distance(std::span<const double> a, std::span<const double> b);
double cosine_distance(const FeatureVector& a, const FeatureVector& b);

/// Batch featurizer: maps augmented clouds to feature vectors, one per cloud,
/// in order. The builtin descriptor and a backend process both fit here.
using Featurizer =
    std::function<std::vector<FeatureVector>(std::span<const PointCloud>)>;

Featurizer builtin_featurizer(DescriptorConfig cfg = {});

struct AnchorSource {
  PointCloud cloud;  // raw, before augmentation
  std::size_t category = 0;
  AnchorProvenance provenance;
};

/// Augments every source (rotation seeded per anchor from cfg.seed via
/// derive_seed), featurizes, validates, and assembles the bank in source order.
/// Nothing is returned unless every anchor succeeds.
AnchorBank build_bank_from_sources(const std::vector<std::string>& categories,
                                   std::span<const AnchorSource> sources,
                                   const AugmentConfig& cfg, const Featurizer& featurizer);

/// Augments each cloud (sample i rotated with derive_seed(cfg.seed, i)) and
/// featurizes the batch.
std::vector<FeatureVector> featurize_clouds(std::span<const PointCloud> clouds,
                                            const AugmentConfig& cfg,
                                            const Featurizer& featurizer);

/// Parses every anchor file, augments it (rotation seeded per anchor from
/// cfg.seed), featurizes and assembles a bank. Nothing is returned unless every
/// entry succeeds.
AnchorBank build_bank(const AnchorManifest& manifest, const AugmentConfig& cfg,
                      const Featurizer& featurizer);

/// Per-category concatenation, `a`'s anchors first.
AnchorBank merge_banks(const AnchorBank& a, const AnchorBank& b);

struct AnchorDistance {
  std::size_t category = 0;
  std::size_t anchor = 0;
  double distance = 0.0;
};

struct Prediction {
  std::string sample_id;
  std::string predicted;
  std::size_t category_index = 0;
  double best_distance = 0.0;
  std::vector<AnchorDistance> per_anchor_distances;  // empty unless retained
};

enum class PredictMode {
  NearestAnchor,  // argmin over every (category, anchor) distance
  ClassMean,      // argmin over per-category mean distance
};

struct PredictOptions {
  PredictMode mode = PredictMode::NearestAnchor;
  bool retain_distances = false;
};

Prediction predict(const AnchorBank& bank, const FeatureVector& test,
                   const PredictOptions& options = {}, std::string sample_id = {});

/// Predicts every feature, optionally on several threads; output order always
/// equals input order.
std::vector<Prediction> predict_batch(const AnchorBank& bank,
                                      std::span<const FeatureVector> tests,
                                      std::span<const std::string> ids,
                                      const PredictOptions& options = {},
                                      unsigned threads = 1);

/// Keeps, for every category, the anchors at the given indices (in the given
/// order).
AnchorBank select_anchors(const AnchorBank& bank,
                          const std::vector<std::vector<std::size_t>>& keep);

}  // namespace owc
