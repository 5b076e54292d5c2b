#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "owc/classifier.hpp"

namespace owc {

struct LabeledId {
  std::string id;
  std::string label;
};

struct EvalReport {
  std::vector<std::string> categories;
  std::vector<std::vector<std::size_t>> confusion;  // rows truth, cols predicted
  std::vector<double> per_class_acc;                // percent; NaN when absent
  std::vector<std::string> absent_classes;          // no test samples
  double oacc = 0.0;
  double macc = 0.0;
  std::size_t n_samples = 0;
};

/// Confusion matrix, per-class recall, oAcc and mAcc (macro recall over the
/// classes that have at least one test sample). Predictions are matched to
/// ground truth by id; both sides must cover exactly the same ids.
EvalReport evaluate(std::span<const Prediction> predictions,
                    std::span<const LabeledId> ground_truth,
                    const std::vector<std::string>& categories);

/// Precomputed test features with their true labels.
struct LabeledFeatures {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<FeatureVector> features;
};

EvalReport evaluate_bank(const AnchorBank& bank, const LabeledFeatures& tests,
                         const PredictOptions& options = {});

struct AblationRow {
  std::size_t anchors_per_class = 0;
  double mean_oacc = 0.0;
  double std_oacc = 0.0;
  double mean_macc = 0.0;
  double std_macc = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// For every count, `trials` seeded draws of that many anchors per class
/// (without replacement), each evaluated on the test set. Standard deviations
/// are population (divide by trials).
AblationResult ablate_anchors(const AnchorBank& bank, const LabeledFeatures& tests,
                              std::span<const std::size_t> counts,
                              std::size_t trials, std::uint64_t seed,
                              const PredictOptions& options = {});

struct EmbeddingRow {
  std::string id;
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

/// Projection onto the top two principal components of the mean-centered
/// features. Each component is signed so its largest-magnitude entry (lowest
/// index on ties) is positive.
std::vector<EmbeddingRow> export_embedding_2d(std::span<const FeatureVector> features,
                                              std::span<const std::string> ids,
                                              std::span<const std::string> labels);

}  // namespace owc
