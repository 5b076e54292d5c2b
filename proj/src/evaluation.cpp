#include "owc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include <Eigen/Dense>

#include "owc/error.hpp"
#include "owc/geometry.hpp"

namespace owc {

EvalReport evaluate(std::span<const Prediction> predictions,
                    std::span<const LabeledId> ground_truth,
                    const std::vector<std::string>& categories) {
  if (categories.empty()) {
    throw Error(ErrorKind::Alignment, "evaluate: empty category list");
  }
  std::unordered_map<std::string, std::size_t> category_index;
  for (std::size_t i = 0; i < categories.size(); ++i) category_index[categories[i]] = i;

  std::unordered_map<std::string, std::size_t> truth;
  for (const auto& t : ground_truth) {
    const auto cat = category_index.find(t.label);
    if (cat == category_index.end()) {
      throw Error(ErrorKind::Alignment, "ground truth '" + t.id + "' has label '" +
                                            t.label + "' outside the category set");
    }
    if (!truth.emplace(t.id, cat->second).second) {
      throw Error(ErrorKind::Alignment, "duplicate ground-truth id '" + t.id + "'");
    }
  }
  if (predictions.size() != truth.size()) {
    throw Error(ErrorKind::Alignment,
                std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(truth.size()) + " ground-truth samples");
  }

  EvalReport report;
  report.categories = categories;
  const std::size_t nc = categories.size();
  report.confusion.assign(nc, std::vector<std::size_t>(nc, 0));

  std::unordered_map<std::string, bool> used;
  for (const auto& p : predictions) {
    const auto t = truth.find(p.sample_id);
    if (t == truth.end()) {
      throw Error(ErrorKind::Alignment, "prediction '" + p.sample_id +
                                            "' has no ground-truth entry");
    }
    if (used[p.sample_id]) {
      throw Error(ErrorKind::Alignment, "duplicate prediction id '" + p.sample_id + "'");
    }
    used[p.sample_id] = true;
    const auto pc = category_index.find(p.predicted);
    if (pc == category_index.end()) {
      throw Error(ErrorKind::Alignment, "prediction '" + p.sample_id +
                                            "' names unknown category '" + p.predicted +
                                            "'");
    }
    ++report.confusion[t->second][pc->second];
  }

  report.n_samples = predictions.size();
  std::size_t correct = 0;
  double recall_sum = 0.0;
  std::size_t present = 0;
  report.per_class_acc.assign(nc, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < nc; ++i) {
    const std::size_t row = std::accumulate(report.confusion[i].begin(),
                                            report.confusion[i].end(), std::size_t{0});
    correct += report.confusion[i][i];
    if (row == 0) {
      report.absent_classes.push_back(categories[i]);
      continue;
    }
    report.per_class_acc[i] =
        100.0 * static_cast<double>(report.confusion[i][i]) / static_cast<double>(row);
    recall_sum += report.per_class_acc[i];
    ++present;
  }
  report.oacc = report.n_samples == 0
                    ? 0.0
                    : 100.0 * static_cast<double>(correct) /
                          static_cast<double>(report.n_samples);
  report.macc = present == 0 ? 0.0 : recall_sum / static_cast<double>(present);
  return report;
}

EvalReport evaluate_bank(const AnchorBank& bank, const LabeledFeatures& tests,
                         const PredictOptions& options) {
  const auto preds = predict_batch(bank, tests.features, tests.ids, options);
  std::vector<LabeledId> truth;
  truth.reserve(tests.ids.size());
  for (std::size_t i = 0; i < tests.ids.size(); ++i) {
    truth.push_back({tests.ids[i], tests.labels[i]});
  }
  return evaluate(preds, truth, bank.names());
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

}  // namespace

AblationResult ablate_anchors(const AnchorBank& bank, const LabeledFeatures& tests,
                              std::span<const std::size_t> counts, std::size_t trials,
                              std::uint64_t seed, const PredictOptions& options) {
  if (trials == 0) throw Error(ErrorKind::Config, "ablation needs at least one trial");
  if (counts.empty()) throw Error(ErrorKind::Config, "ablation needs at least one count");
  const std::size_t limit = bank.min_anchors_per_category();
  for (std::size_t n : counts) {
    if (n == 0 || n > limit) {
      throw Error(ErrorKind::Config,
                  "anchor count " + std::to_string(n) + " outside [1, " +
                      std::to_string(limit) + "] (smallest category size)");
    }
  }

  AblationResult result;
  result.trials = trials;
  result.seed = seed;
  for (std::size_t n : counts) {
    std::vector<double> oaccs, maccs;
    for (std::size_t t = 0; t < trials; ++t) {
      std::mt19937_64 stream(derive_seed(derive_seed(seed, n), t));
      std::vector<std::vector<std::size_t>> keep(bank.size());
      for (std::size_t c = 0; c < bank.size(); ++c) {
        std::vector<std::size_t> idx(bank.categories()[c].anchors.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        // Partial Fisher-Yates: the first n entries are a uniform n-subset.
        for (std::size_t i = 0; i < n; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
          std::swap(idx[i], idx[pick(stream)]);
        }
        idx.resize(n);
        std::sort(idx.begin(), idx.end());
        keep[c] = std::move(idx);
      }
      const auto report = evaluate_bank(select_anchors(bank, keep), tests, options);
      oaccs.push_back(report.oacc);
      maccs.push_back(report.macc);
    }
    const auto o = mean_std(oaccs);
    const auto m = mean_std(maccs);
    result.rows.push_back({n, o.mean, o.std, m.mean, m.std});
  }
  return result;
}

std::vector<EmbeddingRow> export_embedding_2d(std::span<const FeatureVector> features,
                                              std::span<const std::string> ids,
                                              std::span<const std::string> labels) {
  if (features.size() < 2) {
    throw Error(ErrorKind::EmptyInput, "2-D export needs at least 2 samples");
  }
  if (ids.size() != features.size() || labels.size() != features.size()) {
    throw Error(ErrorKind::Shape, "2-D export: ids/labels must match features");
  }
  const std::size_t n = features.size();
  const std::size_t dim = features.front().dim();
  if (dim == 0) throw Error(ErrorKind::Shape, "2-D export: zero-dimensional features");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].dim() != dim) {
      throw Error(ErrorKind::Shape, "2-D export: sample '" + ids[i] +
                                        "' has dimension " +
                                        std::to_string(features[i].dim()));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = features[i].values[d];
    }
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  // Eigenvalues ascend; the last two columns are the leading components.
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(d, 2);
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, d); ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - k);
    Eigen::Index argmax = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (std::abs(v(i)) > std::abs(v(argmax))) argmax = i;
    }
    if (v(argmax) < 0) v = -v;
    axes.col(k) = v;
  }
  const Eigen::MatrixXd projected = x * axes;

  std::vector<EmbeddingRow> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {ids[i], labels[i], projected(static_cast<Eigen::Index>(i), 0),
              projected(static_cast<Eigen::Index>(i), 1)};
  }
  return out;
}

}  // namespace owc
