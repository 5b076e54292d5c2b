#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "owc/classifier.hpp"
#include "owc/evaluation.hpp"
#include "owc/geometry.hpp"

namespace owc {

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

/// OFF mesh text. Accepts "OFF\n<nv> <nf> <ne>" and the same-line variant
/// "OFF<nv> <nf> <ne>"; '#' comments and blank lines are skipped. Faces are
/// validated for count and then dropped.
PointCloud parse_off(std::string_view text, std::string id = "off");

/// Whitespace-separated rows, first three columns are x y z.
PointCloud parse_xyz(std::string_view text, std::string id = "xyz");

std::string write_off(const PointCloud& cloud);
std::string write_xyz(const PointCloud& cloud);

/// Dispatches on extension (.off / .xyz). Errors name the path.
PointCloud load_point_cloud(const std::filesystem::path& path, std::string id,
                            std::optional<std::string> label = std::nullopt);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// ---------------------------------------------------------------------------
// Feature file (.afv)
//
//   "AFV1" | u16 version | u32 count | u32 dim | count*dim f32 | ids
//
// all little-endian; ids are u32 byte length + UTF-8 bytes, one per row.
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kFeatureFileVersion = 1;

struct FeatureTable {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  std::vector<float> values;  // row-major ids.size() x dim

  std::size_t count() const noexcept { return ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
  FeatureVector feature(std::size_t i, std::string source = "builtin") const;
};

FeatureTable make_feature_table(std::span<const FeatureVector> features,
                                std::span<const std::string> ids);

std::vector<std::uint8_t> encode_feature_file(const FeatureTable& table);
FeatureTable decode_feature_file(std::span<const std::uint8_t> bytes);

void write_feature_file(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Anchor manifest (.manifest.json)
// ---------------------------------------------------------------------------

struct ManifestAnchor {
  std::filesystem::path file;  // resolved against the manifest directory
  std::string generator;
  std::int64_t seed = 0;
  std::size_t prompt_index = 0;
};

struct ManifestCategory {
  std::string name;
  std::vector<std::string> prompts;
  std::vector<ManifestAnchor> anchors;
};

struct AnchorManifest {
  std::optional<std::string> prompt_template;
  std::vector<ManifestCategory> categories;
};

AnchorManifest parse_manifest(std::string_view document,
                              const std::filesystem::path& base_dir = {});
AnchorManifest load_manifest(const std::filesystem::path& path);
nlohmann::json manifest_to_json(const AnchorManifest& manifest,
                                const std::filesystem::path& base_dir = {});

// ---------------------------------------------------------------------------
// Bank (<stem>.afv + <stem>.json)
// ---------------------------------------------------------------------------

struct BankFiles {
  std::filesystem::path features;
  std::filesystem::path metadata;
};

/// "out/bank", "out/bank.afv" and "out/bank.json" all name the same pair.
BankFiles bank_files(const std::filesystem::path& stem);

void save_bank(const AnchorBank& bank, const std::filesystem::path& stem,
               const nlohmann::json& reproducibility = nlohmann::json::object());
AnchorBank load_bank(const std::filesystem::path& stem);

// ---------------------------------------------------------------------------
// Predictions, ground truth, reports
// ---------------------------------------------------------------------------

nlohmann::json predictions_to_json(std::span<const Prediction> predictions,
                                   const std::vector<std::string>& categories,
                                   const nlohmann::json& reproducibility);

struct PredictionSet {
  std::vector<std::string> categories;
  std::vector<Prediction> predictions;
};

PredictionSet predictions_from_json(const nlohmann::json& doc);

/// "id,label" rows, optional header line "id,label".
std::vector<LabeledId> parse_truth_csv(std::string_view text);
std::string write_truth_csv(std::span<const LabeledId> truth);

nlohmann::json report_to_json(const EvalReport& report);
std::string format_report_table(const EvalReport& report);

}  // namespace owc
