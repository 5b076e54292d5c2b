#include "owc/formats.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "owc/error.hpp"

namespace owc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Non-empty lines with '#' comments stripped.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tokens = split_ws(line);
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool parse_size(std::string_view token, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

Point3 parse_point(const Line& line, const char* what) {
  if (line.tokens.size() < 3) {
    throw ParseError(std::string(what) + " needs 3 coordinates, found " +
                         std::to_string(line.tokens.size()),
                     line.number);
  }
  Point3 p{};
  for (int a = 0; a < 3; ++a) {
    if (!parse_double(line.tokens[a], p[a])) {
      throw ParseError("non-numeric coordinate '" + std::string(line.tokens[a]) + "'",
                       line.number);
    }
  }
  return p;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::Format, std::string("feature file truncated in ") + what +
                                         " at byte offset " + std::to_string(pos_));
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint16_t u16(const char* what) {
    const auto b = take(2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32(const char* what) {
    const auto b = take(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

PointCloud parse_off(std::string_view text, std::string id) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty OFF input", 1);

  const Line& header = lines.front();
  std::string_view first = header.tokens.front();
  if (first.substr(0, 3) != "OFF") {
    throw ParseError("missing OFF header", header.number);
  }

  // Counts either follow "OFF" on the same line ("OFF3 1 0" or "OFF 3 1 0")
  // or occupy the next content line.
  std::vector<std::string_view> counts;
  std::size_t counts_line = header.number;
  std::size_t next = 1;
  if (first.size() > 3) counts.push_back(first.substr(3));
  counts.insert(counts.end(), header.tokens.begin() + 1, header.tokens.end());
  if (counts.empty()) {
    if (lines.size() < 2) throw ParseError("missing vertex/face counts", header.number + 1);
    counts = lines[1].tokens;
    counts_line = lines[1].number;
    next = 2;
  }
  if (counts.size() < 2) {
    throw ParseError("header needs vertex and face counts", counts_line);
  }
  std::size_t nv = 0, nf = 0;
  if (!parse_size(counts[0], nv) || !parse_size(counts[1], nf)) {
    throw ParseError("malformed vertex/face counts", counts_line);
  }
  if (counts.size() > 2) {
    std::size_t ne = 0;
    if (!parse_size(counts[2], ne)) throw ParseError("malformed edge count", counts_line);
  }

  std::vector<Point3> points;
  points.reserve(nv);
  for (std::size_t v = 0; v < nv; ++v, ++next) {
    if (next >= lines.size()) {
      const std::size_t at = lines.empty() ? 1 : lines.back().number + 1;
      throw ParseError("declared " + std::to_string(nv) + " vertices, found " +
                           std::to_string(v),
                       at);
    }
    points.push_back(parse_point(lines[next], "vertex"));
  }
  for (std::size_t f = 0; f < nf; ++f, ++next) {
    if (next >= lines.size()) {
      throw ParseError("declared " + std::to_string(nf) + " faces, found " +
                           std::to_string(f),
                       lines.back().number + 1);
    }
    const Line& line = lines[next];
    std::size_t arity = 0;
    if (!parse_size(line.tokens[0], arity) || line.tokens.size() < arity + 1) {
      throw ParseError("malformed face", line.number);
    }
    for (std::size_t k = 1; k <= arity; ++k) {
      std::size_t idx = 0;
      if (!parse_size(line.tokens[k], idx) || idx >= nv) {
        throw ParseError("face index out of range", line.number);
      }
    }
  }
  if (points.empty()) throw ParseError("OFF file declares no vertices", counts_line);
  return PointCloud(std::move(id), std::move(points));
}

PointCloud parse_xyz(std::string_view text, std::string id) {
  std::vector<Point3> points;
  for (const auto& line : content_lines(text)) points.push_back(parse_point(line, "row"));
  if (points.empty()) throw ParseError("no points in XYZ input", 1);
  return PointCloud(std::move(id), std::move(points));
}

std::string write_off(const PointCloud& cloud) {
  std::string out = "OFF\n" + std::to_string(cloud.size()) + " 0 0\n";
  for (const auto& p : cloud.points()) {
    out += format_double(p[0]) + ' ' + format_double(p[1]) + ' ' + format_double(p[2]) + '\n';
  }
  return out;
}

std::string write_xyz(const PointCloud& cloud) {
  std::string out;
  for (const auto& p : cloud.points()) {
    out += format_double(p[0]) + ' ' + format_double(p[1]) + ' ' + format_double(p[2]) + '\n';
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

PointCloud load_point_cloud(const fs::path& path, std::string id,
                            std::optional<std::string> label) {
  const std::string text = read_text_file(path);
  const auto ext = path.extension().string();
  try {
    PointCloud cloud = [&] {
      if (ext == ".off" || ext == ".OFF") return parse_off(text, id);
      if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return parse_xyz(text, id);
      throw Error(ErrorKind::Parse, "unsupported point-cloud extension '" + ext + "'");
    }();
    return PointCloud(std::move(id), cloud.points(), std::move(label));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

FeatureVector FeatureTable::feature(std::size_t i, std::string source) const {
  const auto r = row(i);
  FeatureVector f;
  f.values.assign(r.begin(), r.end());
  f.source = std::move(source);
  return f;
}

FeatureTable make_feature_table(std::span<const FeatureVector> features,
                                std::span<const std::string> ids) {
  if (features.size() != ids.size()) {
    throw Error(ErrorKind::Shape, "feature table: " + std::to_string(features.size()) +
                                      " rows but " + std::to_string(ids.size()) + " ids");
  }
  FeatureTable table;
  table.dim = features.empty() ? 0 : features.front().dim();
  table.ids.assign(ids.begin(), ids.end());
  table.values.reserve(features.size() * table.dim);
  for (const auto& f : features) {
    if (f.dim() != table.dim) {
      throw Error(ErrorKind::Shape, "feature table: non-uniform dimensions");
    }
    for (double v : f.values) table.values.push_back(static_cast<float>(v));
  }
  return table;
}

std::vector<std::uint8_t> encode_feature_file(const FeatureTable& table) {
  if (table.dim == 0) throw Error(ErrorKind::Format, "feature file: dim must be positive");
  if (table.values.size() != table.count() * table.dim) {
    throw Error(ErrorKind::Format, "feature file: payload size does not match count x dim");
  }
  std::vector<std::uint8_t> out{'A', 'F', 'V', '1'};
  put_u16(out, kFeatureFileVersion);
  put_u32(out, static_cast<std::uint32_t>(table.count()));
  put_u32(out, static_cast<std::uint32_t>(table.dim));
  for (float v : table.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (const auto& id : table.ids) {
    put_u32(out, static_cast<std::uint32_t>(id.size()));
    out.insert(out.end(), id.begin(), id.end());
  }
  return out;
}

FeatureTable decode_feature_file(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.take(4, "magic");
  if (std::memcmp(magic.data(), "AFV1", 4) != 0) {
    throw Error(ErrorKind::Format, "feature file: bad magic (expected AFV1)");
  }
  const std::uint16_t version = in.u16("version");
  if (version != kFeatureFileVersion) {
    throw Error(ErrorKind::Format,
                "feature file: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = in.u32("count");
  const std::uint32_t dim = in.u32("dim");
  if (dim == 0) throw Error(ErrorKind::Format, "feature file: dim is 0");
  const std::uint64_t payload = std::uint64_t{count} * dim * 4;
  if (payload > in.remaining()) {
    throw Error(ErrorKind::Format, "feature file truncated: payload needs " +
                                       std::to_string(payload) + " bytes, " +
                                       std::to_string(in.remaining()) + " remain");
  }

  FeatureTable table;
  table.dim = dim;
  table.values.resize(std::size_t{count} * dim);
  for (auto& v : table.values) v = std::bit_cast<float>(in.u32("payload"));
  table.ids.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = in.u32("id table");
    const auto raw = in.take(len, "id table");
    table.ids.emplace_back(reinterpret_cast<const char*>(raw.data()), raw.size());
  }
  if (in.remaining() != 0) {
    throw Error(ErrorKind::Format, "feature file: " + std::to_string(in.remaining()) +
                                       " trailing bytes at offset " +
                                       std::to_string(in.offset()));
  }
  return table;
}

void write_feature_file(const fs::path& path, const FeatureTable& table) {
  const auto bytes = encode_feature_file(table);
  write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

FeatureTable read_feature_file(const fs::path& path) {
  const std::string raw = read_text_file(path);
  try {
    return decode_feature_file(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

AnchorManifest parse_manifest(std::string_view document, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("manifest: ") + e.what());
  }
  const auto fail = [](const std::string& msg) -> void {
    throw Error(ErrorKind::Validation, "manifest: " + msg);
  };
  if (!doc.is_object()) fail("top level must be an object");

  AnchorManifest manifest;
  if (doc.contains("prompt_template")) {
    if (!doc["prompt_template"].is_string()) fail("prompt_template must be a string");
    manifest.prompt_template = doc["prompt_template"].get<std::string>();
  }
  if (!doc.contains("categories") || !doc["categories"].is_array()) {
    fail("'categories' array is required");
  }
  if (doc["categories"].empty()) fail("'categories' is empty");

  std::set<std::string> names;
  for (const auto& c : doc["categories"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
      fail("every category needs a string 'name'");
    }
    ManifestCategory cat;
    cat.name = c["name"].get<std::string>();
    if (cat.name.empty()) fail("category name is empty");
    if (!names.insert(cat.name).second) fail("duplicate category '" + cat.name + "'");

    if (c.contains("prompts")) {
      if (!c["prompts"].is_array()) fail("category '" + cat.name + "': prompts must be an array");
      for (const auto& p : c["prompts"]) {
        if (!p.is_string()) fail("category '" + cat.name + "': prompts must be strings");
        cat.prompts.push_back(p.get<std::string>());
      }
    }
    if (!c.contains("anchors") || !c["anchors"].is_array() || c["anchors"].empty()) {
      fail("category '" + cat.name + "' has no anchors");
    }
    for (std::size_t j = 0; j < c["anchors"].size(); ++j) {
      const auto& a = c["anchors"][j];
      const std::string where = "category '" + cat.name + "' anchor " + std::to_string(j);
      if (!a.is_object() || !a.contains("file") || !a["file"].is_string()) {
        fail(where + ": string 'file' is required");
      }
      ManifestAnchor anchor;
      fs::path file = a["file"].get<std::string>();
      anchor.file = file.is_relative() && !base_dir.empty() ? base_dir / file : file;
      anchor.generator = a.value("generator", std::string("other"));
      if (a.contains("seed")) {
        if (!a["seed"].is_number_integer()) fail(where + ": seed must be an integer");
        anchor.seed = a["seed"].get<std::int64_t>();
      }
      if (a.contains("prompt_index")) {
        if (!a["prompt_index"].is_number_unsigned() && !a["prompt_index"].is_number_integer()) {
          fail(where + ": prompt_index must be an integer");
        }
        const auto idx = a["prompt_index"].get<std::int64_t>();
        if (idx < 0) fail(where + ": prompt_index is negative");
        anchor.prompt_index = static_cast<std::size_t>(idx);
      }
      if (anchor.prompt_index >= cat.prompts.size()) {
        fail(where + ": prompt_index " + std::to_string(anchor.prompt_index) +
             " out of range (" + std::to_string(cat.prompts.size()) + " prompts)");
      }
      cat.anchors.push_back(std::move(anchor));
    }
    manifest.categories.push_back(std::move(cat));
  }
  return manifest;
}

AnchorManifest load_manifest(const fs::path& path) {
  try {
    return parse_manifest(read_text_file(path), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

json manifest_to_json(const AnchorManifest& manifest, const fs::path& base_dir) {
  json doc = json::object();
  if (manifest.prompt_template) doc["prompt_template"] = *manifest.prompt_template;
  doc["categories"] = json::array();
  for (const auto& cat : manifest.categories) {
    json c = {{"name", cat.name}, {"prompts", cat.prompts}, {"anchors", json::array()}};
    for (const auto& a : cat.anchors) {
      const fs::path file = base_dir.empty() ? a.file : a.file.lexically_relative(base_dir);
      c["anchors"].push_back({{"file", file.generic_string()},
                              {"generator", a.generator},
                              {"seed", a.seed},
                              {"prompt_index", a.prompt_index}});
    }
    doc["categories"].push_back(std::move(c));
  }
  return doc;
}

// ---------------------------------------------------------------------------

BankFiles bank_files(const fs::path& stem) {
  fs::path base = stem;
  if (base.extension() == ".afv" || base.extension() == ".json") base.replace_extension();
  return {fs::path(base).concat(".afv"), fs::path(base).concat(".json")};
}

void save_bank(const AnchorBank& bank, const fs::path& stem, const json& reproducibility) {
  const auto files = bank_files(stem);
  std::vector<FeatureVector> features;
  std::vector<std::string> ids;
  json meta = {{"format", "owc-bank"},
               {"version", 1},
               {"features_file", files.features.filename().string()},
               {"feature_dim", bank.feature_dim()},
               {"feature_source", bank.categories().front().anchors.front().feature.source},
               {"reproducibility", reproducibility},
               {"categories", json::array()}};
  for (const auto& cat : bank.categories()) {
    json c = {{"name", cat.name}, {"anchors", json::array()}};
    for (std::size_t j = 0; j < cat.anchors.size(); ++j) {
      const auto& a = cat.anchors[j];
      c["anchors"].push_back({{"row", features.size()},
                              {"source_file", a.provenance.source_file},
                              {"generator", a.provenance.generator},
                              {"seed", a.provenance.seed},
                              {"prompt", a.provenance.prompt}});
      features.push_back(a.feature);
      ids.push_back(cat.name + "/" + std::to_string(j));
    }
    meta["categories"].push_back(std::move(c));
  }
  write_feature_file(files.features, make_feature_table(features, ids));
  write_text_file(files.metadata, meta.dump(2) + "\n");
}

AnchorBank load_bank(const fs::path& stem) {
  const auto files = bank_files(stem);
  json meta;
  try {
    meta = json::parse(read_text_file(files.metadata));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, files.metadata.string() + ": " + e.what());
  }
  try {
    const fs::path afv =
        files.metadata.parent_path() / meta.at("features_file").get<std::string>();
    const FeatureTable table = read_feature_file(afv);
    const auto dim = meta.at("feature_dim").get<std::size_t>();
    if (table.dim != dim) {
      throw Error(ErrorKind::Format, "bank metadata declares dim " + std::to_string(dim) +
                                         ", feature file has " + std::to_string(table.dim));
    }
    const std::string source = meta.value("feature_source", std::string("builtin"));
    std::vector<Category> cats;
    for (const auto& c : meta.at("categories")) {
      Category cat{c.at("name").get<std::string>(), {}};
      for (const auto& a : c.at("anchors")) {
        const auto row = a.at("row").get<std::size_t>();
        if (row >= table.count()) {
          throw Error(ErrorKind::Format, "bank metadata references row " +
                                             std::to_string(row) + " of " +
                                             std::to_string(table.count()));
        }
        AnchorProvenance prov{a.value("source_file", std::string{}),
                              a.value("generator", std::string{}),
                              a.value("seed", std::int64_t{0}),
                              a.value("prompt", std::string{})};
        cat.anchors.push_back({table.feature(row, source), std::move(prov)});
      }
      cats.push_back(std::move(cat));
    }
    return AnchorBank(std::move(cats));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, files.metadata.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

json predictions_to_json(std::span<const Prediction> predictions,
                         const std::vector<std::string>& categories,
                         const json& reproducibility) {
  json doc = {{"categories", categories},
              {"reproducibility", reproducibility},
              {"predictions", json::array()}};
  for (const auto& p : predictions) {
    json row = {{"id", p.sample_id},
                {"predicted", p.predicted},
                {"category_index", p.category_index},
                {"best_distance", p.best_distance}};
    if (!p.per_anchor_distances.empty()) {
      row["distances"] = json::array();
      for (const auto& d : p.per_anchor_distances) {
        row["distances"].push_back({d.category, d.anchor, d.distance});
      }
    }
    doc["predictions"].push_back(std::move(row));
  }
  return doc;
}

PredictionSet predictions_from_json(const json& doc) {
  try {
    PredictionSet out;
    out.categories = doc.at("categories").get<std::vector<std::string>>();
    for (const auto& row : doc.at("predictions")) {
      Prediction p;
      p.sample_id = row.at("id").get<std::string>();
      p.predicted = row.at("predicted").get<std::string>();
      p.category_index = row.value("category_index", std::size_t{0});
      p.best_distance = row.value("best_distance", 0.0);
      if (row.contains("distances")) {
        for (const auto& d : row["distances"]) {
          p.per_anchor_distances.push_back(
              {d.at(0).get<std::size_t>(), d.at(1).get<std::size_t>(), d.at(2).get<double>()});
        }
      }
      out.predictions.push_back(std::move(p));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("predictions document: ") + e.what());
  }
}

std::vector<LabeledId> parse_truth_csv(std::string_view text) {
  std::vector<LabeledId> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.rfind(',');
    if (comma == std::string_view::npos || comma == 0 || comma + 1 == line.size()) {
      throw ParseError("expected 'id,label'", number);
    }
    if (number == 1 && line == "id,label") continue;
    out.push_back({std::string(line.substr(0, comma)), std::string(line.substr(comma + 1))});
  }
  return out;
}

std::string write_truth_csv(std::span<const LabeledId> truth) {
  std::string out = "id,label\n";
  for (const auto& t : truth) out += t.id + "," + t.label + "\n";
  return out;
}

json report_to_json(const EvalReport& report) {
  json per_class = json::array();
  for (double v : report.per_class_acc) {
    per_class.push_back(std::isnan(v) ? json(nullptr) : json(v));
  }
  return {{"categories", report.categories},
          {"confusion", report.confusion},
          {"per_class_acc", per_class},
          {"absent_classes", report.absent_classes},
          {"oacc", report.oacc},
          {"macc", report.macc},
          {"n_samples", report.n_samples}};
}

std::string format_report_table(const EvalReport& report) {
  std::size_t width = 8;
  for (const auto& c : report.categories) width = std::max(width, c.size());
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(static_cast<int>(width)) << "class" << "  "
      << std::right << std::setw(8) << "acc%" << "  " << std::setw(6) << "n" << "\n";
  for (std::size_t i = 0; i < report.categories.size(); ++i) {
    std::size_t n = 0;
    for (auto v : report.confusion[i]) n += v;
    out << std::left << std::setw(static_cast<int>(width)) << report.categories[i] << "  "
        << std::right << std::setw(8);
    if (std::isnan(report.per_class_acc[i])) {
      out << "absent";
    } else {
      out << report.per_class_acc[i];
    }
    out << "  " << std::setw(6) << n << "\n";
  }
  out << "oAcc " << report.oacc << "  mAcc " << report.macc << "  (n=" << report.n_samples
      << ")\n";
  return out.str();
}

}  // namespace owc
