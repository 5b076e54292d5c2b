#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "owc/backend.hpp"
#include "owc/classifier.hpp"
#include "owc/error.hpp"
#include "owc/evaluation.hpp"
#include "owc/formats.hpp"
#include "owc/synthetic.hpp"

namespace owc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool rotate = true;
  std::size_t points = 1024;
  bool pad = false;
  std::string descriptor = "builtin";
  std::string backend_cmd;
  int backend_timeout_ms = 30000;
  std::size_t pair_bins = 64;
  std::size_t radial_bins = 32;
  std::size_t max_pairs = 0;  // 0 = all pairs
  unsigned threads = 1;
};

AugmentConfig augment_config(const GlobalOptions& g) {
  return AugmentConfig{g.points, g.rotate, g.seed, g.pad};
}

DescriptorConfig descriptor_config(const GlobalOptions& g) {
  DescriptorConfig cfg;
  cfg.pair_bins = g.pair_bins;
  cfg.radial_bins = g.radial_bins;
  if (g.max_pairs > 0) cfg.max_pairs = g.max_pairs;
  cfg.seed = g.seed;
  return cfg;
}

json reproducibility(const GlobalOptions& g, const std::string& command, json extra) {
  json block = {{"command", command},
                {"seed", g.seed},
                {"rotate", g.rotate},
                {"points", g.points},
                {"pad", g.pad},
                {"descriptor", g.descriptor}};
  if (g.descriptor == "builtin") {
    block["pair_bins"] = g.pair_bins;
    block["radial_bins"] = g.radial_bins;
    block["max_pairs"] = g.max_pairs == 0 ? json(nullptr) : json(g.max_pairs);
  } else {
    block["backend_cmd"] = g.backend_cmd;
  }
  for (auto& [k, v] : extra.items()) block[k] = v;
  return block;
}

// Owns the backend process (if any) for the lifetime of a command.
struct FeaturizerHandle {
  Featurizer featurize;
  std::shared_ptr<BackendProcess> backend;
};

FeaturizerHandle make_featurizer(const GlobalOptions& g) {
  if (g.descriptor == "builtin") return {builtin_featurizer(descriptor_config(g)), nullptr};
  if (g.backend_cmd.empty()) {
    throw Error(ErrorKind::Config, "--descriptor backend requires --backend-cmd");
  }
  auto backend = std::make_shared<BackendProcess>(
      g.backend_cmd, BackendOptions{std::chrono::milliseconds(g.backend_timeout_ms)});
  return {backend_featurizer(backend), backend};
}

struct InputSet {
  std::vector<PointCloud> clouds;
  std::vector<std::optional<std::string>> labels;
};

bool is_cloud_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".off" || ext == ".OFF" || ext == ".xyz";
}

std::string id_from(const fs::path& rel) {
  fs::path p = rel;
  p.replace_extension();
  return p.generic_string();
}

// A directory (label = first sub-directory level), a list file with
// "path[,label]" rows, or a single cloud file.
InputSet collect_inputs(const std::vector<std::string>& specs) {
  InputSet set;
  const auto add = [&](const fs::path& file, std::string id, std::optional<std::string> label) {
    set.clouds.push_back(load_point_cloud(file, std::move(id), label));
    set.labels.push_back(std::move(label));
  };
  for (const auto& spec : specs) {
    const fs::path root(spec);
    if (fs::is_directory(root)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && is_cloud_file(e.path())) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        const fs::path rel = f.lexically_relative(root);
        std::optional<std::string> label;
        if (std::distance(rel.begin(), rel.end()) > 1) label = rel.begin()->string();
        add(f, id_from(rel), label);
      }
    } else if (is_cloud_file(root)) {
      add(root, id_from(root.filename()), std::nullopt);
    } else {
      std::istringstream lines(read_text_file(root));
      std::string line;
      std::size_t number = 0;
      while (std::getline(lines, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::optional<std::string> label;
        std::string path = line;
        if (const auto comma = line.rfind(','); comma != std::string::npos) {
          path = line.substr(0, comma);
          label = line.substr(comma + 1);
        }
        const fs::path file = fs::path(path).is_relative() ? root.parent_path() / path : fs::path(path);
        try {
          add(file, id_from(path), label);
        } catch (const Error& e) {
          throw Error(e.kind(), root.string() + ":" + std::to_string(number) + ": " + e.what());
        }
      }
    }
  }
  if (set.clouds.empty()) throw Error(ErrorKind::EmptyInput, "no input point clouds found");
  return set;
}

LabeledFeatures labeled_features(const InputSet& inputs, std::vector<FeatureVector> features) {
  LabeledFeatures out;
  for (std::size_t i = 0; i < inputs.clouds.size(); ++i) {
    if (!inputs.labels[i]) {
      throw Error(ErrorKind::Config, "input '" + inputs.clouds[i].id() +
                                         "' has no label (use a labeled directory or list)");
    }
    out.ids.push_back(inputs.clouds[i].id());
    out.labels.push_back(*inputs.labels[i]);
  }
  out.features = std::move(features);
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  const auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw Error(ErrorKind::Config, "--counts: bad number '" + std::string(s) + "'");
    }
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (const auto dots = part.find(".."); dots != std::string::npos) {
      const std::size_t lo = number(std::string_view(part).substr(0, dots));
      const std::size_t hi = number(std::string_view(part).substr(dots + 2));
      if (lo > hi) throw Error(ErrorKind::Config, "--counts: empty range '" + part + "'");
      for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    } else if (!part.empty()) {
      out.push_back(number(part));
    }
  }
  if (out.empty()) throw Error(ErrorKind::Config, "--counts is empty");
  return out;
}

std::string csv_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  const std::string s = out.string();
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0
             ? out
             : fs::path(s + suffix);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free open-world point-cloud classifier", "owc"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "RNG seed for rotations, sampling and trials");
  app.add_flag("--rotate,!--no-rotate", g.rotate, "apply a random rotation after normalization");
  app.add_option("--points", g.points, "points kept by farthest point sampling")
      ->check(CLI::PositiveNumber);
  app.add_flag("--pad", g.pad, "pad clouds with fewer points than --points by repetition");
  app.add_option("--descriptor", g.descriptor, "feature source")
      ->check(CLI::IsMember({"builtin", "backend"}));
  app.add_option("--backend-cmd", g.backend_cmd, "shell command starting a feature backend");
  app.add_option("--backend-timeout-ms", g.backend_timeout_ms)->check(CLI::PositiveNumber);
  app.add_option("--pair-bins", g.pair_bins)->check(CLI::PositiveNumber);
  app.add_option("--radial-bins", g.radial_bins)->check(CLI::PositiveNumber);
  app.add_option("--max-pairs", g.max_pairs, "subsample pair distances (0 = all pairs)");
  app.add_option("--threads", g.threads, "prediction threads")->check(CLI::PositiveNumber);

  // bank-build
  auto* bank_cmd = app.add_subcommand("bank-build", "build an anchor bank from a manifest");
  std::string manifest_path, bank_out;
  bank_cmd->add_option("--manifest", manifest_path)->required();
  bank_cmd->add_option("--out", bank_out, "output stem (writes <stem>.afv and <stem>.json)")
      ->required();

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "predict categories for point clouds");
  std::string bank_path, predictions_out, truth_out;
  std::vector<std::string> inputs;
  bool keep_distances = false;
  std::string predict_mode = "nearest";
  classify_cmd->add_option("--bank", bank_path)->required();
  classify_cmd->add_option("--inputs", inputs, "directories, list files or cloud files")
      ->required();
  classify_cmd->add_option("--out", predictions_out)->required();
  classify_cmd->add_option("--truth-out", truth_out, "also write id,label for labeled inputs");
  classify_cmd->add_flag("--keep-distances", keep_distances, "store every anchor distance");
  classify_cmd->add_option("--mode", predict_mode)
      ->check(CLI::IsMember({"nearest", "class-mean"}));

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score predictions against ground truth");
  std::string predictions_in, truth_in, report_out;
  eval_cmd->add_option("--predictions", predictions_in)->required();
  eval_cmd->add_option("--truth", truth_in)->required();
  eval_cmd->add_option("--out", report_out, "report path (.report.json appended if missing)")
      ->required();

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "anchor-count sweep");
  std::string counts_text = "1..7", ablate_out;
  std::size_t trials = 10;
  ablate_cmd->add_option("--bank", bank_path)->required();
  ablate_cmd->add_option("--inputs", inputs)->required();
  ablate_cmd->add_option("--counts", counts_text, "e.g. 1..7 or 1,3,5");
  ablate_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--out", ablate_out, "CSV path")->required();
  ablate_cmd->add_option("--mode", predict_mode)
      ->check(CLI::IsMember({"nearest", "class-mean"}));

  // export
  auto* export_cmd = app.add_subcommand("export", "export features or a 2-D projection");
  std::string export_mode = "pca2d", export_out;
  export_cmd->add_option("--bank", bank_path);
  export_cmd->add_option("--inputs", inputs);
  export_cmd->add_option("--mode", export_mode)->check(CLI::IsMember({"features", "pca2d"}));
  export_cmd->add_option("--out", export_out)->required();

  // conformance
  auto* conf_cmd = app.add_subcommand("conformance", "check a backend against the protocol");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write the synthetic shape benchmark");
  std::string synth_out;
  synthetic::BenchmarkConfig synth_cfg;
  bool synth_rotate_tests = false;
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--anchors", synth_cfg.anchors_per_class)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--tests", synth_cfg.tests_per_class);
  synth_cmd->add_option("--cloud-points", synth_cfg.points_per_cloud)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth_cfg.noise);
  synth_cmd->add_flag("--rotate-tests", synth_rotate_tests, "write test clouds in open pose");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  const auto mode = predict_mode == "class-mean" ? PredictMode::ClassMean
                                                 : PredictMode::NearestAnchor;
  try {
    if (*bank_cmd) {
      const auto manifest = load_manifest(manifest_path);
      auto featurizer = make_featurizer(g);
      const AnchorBank bank = build_bank(manifest, augment_config(g), featurizer.featurize);
      if (featurizer.backend) featurizer.backend->shutdown();
      save_bank(bank, bank_out,
                reproducibility(g, "bank-build", {{"manifest", manifest_path}}));
      const auto files = bank_files(bank_out);
      out << "bank: N_c=" << bank.size() << " N_a=" << bank.min_anchors_per_category();
      if (bank.min_anchors_per_category() * bank.size() != bank.anchor_count()) {
        out << " (min; " << bank.anchor_count() << " total)";
      }
      out << " D=" << bank.feature_dim() << "\n"
          << "wrote " << files.features.string() << " and " << files.metadata.string() << "\n";
      return 0;
    }

    if (*classify_cmd) {
      const AnchorBank bank = load_bank(bank_path);
      const InputSet set = collect_inputs(inputs);
      auto featurizer = make_featurizer(g);
      const auto features = featurize_clouds(set.clouds, augment_config(g), featurizer.featurize);
      if (featurizer.backend) featurizer.backend->shutdown();
      std::vector<std::string> ids;
      for (const auto& c : set.clouds) ids.push_back(c.id());
      const auto preds =
          predict_batch(bank, features, ids, PredictOptions{mode, keep_distances}, g.threads);
      const json repro = reproducibility(
          g, "classify", {{"bank", bank_path}, {"inputs", inputs}, {"mode", predict_mode}});
      write_text_file(predictions_out, predictions_to_json(preds, bank.names(), repro).dump(2) + "\n");
      if (!truth_out.empty()) {
        std::vector<LabeledId> truth;
        for (std::size_t i = 0; i < set.clouds.size(); ++i) {
          if (set.labels[i]) truth.push_back({ids[i], *set.labels[i]});
        }
        write_text_file(truth_out, write_truth_csv(truth));
      }
      out << "classified " << preds.size() << " samples -> " << predictions_out << "\n";
      return 0;
    }

    if (*eval_cmd) {
      json doc;
      try {
        doc = json::parse(read_text_file(predictions_in));
      } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, predictions_in + ": " + e.what());
      }
      const auto set = predictions_from_json(doc);
      const auto truth = parse_truth_csv(read_text_file(truth_in));
      const auto report = evaluate(set.predictions, truth, set.categories);
      json rep = report_to_json(report);
      rep["reproducibility"] =
          reproducibility(g, "evaluate", {{"predictions", predictions_in}, {"truth", truth_in}});
      if (doc.contains("reproducibility")) rep["reproducibility"]["classify"] = doc["reproducibility"];
      const fs::path path = with_suffix(report_out, ".report.json");
      write_text_file(path, rep.dump(2) + "\n");
      out << format_report_table(report);
      for (const auto& c : report.absent_classes) {
        err << "warning: class '" << c << "' has no test samples; excluded from mAcc\n";
      }
      return 0;
    }

    if (*ablate_cmd) {
      const AnchorBank bank = load_bank(bank_path);
      const InputSet set = collect_inputs(inputs);
      auto featurizer = make_featurizer(g);
      auto features = featurize_clouds(set.clouds, augment_config(g), featurizer.featurize);
      if (featurizer.backend) featurizer.backend->shutdown();
      const auto tests = labeled_features(set, std::move(features));
      const auto counts = parse_counts(counts_text);
      const auto result =
          ablate_anchors(bank, tests, counts, trials, g.seed, PredictOptions{mode, false});
      std::ostringstream csv;
      csv << "# "
          << reproducibility(g, "ablate",
                             {{"bank", bank_path}, {"inputs", inputs}, {"counts", counts},
                              {"trials", trials}, {"mode", predict_mode}})
                 .dump()
          << "\n";
      csv << "n_a,mean_oacc,std_oacc,mean_macc,std_macc\n";
      for (const auto& r : result.rows) {
        csv << r.anchors_per_class << ',' << csv_double(r.mean_oacc) << ','
            << csv_double(r.std_oacc) << ',' << csv_double(r.mean_macc) << ','
            << csv_double(r.std_macc) << '\n';
      }
      write_text_file(ablate_out, csv.str());
      out << std::fixed << std::setprecision(2);
      for (const auto& r : result.rows) {
        out << "N_a=" << r.anchors_per_class << "  oAcc " << r.mean_oacc << " +- " << r.std_oacc
            << "  mAcc " << r.mean_macc << " +- " << r.std_macc << "\n";
      }
      return 0;
    }

    if (*export_cmd) {
      if (bank_path.empty() && inputs.empty()) {
        throw Error(ErrorKind::Config, "export needs --bank and/or --inputs");
      }
      std::vector<FeatureVector> features;
      std::vector<std::string> ids, labels;
      std::vector<int> is_anchor;
      if (!bank_path.empty()) {
        const AnchorBank bank = load_bank(bank_path);
        for (const auto& cat : bank.categories()) {
          for (std::size_t j = 0; j < cat.anchors.size(); ++j) {
            features.push_back(cat.anchors[j].feature);
            ids.push_back("anchor:" + cat.name + "/" + std::to_string(j));
            labels.push_back(cat.name);
            is_anchor.push_back(1);
          }
        }
      }
      if (!inputs.empty()) {
        const InputSet set = collect_inputs(inputs);
        auto featurizer = make_featurizer(g);
        auto f = featurize_clouds(set.clouds, augment_config(g), featurizer.featurize);
        if (featurizer.backend) featurizer.backend->shutdown();
        for (std::size_t i = 0; i < set.clouds.size(); ++i) {
          features.push_back(std::move(f[i]));
          ids.push_back(set.clouds[i].id());
          labels.push_back(set.labels[i].value_or(""));
          is_anchor.push_back(0);
        }
      }
      std::ostringstream csv;
      csv << "# "
          << reproducibility(g, "export",
                             {{"bank", bank_path}, {"inputs", inputs}, {"mode", export_mode}})
                 .dump()
          << "\n";
      if (export_mode == "pca2d") {
        const auto rows = export_embedding_2d(features, ids, labels);
        csv << "id,label,is_anchor,x,y\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          csv << rows[i].id << ',' << rows[i].label << ',' << is_anchor[i] << ','
              << csv_double(rows[i].x) << ',' << csv_double(rows[i].y) << '\n';
        }
      } else {
        csv << "id,label,is_anchor";
        for (std::size_t d = 0; d < features.front().dim(); ++d) csv << ",f" << d;
        csv << '\n';
        for (std::size_t i = 0; i < features.size(); ++i) {
          csv << ids[i] << ',' << labels[i] << ',' << is_anchor[i];
          for (double v : features[i].values) csv << ',' << csv_double(v);
          csv << '\n';
        }
      }
      write_text_file(export_out, csv.str());
      out << "exported " << features.size() << " rows -> " << export_out << "\n";
      return 0;
    }

    if (*conf_cmd) {
      if (g.backend_cmd.empty()) throw Error(ErrorKind::Config, "conformance requires --backend-cmd");
      const auto report = run_conformance(
          g.backend_cmd, BackendOptions{std::chrono::milliseconds(g.backend_timeout_ms)});
      for (const auto& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
      }
      return report.passed() ? 0 : 1;
    }

    if (*synth_cmd) {
      synth_cfg.seed = g.seed;
      const auto bench = synthetic::make_benchmark(synth_cfg);
      const fs::path root(synth_out);
      AnchorManifest manifest;
      std::size_t k = 0;
      for (const auto& name : bench.categories) {
        ManifestCategory cat{name, {"A " + name + "."}, {}};
        for (std::size_t j = 0; j < synth_cfg.anchors_per_class; ++j, ++k) {
          const fs::path file = root / "anchors" / name / (std::to_string(j) + ".xyz");
          write_text_file(file, write_xyz(bench.anchors[k]));
          cat.anchors.push_back({file, "synthetic", static_cast<std::int64_t>(j), 0});
        }
        manifest.categories.push_back(std::move(cat));
      }
      write_text_file(root / "anchors.manifest.json",
                      manifest_to_json(manifest, root).dump(2) + "\n");
      const auto tests = synth_rotate_tests ? synthetic::rotate_all(bench.tests, derive_seed(g.seed, 99))
                                            : bench.tests;
      for (const auto& t : tests) {
        write_text_file(root / "test" / (t.id() + ".xyz"), write_xyz(t));
      }
      out << "wrote " << bench.anchors.size() << " anchors and " << tests.size()
          << " test clouds under " << root.string() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace owc::cli
