#include "dehaze/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "dehaze/curation.hpp"
#include "dehaze/errors.hpp"
#include "dehaze/fusion.hpp"
#include "dehaze/geometry.hpp"
#include "dehaze/manifest.hpp"
#include "dehaze/metrics.hpp"
#include "dehaze/pipeline.hpp"
#include "dehaze/png_io.hpp"
#include "dehaze/restorer.hpp"
#include "dehaze/tiling.hpp"

namespace dehaze {

namespace fs = std::filesystem;

namespace {

struct RestorerOptions {
  std::string kind = "identity";
  double gamma = 1.0;
  int radius = 1;
  std::string command;
  std::string workdir;

  void add_to(CLI::App* app) {
    app->add_option("--restorer", kind, "identity, gamma, box_blur or external")
        ->check(CLI::IsMember({"identity", "gamma", "box_blur", "external"}))
        ->capture_default_str();
    app->add_option("--gamma", gamma, "exponent for the gamma restorer")->capture_default_str();
    app->add_option("--radius", radius, "radius for the box_blur restorer")->capture_default_str();
    app->add_option("--command", command, "external command template with {in} and {out}");
    app->add_option("--workdir", workdir, "parent of per-call scratch directories (external)");
  }

  RestorerSpec spec() const {
    RestorerSpec s;
    s.label = kind;
    if (kind == "gamma") {
      s.kind = GammaRestorer{gamma};
    } else if (kind == "box_blur") {
      s.kind = BoxBlurRestorer{radius};
    } else if (kind == "external") {
      s.kind = ExternalRestorer{command, workdir};
    } else {
      s.kind = IdentityRestorer{};
    }
    validate(s);
    return s;
  }
};

struct TileOptions {
  int tile = 512;
  int overlap = 32;
  std::string blend = "linear_feather";

  void add_to(CLI::App* app) {
    app->add_option("--tile", tile, "tile size in pixels (multiple of 8)")->capture_default_str();
    app->add_option("--overlap", overlap, "overlap between tiles in pixels")->capture_default_str();
    app->add_option("--blend", blend, "uniform_average or linear_feather")
        ->check(CLI::IsMember({"uniform_average", "linear_feather"}))
        ->capture_default_str();
  }

  TileConfig config() const {
    TileConfig cfg{tile, overlap, parse_blend(blend)};
    validate(cfg);
    return cfg;
  }
};

std::vector<fs::path> png_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Applies `fn` to a single PNG or to every PNG of a directory.
void map_images(const fs::path& in, const fs::path& out, const RestoreFn& fn, std::ostream& log) {
  if (fs::is_directory(in)) {
    fs::create_directories(out);
    for (const auto& file : png_files(in)) {
      save_png(fn(load_png(file)), out / file.filename());
      log << file.filename().string() << '\n';
    }
    return;
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_png(fn(load_png(in)), out);
}

std::vector<double> parse_weight_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string field = text.substr(pos, comma - pos);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
      throw ConfigError("--weights: malformed number '" + field + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

void print_means(std::ostream& out, const std::string& name, const MetricReport& r) {
  out << name << ": PSNR-Y " << r.means.psnr_y << "  SSIM-Y " << r.means.ssim_y << "  PSNR-RGB "
      << r.means.psnr_rgb << "  SSIM-RGB " << r.means.ssim_rgb << "  (" << r.entries.size()
      << " pairs, " << r.failures.size() << " failed)\n";
}

void print_failures(std::ostream& err, const MetricReport& r) {
  for (const auto& f : r.failures) err << "error: pair " << f.pair_id << ": " << f.message << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nighttime dehazing pipeline harness: curation, self-ensemble, fusion, tiling, evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // curate
  auto* curate = app.add_subcommand("curate", "Score candidate embeddings against a target domain");
  std::string targets_path;
  std::vector<std::string> candidate_paths;
  std::optional<double> threshold;
  std::optional<std::size_t> top_k;
  std::vector<std::string> quotas;
  std::string aggregation = "centroid";
  std::string report_path;
  std::string summary_path;
  curate->add_option("--targets", targets_path, "target-domain embedding file")->required();
  curate->add_option("--candidates", candidate_paths, "candidate embedding file(s)")->required();
  auto* th_opt = curate->add_option("--threshold", threshold, "keep candidates with score >= tau");
  auto* k_opt = curate->add_option("--top-k", top_k, "keep the k best candidates overall");
  auto* q_opt = curate->add_option("--quota", quotas, "keep the k best of a source, as SOURCE=K");
  th_opt->excludes(k_opt)->excludes(q_opt);
  k_opt->excludes(q_opt);
  curate->add_option("--aggregation", aggregation, "centroid or max")
      ->check(CLI::IsMember({"centroid", "max"}))
      ->capture_default_str();
  curate->add_option("--report", report_path, "selection report (embedding format + selected column)")
      ->required();
  curate->add_option("--summary", summary_path, "JSON summary with per-source counts")->required();

  // crop
  auto* crop = app.add_subcommand("crop", "Crop every PNG of a directory to a multiple of N");
  std::string crop_in, crop_out;
  int multiple = 8;
  crop->add_option("--in", crop_in, "input directory")->required()->check(CLI::ExistingDirectory);
  crop->add_option("--out", crop_out, "output directory")->required();
  crop->add_option("--multiple", multiple, "crop multiple")->capture_default_str()->check(CLI::PositiveNumber);

  // ensemble
  auto* ens = app.add_subcommand("ensemble", "x8 flip/transpose self-ensemble around one restorer");
  RestorerOptions ens_restorer;
  std::string ens_in, ens_out;
  bool ens_parallel = false;
  ens_restorer.add_to(ens);
  ens->add_option("--in", ens_in, "input PNG or directory")->required()->check(CLI::ExistingPath);
  ens->add_option("--out", ens_out, "output PNG or directory")->required();
  ens->add_flag("--parallel", ens_parallel, "run the 8 branches concurrently");

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "Weighted fusion of N images");
  std::vector<std::string> fuse_inputs;
  std::string weights_text, fuse_out;
  std::vector<std::string> fuse_labels;
  bool normalize = false;
  fuse_cmd->add_option("images", fuse_inputs, "input PNGs")->required()->check(CLI::ExistingFile);
  fuse_cmd->add_option("--weights", weights_text, "comma-separated weights, one per image")->required();
  fuse_cmd->add_option("--labels", fuse_labels, "snapshot labels (default: input order)");
  fuse_cmd->add_flag("--normalize", normalize, "rescale weights to sum to 1");
  fuse_cmd->add_option("--out", fuse_out, "output PNG")->required();

  // tile
  auto* tile_cmd = app.add_subcommand("tile", "Overlap-tiled restoration");
  RestorerOptions tile_restorer;
  TileOptions tile_opts;
  std::string tile_in, tile_out;
  tile_restorer.add_to(tile_cmd);
  tile_opts.add_to(tile_cmd);
  tile_cmd->add_option("--in", tile_in, "input PNG or directory")->required()->check(CLI::ExistingPath);
  tile_cmd->add_option("--out", tile_out, "output PNG or directory")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM on Y and RGB against ground truth");
  std::string restored_dir, gt_dir, manifest_root, csv_path, json_path, hook_cmd;
  bool use_inputs = false;
  auto* restored_opt = eval->add_option("--restored", restored_dir, "directory of restored PNGs");
  auto* gt_opt = eval->add_option("--gt-dir", gt_dir, "ground-truth directory, matched by file name");
  auto* manifest_opt = eval->add_option("--manifest", manifest_root, "dataset root with img_0/img_1 scenes");
  auto* inputs_flag = eval->add_flag("--use-inputs", use_inputs, "score the manifest's hazy inputs");
  gt_opt->excludes(manifest_opt);
  inputs_flag->needs(manifest_opt)->excludes(restored_opt);
  eval->add_option("--csv", csv_path, "CSV report path");
  eval->add_option("--json", json_path, "JSON report path");
  eval->add_option("--metric-hook", hook_cmd, "extra metric command with {restored} and {gt}");

  // run
  auto* run = app.add_subcommand("run", "Full pipeline from a config file");
  std::string config_path, run_manifest, run_output;
  run->add_option("--config", config_path, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--manifest", run_manifest, "dataset root (overrides manifest_root)");
  run->add_option("--output-dir", run_output, "output directory (overrides output_dir)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "usage error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (curate->parsed()) {
      if (!threshold && !top_k && quotas.empty()) {
        err << "usage error: one of --threshold, --top-k or --quota is required\n\n" << curate->help();
        return 2;
      }
      const auto targets = load_embeddings(targets_path);
      std::vector<Embedding> candidates;
      for (const auto& p : candidate_paths) {
        auto more = load_embeddings(p);
        if (!candidates.empty() && !more.empty() && more.front().vector.size() != candidates.front().vector.size()) {
          throw ConfigError(p + ": dimension differs from the other candidate files");
        }
        candidates.insert(candidates.end(), more.begin(), more.end());
      }
      CurationConfig cfg;
      if (threshold) {
        cfg.mode = ThresholdSelection{*threshold};
      } else if (top_k) {
        cfg.mode = TopKGlobal{*top_k};
      } else {
        TopKPerSource per;
        for (const auto& q : quotas) {
          const auto eq = q.rfind('=');
          std::size_t k = 0;
          if (eq == std::string::npos || eq == 0 ||
              std::from_chars(q.data() + eq + 1, q.data() + q.size(), k).ec != std::errc()) {
            throw ConfigError("--quota expects SOURCE=K, got '" + q + "'");
          }
          per.k[q.substr(0, eq)] = k;
        }
        cfg.mode = std::move(per);
      }
      const auto agg = aggregation == "max" ? TargetAggregation::max_similarity : TargetAggregation::centroid;
      const auto result = select(score_against_targets(targets, candidates, agg), cfg);
      for (const auto& w : result.warnings) err << "warning: " << w << '\n';
      write_selection_report(report_path, candidates, result.records);
      std::ofstream summary(summary_path, std::ios::binary);
      summary << selection_summary_json(result.records, targets);
      if (!summary) throw IoError(summary_path + ": write failed");
      const auto kept = std::count_if(result.records.begin(), result.records.end(),
                                      [](const SimilarityRecord& r) { return r.selected; });
      out << "selected " << kept << " of " << result.records.size() << " candidates\n";
      return 0;
    }

    if (crop->parsed()) {
      const auto files = png_files(crop_in);
      fs::create_directories(crop_out);
      for (const auto& f : files) save_png(crop_to_multiple(load_png(f), multiple), fs::path(crop_out) / f.filename());
      out << "cropped " << files.size() << " images\n";
      return 0;
    }

    if (ens->parsed()) {
      const RestoreFn inner = make_restorer(ens_restorer.spec());
      const EnsembleOptions opts{ens_parallel};
      map_images(ens_in, ens_out, [&](const ImageBuffer& img) { return self_ensemble(inner, img, opts); }, out);
      return 0;
    }

    if (fuse_cmd->parsed()) {
      FusionWeights w;
      w.weights = parse_weight_list(weights_text);
      w.auto_normalize = normalize;
      if (fuse_labels.empty()) {
        for (std::size_t i = 0; i < fuse_inputs.size(); ++i) {
          char label[16];
          std::snprintf(label, sizeof label, "input%04zu", i);
          w.labels.emplace_back(label);
        }
      } else {
        w.labels = fuse_labels;
      }
      std::vector<ImageBuffer> images;
      for (const auto& p : fuse_inputs) images.push_back(load_png(p));
      const fs::path dst(fuse_out);
      if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
      save_png(fuse(images, w), dst);
      return 0;
    }

    if (tile_cmd->parsed()) {
      const RestoreFn fn = tiled(make_restorer(tile_restorer.spec()), tile_opts.config());
      map_images(tile_in, tile_out, fn, out);
      return 0;
    }

    if (eval->parsed()) {
      std::optional<ExternalMetricHook> hook;
      if (!hook_cmd.empty()) hook = ExternalMetricHook{hook_cmd};
      MetricReport report;
      if (use_inputs) {
        report = evaluate_inputs(build_manifest(manifest_root), hook);
      } else {
        if (restored_dir.empty() || (gt_dir.empty() && manifest_root.empty())) {
          err << "usage error: eval needs --restored with --gt-dir or --manifest\n\n" << eval->help();
          return 2;
        }
        std::vector<std::tuple<std::string, fs::path, fs::path>> pairs;
        if (!manifest_root.empty()) {
          for (const auto& p : build_manifest(manifest_root).pairs) {
            pairs.emplace_back(p.pair_id, fs::path(restored_dir) / (p.pair_id + ".png"), p.gt_path);
          }
        } else {
          for (const auto& g : png_files(gt_dir)) {
            pairs.emplace_back(g.stem().string(), fs::path(restored_dir) / g.filename(), g);
          }
          if (pairs.empty()) throw ConfigError(gt_dir + ": no PNG files");
        }
        std::vector<MetricEntry> entries;
        std::vector<PairFailure> failures;
        for (const auto& [id, restored, gt] : pairs) {
          try {
            MetricEntry e = evaluate_pair(id, load_png(restored), load_png(gt));
            if (hook) e.lpips = run_metric_hook(*hook, restored, gt);
            entries.push_back(std::move(e));
          } catch (const std::exception& ex) {
            failures.push_back({id, ex.what()});
          }
        }
        report = aggregate_with_failures(std::move(entries), std::move(failures));
      }
      write_report(report, csv_path, json_path);
      if (csv_path.empty() && json_path.empty()) out << to_csv(report);
      print_means(out, "mean", report);
      print_failures(err, report);
      return report.failures.empty() ? 0 : 1;
    }

    if (run->parsed()) {
      PipelineConfig cfg = load_pipeline_config(config_path);
      if (!run_output.empty()) cfg.output_dir = fs::absolute(run_output);
      if (!run_manifest.empty()) cfg.manifest_root = fs::absolute(run_manifest);
      if (!cfg.manifest_root) throw ConfigError("manifest_root: required (in the config or via --manifest)");
      const PairManifest manifest = build_manifest(*cfg.manifest_root);
      for (const auto& s : manifest.skipped) err << "warning: skipped scene " << s.scene << ": " << s.reason << '\n';
      const PipelineResult result = run_pipeline(manifest, cfg);
      print_means(out, "input", result.baseline);
      print_means(out, "fused", result.report);
      print_failures(err, result.report);
      return result.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dehaze
