#include "dehaze/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dehaze/errors.hpp"
#include "dehaze/geometry.hpp"
#include "dehaze/png_io.hpp"
#include "dehaze/process.hpp"

namespace dehaze {

namespace fs = std::filesystem;
using nlohmann::json;

void validate(const PipelineConfig& cfg) {
  if (cfg.snapshots.empty()) throw ConfigError("snapshots: at least one snapshot is required");
  if (cfg.snapshots.size() != cfg.fusion.weights.size()) {
    throw ConfigError("fusion.weights: " + std::to_string(cfg.fusion.weights.size()) +
                      " weights for " + std::to_string(cfg.snapshots.size()) + " snapshots");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
    const auto& s = cfg.snapshots[i];
    if (s.label.empty()) throw ConfigError("snapshots[" + std::to_string(i) + "].label: empty");
    if (!labels.insert(s.label).second) {
      throw ConfigError("snapshots[" + std::to_string(i) + "].label: duplicate label '" + s.label + "'");
    }
    validate(s);
  }
  if (cfg.fusion.labels.size() != cfg.snapshots.size()) {
    throw ConfigError("fusion: label count does not match snapshots");
  }
  for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
    if (cfg.fusion.labels[i] != cfg.snapshots[i].label) {
      throw ConfigError("fusion: label " + std::to_string(i) + " does not match snapshot label");
    }
  }
  effective_weights(cfg.fusion);
  if (cfg.tiling) validate(*cfg.tiling);
  if (cfg.output_dir.empty()) throw ConfigError("output_dir: required");
}

namespace {

// Walks a JSON document and reports schema violations with their field path.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + what);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) Reader(value, child_path(key)).fail("unknown field");
    }
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  Reader at(const char* key) const {
    if (!node_.contains(key)) Reader(node_, child_path(key)).fail("required field is missing");
    return Reader(node_.at(key), child_path(key));
  }

  Reader at(std::size_t i) const { return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t array_size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }

  int integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<int>();
  }

  bool boolean() const {
    if (!node_.is_boolean()) fail("expected true or false");
    return node_.get<bool>();
  }

  const std::string& path() const { return path_; }

 private:
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

RestorerSpec parse_snapshot(const Reader& r, const fs::path& base) {
  r.expect_object({"label", "restorer", "gamma", "radius", "command", "workdir"});
  RestorerSpec spec;
  spec.label = r.at("label").string();
  const std::string kind = r.at("restorer").string();
  if (kind == "identity") {
    spec.kind = IdentityRestorer{};
  } else if (kind == "gamma") {
    const double g = r.at("gamma").number();
    if (!(g > 0.0)) r.at("gamma").fail("must be a positive number");
    spec.kind = GammaRestorer{g};
  } else if (kind == "box_blur") {
    const int radius = r.at("radius").integer();
    if (radius < 1) r.at("radius").fail("must be >= 1");
    spec.kind = BoxBlurRestorer{radius};
  } else if (kind == "external") {
    ExternalRestorer ext;
    ext.command_template = r.at("command").string();
    if (ext.command_template.find("{in}") == std::string::npos ||
        ext.command_template.find("{out}") == std::string::npos) {
      r.at("command").fail("must contain {in} and {out}");
    }
    if (r.has("workdir")) ext.workdir = resolve(base, r.at("workdir").string());
    spec.kind = std::move(ext);
  } else {
    r.at("restorer").fail("unknown restorer '" + kind + "' (identity, gamma, box_blur, external)");
  }
  return spec;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  const Reader root(doc, "");
  root.expect_object({"version", "manifest_root", "output_dir", "self_ensemble", "tiling", "snapshots",
                      "fusion", "metric_hook"});
  const int version = root.at("version").integer();
  if (version != kConfigSchemaVersion) {
    root.at("version").fail("unsupported schema version " + std::to_string(version));
  }

  PipelineConfig cfg;
  cfg.output_dir = resolve(base_dir, root.at("output_dir").string());
  if (root.has("manifest_root")) cfg.manifest_root = resolve(base_dir, root.at("manifest_root").string());
  if (root.has("self_ensemble")) cfg.self_ensemble = root.at("self_ensemble").boolean();

  if (root.has("tiling")) {
    const Reader t = root.at("tiling");
    t.expect_object({"tile", "overlap", "blend"});
    TileConfig tc;
    if (t.has("tile")) tc.tile = t.at("tile").integer();
    if (t.has("overlap")) tc.overlap = t.at("overlap").integer();
    if (t.has("blend")) {
      try {
        tc.blend = parse_blend(t.at("blend").string());
      } catch (const ConfigError& e) {
        t.at("blend").fail(e.what());
      }
    }
    try {
      validate(tc);
    } catch (const ConfigError& e) {
      t.fail(e.what());
    }
    cfg.tiling = tc;
  }

  const Reader snaps = root.at("snapshots");
  const std::size_t n = snaps.array_size();
  if (n == 0) snaps.fail("at least one snapshot is required");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    cfg.snapshots.push_back(parse_snapshot(snaps.at(i), base_dir));
    if (!labels.insert(cfg.snapshots.back().label).second) {
      snaps.at(i).at("label").fail("duplicate label '" + cfg.snapshots.back().label + "'");
    }
    cfg.fusion.labels.push_back(cfg.snapshots.back().label);
  }

  const Reader fusion = root.at("fusion");
  fusion.expect_object({"weights", "normalize"});
  const Reader weights = fusion.at("weights");
  if (weights.array_size() != n) {
    weights.fail("expected " + std::to_string(n) + " weights (one per snapshot), got " +
                 std::to_string(weights.array_size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.at(i).number();
    if (w < 0.0) weights.at(i).fail("must be non-negative");
    cfg.fusion.weights.push_back(w);
  }
  if (fusion.has("normalize")) cfg.fusion.auto_normalize = fusion.at("normalize").boolean();
  try {
    effective_weights(cfg.fusion);
  } catch (const ConfigError& e) {
    weights.fail(e.what());
  }

  if (root.has("metric_hook")) {
    const Reader hook = root.at("metric_hook");
    hook.expect_object({"command"});
    cfg.metric_hook = ExternalMetricHook{hook.at("command").string()};
  }

  validate(cfg);
  return cfg;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_pipeline_config(text.str(), fs::absolute(path).parent_path());
}

RestoreFn snapshot_restorer(const RestorerSpec& spec, const PipelineConfig& cfg) {
  RestoreFn fn = make_restorer(spec);
  if (cfg.tiling) fn = tiled(std::move(fn), *cfg.tiling);
  if (cfg.self_ensemble) {
    fn = [inner = std::move(fn)](const ImageBuffer& img) { return self_ensemble(inner, img); };
  }
  return fn;
}

ImageBuffer restore_and_fuse(const ImageBuffer& input, const PipelineConfig& cfg) {
  std::vector<ImageBuffer> outputs;
  outputs.reserve(cfg.snapshots.size());
  for (const auto& spec : cfg.snapshots) outputs.push_back(snapshot_restorer(spec, cfg)(input));
  return fuse(outputs, cfg.fusion);
}

MetricReport aggregate_with_failures(std::vector<MetricEntry> entries, std::vector<PairFailure> failures) {
  MetricReport report;
  if (entries.empty()) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    report.means = {nan, nan, nan, nan, std::nullopt};
  } else {
    report = aggregate(std::move(entries));
  }
  report.failures = std::move(failures);
  return report;
}

namespace {

MetricEntry score(const std::string& pair_id, const ImageBuffer& restored, const ImageBuffer& gt,
                  const std::optional<ExternalMetricHook>& hook) {
  MetricEntry entry = evaluate_pair(pair_id, restored, gt);
  if (hook) {
    TempDir scratch(fs::temp_directory_path(), "metric-");
    save_png(crop_to_multiple(restored, 8), scratch.path() / "restored.png");
    save_png(crop_to_multiple(gt, 8), scratch.path() / "gt.png");
    entry.lpips = run_metric_hook(*hook, scratch.path() / "restored.png", scratch.path() / "gt.png");
  }
  return entry;
}

}  // namespace

MetricReport evaluate_inputs(const PairManifest& manifest, const std::optional<ExternalMetricHook>& hook) {
  std::vector<MetricEntry> entries;
  std::vector<PairFailure> failures;
  for (const auto& pair : manifest.pairs) {
    try {
      const ImageBuffer input = crop_to_multiple(load_png(pair.input_path), 8);
      const ImageBuffer gt = crop_to_multiple(load_png(pair.gt_path), 8);
      entries.push_back(score(pair.pair_id, input, gt, hook));
    } catch (const std::exception& e) {
      failures.push_back({pair.pair_id, e.what()});
    }
  }
  return aggregate_with_failures(std::move(entries), std::move(failures));
}

PipelineResult run_pipeline(const PairManifest& manifest, const PipelineConfig& cfg) {
  validate(cfg);
  fs::create_directories(cfg.output_dir);

  std::vector<MetricEntry> entries;
  std::vector<MetricEntry> baseline;
  std::vector<PairFailure> failures;
  std::vector<PairFailure> baseline_failures;
  for (const auto& pair : manifest.pairs) {
    std::optional<ImageBuffer> input;
    std::optional<ImageBuffer> gt;
    try {
      input.emplace(crop_to_multiple(load_png(pair.input_path), 8));
      gt.emplace(crop_to_multiple(load_png(pair.gt_path), 8));
      baseline.push_back(score(pair.pair_id, *input, *gt, cfg.metric_hook));
    } catch (const std::exception& e) {
      baseline_failures.push_back({pair.pair_id, e.what()});
      failures.push_back({pair.pair_id, e.what()});
      continue;
    }
    try {
      const ImageBuffer fused = restore_and_fuse(*input, cfg);
      save_png(fused, cfg.output_dir / (pair.pair_id + ".png"));
      entries.push_back(score(pair.pair_id, quantize_8bit(fused), *gt, cfg.metric_hook));
    } catch (const std::exception& e) {
      failures.push_back({pair.pair_id, e.what()});
    }
  }

  PipelineResult result{aggregate_with_failures(std::move(entries), std::move(failures)),
                        aggregate_with_failures(std::move(baseline), std::move(baseline_failures))};
  write_report(result.report, cfg.output_dir / "metrics.csv", cfg.output_dir / "metrics.json");
  write_report(result.baseline, cfg.output_dir / "input_baseline.csv",
               cfg.output_dir / "input_baseline.json");
  return result;
}

}  // namespace dehaze
