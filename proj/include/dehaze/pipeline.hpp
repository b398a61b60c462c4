#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dehaze/fusion.hpp"
#include "dehaze/image.hpp"
#include "dehaze/manifest.hpp"
#include "dehaze/metrics.hpp"
#include "dehaze/restorer.hpp"
#include "dehaze/tiling.hpp"

namespace dehaze {

inline constexpr int kConfigSchemaVersion = 1;

struct PipelineConfig {
  std::vector<RestorerSpec> snapshots;
  FusionWeights fusion;  // labels mirror the snapshot labels
  bool self_ensemble = true;
  std::optional<TileConfig> tiling;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> manifest_root;
  std::optional<ExternalMetricHook> metric_hook;
};

/// Throws ConfigError on any inconsistency (counts, labels, restorer and tile parameters).
void validate(const PipelineConfig& cfg);

/// Parses the JSON config document. Relative paths are resolved against
/// `base_dir`. Schema violations throw ConfigError with the offending field
/// path, e.g. `snapshots[1].gamma`.
PipelineConfig parse_pipeline_config(const std::string& text, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// One snapshot's restorer with tiling (innermost) and self-ensemble
/// (outermost) applied as configured.
RestoreFn snapshot_restorer(const RestorerSpec& spec, const PipelineConfig& cfg);

/// Runs every snapshot on an already-cropped input and fuses the results.
ImageBuffer restore_and_fuse(const ImageBuffer& input, const PipelineConfig& cfg);

struct PipelineResult {
  MetricReport report;    // fused outputs against ground truth
  MetricReport baseline;  // cropped hazy inputs against ground truth
  bool ok() const noexcept { return report.failures.empty() && baseline.failures.empty(); }
};

/// For every pair: load, crop to a multiple of 8, restore and fuse, save
/// `{output_dir}/{pair_id}.png`, and score the saved 8-bit image against the
/// cropped ground truth. Per-pair failures are recorded, not thrown. Reports
/// are written to `output_dir` as metrics.{csv,json} and input_baseline.{csv,json}.
PipelineResult run_pipeline(const PairManifest& manifest, const PipelineConfig& cfg);

/// Scores the manifest's hazy inputs against ground truth, which is the
/// baseline row set of run_pipeline.
MetricReport evaluate_inputs(const PairManifest& manifest,
                             const std::optional<ExternalMetricHook>& hook = std::nullopt);

/// aggregate() that tolerates an empty entry list (means become NaN).
MetricReport aggregate_with_failures(std::vector<MetricEntry> entries, std::vector<PairFailure> failures);

}  // namespace dehaze
