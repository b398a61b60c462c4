#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dehaze {

struct ImagePair {
  std::string pair_id;  // scene directory name
  std::filesystem::path input_path;
  std::filesystem::path gt_path;
  std::optional<int> haze_level;  // 1..5, from the last character of the scene name
};

struct SkippedScene {
  std::string scene;
  std::string reason;
};

struct PairManifest {
  std::vector<ImagePair> pairs;  // ordered by scene name
  std::vector<SkippedScene> skipped;
};

/// Scans `root` for scene directories holding an `img_0*` hazy input and an
/// `img_1*` ground truth. Scenes missing either file are reported in
/// `skipped`. Throws IoError if root is missing and ConfigError if no scene
/// yields a pair.
PairManifest build_manifest(const std::filesystem::path& root);

/// Haze level parsed from a trailing digit 1-5 of a scene name.
std::optional<int> haze_level_of(const std::string& scene);

std::string manifest_json(const PairManifest& manifest);

}  // namespace dehaze
