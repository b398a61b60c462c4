#include "dehaze/manifest.hpp"

#include <algorithm>

#include <json.hpp>

#include "dehaze/errors.hpp"

namespace dehaze {

namespace fs = std::filesystem;

std::optional<int> haze_level_of(const std::string& scene) {
  if (scene.empty()) return std::nullopt;
  const char last = scene.back();
  if (last >= '1' && last <= '5') return last - '0';
  return std::nullopt;
}

namespace {

// First regular file (by name) starting with `prefix`; PNG files win over others.
std::optional<fs::path> find_prefixed(const std::vector<fs::path>& files, const std::string& prefix) {
  std::optional<fs::path> any;
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    if (name.rfind(prefix, 0) != 0) continue;
    std::string ext = f.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return f;
    if (!any) any = f;
  }
  return any;
}

}  // namespace

PairManifest build_manifest(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError(root.string() + ": dataset root does not exist");

  std::vector<fs::path> scenes;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) scenes.push_back(entry.path());
  }
  std::sort(scenes.begin(), scenes.end());

  PairManifest manifest;
  for (const auto& scene : scenes) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(scene)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    const std::string name = scene.filename().string();
    const auto input = find_prefixed(files, "img_0");
    const auto gt = find_prefixed(files, "img_1");
    if (!input || !gt) {
      manifest.skipped.push_back({name, !input && !gt ? "missing img_0 and img_1"
                                        : !input      ? "missing img_0"
                                                      : "missing img_1"});
      continue;
    }
    manifest.pairs.push_back({name, fs::absolute(*input), fs::absolute(*gt), haze_level_of(name)});
  }
  if (manifest.pairs.empty()) {
    throw ConfigError(root.string() + ": no scene holds both an img_0 and an img_1 file");
  }
  return manifest;
}

std::string manifest_json(const PairManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : manifest.pairs) {
    nlohmann::ordered_json row = {{"pair_id", p.pair_id},
                                  {"input", p.input_path.string()},
                                  {"gt", p.gt_path.string()}};
    row["haze_level"] = p.haze_level ? nlohmann::ordered_json(*p.haze_level) : nullptr;
    doc["pairs"].push_back(std::move(row));
  }
  doc["skipped"] = nlohmann::ordered_json::array();
  for (const auto& s : manifest.skipped) {
    doc["skipped"].push_back({{"scene", s.scene}, {"reason", s.reason}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace dehaze
