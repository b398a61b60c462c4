#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dehaze {

/// Feature vector of one sample from a named dataset.
struct Embedding {
  std::string id;
  std::string source;
  std::vector<double> vector;
};

struct SimilarityRecord {
  std::string id;
  std::string source;
  double score = 0.0;
  bool selected = false;
};

struct ThresholdSelection {
  double tau = 0.0;
};
struct TopKPerSource {
  std::map<std::string, std::size_t> k;
};
struct TopKGlobal {
  std::size_t k = 0;
};

struct CurationConfig {
  std::variant<ThresholdSelection, TopKPerSource, TopKGlobal> mode;
};

/// How candidates are compared against a set of target embeddings.
enum class TargetAggregation {
  centroid,        // cosine to the normalized mean of the normalized targets
  max_similarity,  // best cosine over the individual targets
};

struct SelectionResult {
  std::vector<SimilarityRecord> records;  // sorted by (source, score desc, id)
  std::vector<std::string> warnings;
};

/// Reads the tab-separated embedding format:
///   id <TAB> source <TAB> v1,v2,...,vD
/// one record per LF-terminated line; lines starting with '#' and empty lines
/// are skipped. Throws ConfigError naming the line and id on malformed input,
/// non-finite or zero-norm vectors, and dimension mismatches.
std::vector<Embedding> parse_embeddings(const std::string& text, const std::string& origin = "<text>");
std::vector<Embedding> load_embeddings(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering of one record (no trailing newline).
std::string format_embedding(const Embedding& e);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Normalizes each target, averages, and re-normalizes to unit length.
Embedding target_centroid(std::span<const Embedding> targets);

/// Cosine of every candidate against `centroid`, in input order, unselected.
std::vector<SimilarityRecord> score_candidates(const Embedding& centroid,
                                               std::span<const Embedding> candidates);

std::vector<SimilarityRecord> score_against_targets(std::span<const Embedding> targets,
                                                    std::span<const Embedding> candidates,
                                                    TargetAggregation aggregation);

/// Marks the selected records. Top-k ties go to the lexicographically smaller
/// id. Asking for more records than exist selects all of them and adds a warning.
SelectionResult select(std::vector<SimilarityRecord> records, const CurationConfig& cfg);

/// Writes the embedding format with an extra trailing `selected` column (0/1).
/// Records are joined to candidates by (source, id).
void write_selection_report(const std::filesystem::path& path,
                            std::span<const Embedding> candidates,
                            std::span<const SimilarityRecord> records);

/// Per-source kept/total counts plus the target set size, as JSON text.
std::string selection_summary_json(std::span<const SimilarityRecord> records,
                                   std::span<const Embedding> targets);

}  // namespace dehaze
