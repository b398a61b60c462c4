#include "dehaze/curation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dehaze/errors.hpp"

namespace dehaze {

namespace {

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string where(const std::string& origin, std::size_t line) {
  return origin + ":" + std::to_string(line);
}

std::vector<double> parse_vector(std::string_view text, const std::string& context) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view field = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
      throw ConfigError(context + ": malformed number '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) throw ConfigError(context + ": non-finite value");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<Embedding> parse_embeddings(const std::string& text, const std::string& origin) {
  std::vector<Embedding> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = tab1 == line.npos ? line.npos : line.find('\t', tab1 + 1);
    if (tab2 == line.npos || line.find('\t', tab2 + 1) != line.npos) {
      throw ConfigError(where(origin, line_no) + ": expected id<TAB>source<TAB>vector");
    }
    Embedding e;
    e.id = std::string(line.substr(0, tab1));
    e.source = std::string(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (e.id.empty() || e.source.empty()) {
      throw ConfigError(where(origin, line_no) + ": empty id or source");
    }
    const std::string context = where(origin, line_no) + " (id " + e.id + ")";
    e.vector = parse_vector(line.substr(tab2 + 1), context);
    if (!out.empty() && e.vector.size() != out.front().vector.size()) {
      throw ConfigError(context + ": dimension " + std::to_string(e.vector.size()) +
                        " does not match " + std::to_string(out.front().vector.size()));
    }
    if (norm_of(e.vector) == 0.0) throw ConfigError(context + ": zero-norm vector");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Embedding> load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open embedding file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_embeddings(buffer.str(), path.string());
}

std::string format_embedding(const Embedding& e) {
  std::string out = e.id + '\t' + e.source + '\t';
  char buf[32];
  for (std::size_t i = 0; i < e.vector.size(); ++i) {
    if (i > 0) out += ',';
    const auto res = std::to_chars(buf, buf + sizeof buf, e.vector[i]);
    out.append(buf, res.ptr);
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine of vectors with dimensions " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  const double na = norm_of(a);
  const double nb = norm_of(b);
  if (na == 0.0 || nb == 0.0) throw ConfigError("cosine of a zero-norm vector");
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

Embedding target_centroid(std::span<const Embedding> targets) {
  if (targets.empty()) throw ConfigError("target set is empty");
  const std::size_t dim = targets.front().vector.size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& t : targets) {
    if (t.vector.size() != dim) throw ShapeError("target " + t.id + " has a different dimension");
    const double n = norm_of(t.vector);
    if (n == 0.0) throw ConfigError("target " + t.id + " has a zero-norm vector");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += t.vector[i] / n;
  }
  for (double& v : mean) v /= static_cast<double>(targets.size());
  const double n = norm_of(mean);
  if (n < 1e-12) throw ConfigError("target embeddings cancel out: centroid has zero norm");
  for (double& v : mean) v /= n;
  return Embedding{"centroid", targets.front().source, std::move(mean)};
}

std::vector<SimilarityRecord> score_candidates(const Embedding& centroid,
                                               std::span<const Embedding> candidates) {
  std::vector<SimilarityRecord> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.vector.size() != centroid.vector.size()) {
      throw ShapeError("candidate " + c.id + " has dimension " + std::to_string(c.vector.size()) +
                       ", centroid has " + std::to_string(centroid.vector.size()));
    }
    if (norm_of(c.vector) == 0.0) throw ConfigError("candidate " + c.id + " has a zero-norm vector");
    out.push_back({c.id, c.source, cosine_similarity(centroid.vector, c.vector), false});
  }
  return out;
}

std::vector<SimilarityRecord> score_against_targets(std::span<const Embedding> targets,
                                                    std::span<const Embedding> candidates,
                                                    TargetAggregation aggregation) {
  if (aggregation == TargetAggregation::centroid) {
    return score_candidates(target_centroid(targets), candidates);
  }
  if (targets.empty()) throw ConfigError("target set is empty");
  std::vector<SimilarityRecord> out = score_candidates(targets.front(), candidates);
  for (std::size_t t = 1; t < targets.size(); ++t) {
    const auto more = score_candidates(targets[t], candidates);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].score = std::max(out[i].score, more[i].score);
  }
  return out;
}

namespace {

// Descending score; ties go to the smaller id, then the smaller source.
bool ranks_before(const SimilarityRecord& a, const SimilarityRecord& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.id != b.id) return a.id < b.id;
  return a.source < b.source;
}

void mark_top_k(std::vector<SimilarityRecord*>& group, std::size_t k) {
  std::sort(group.begin(), group.end(),
            [](const SimilarityRecord* a, const SimilarityRecord* b) { return ranks_before(*a, *b); });
  for (std::size_t i = 0; i < group.size() && i < k; ++i) group[i]->selected = true;
}

}  // namespace

SelectionResult select(std::vector<SimilarityRecord> records, const CurationConfig& cfg) {
  SelectionResult result;
  for (auto& r : records) r.selected = false;

  if (const auto* th = std::get_if<ThresholdSelection>(&cfg.mode)) {
    if (!(th->tau >= -1.0 && th->tau <= 1.0)) throw ConfigError("threshold must lie in [-1, 1]");
    for (auto& r : records) r.selected = r.score >= th->tau;
  } else if (const auto* global = std::get_if<TopKGlobal>(&cfg.mode)) {
    std::vector<SimilarityRecord*> all;
    for (auto& r : records) all.push_back(&r);
    if (global->k > all.size()) {
      result.warnings.push_back("requested top " + std::to_string(global->k) + " but only " +
                                std::to_string(all.size()) + " candidates exist; selecting all");
    }
    mark_top_k(all, global->k);
  } else {
    const auto& per_source = std::get<TopKPerSource>(cfg.mode).k;
    std::map<std::string, std::vector<SimilarityRecord*>> groups;
    for (auto& r : records) groups[r.source].push_back(&r);
    for (auto& [source, group] : groups) {
      const auto it = per_source.find(source);
      if (it == per_source.end()) {
        result.warnings.push_back("source " + source + " has no quota; selecting none of its " +
                                  std::to_string(group.size()) + " candidates");
        continue;
      }
      if (it->second > group.size()) {
        result.warnings.push_back("source " + source + ": requested " + std::to_string(it->second) +
                                  " but only " + std::to_string(group.size()) +
                                  " candidates exist; selecting all");
      }
      mark_top_k(group, it->second);
    }
    for (const auto& [source, k] : per_source) {
      if (!groups.contains(source)) {
        result.warnings.push_back("source " + source + ": requested " + std::to_string(k) +
                                  " but it has no candidates");
      }
    }
  }

  std::sort(records.begin(), records.end(), [](const SimilarityRecord& a, const SimilarityRecord& b) {
    if (a.source != b.source) return a.source < b.source;
    return ranks_before(a, b);
  });
  result.records = std::move(records);
  return result;
}

void write_selection_report(const std::filesystem::path& path,
                            std::span<const Embedding> candidates,
                            std::span<const SimilarityRecord> records) {
  std::map<std::pair<std::string, std::string>, const Embedding*> by_key;
  for (const auto& c : candidates) by_key.emplace(std::make_pair(c.source, c.id), &c);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << "# id\tsource\tvector\tselected\n";
  for (const auto& r : records) {
    const auto it = by_key.find({r.source, r.id});
    if (it == by_key.end()) {
      throw ConfigError("record " + r.source + "/" + r.id + " has no matching candidate embedding");
    }
    out << format_embedding(*it->second) << '\t' << (r.selected ? 1 : 0) << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

std::string selection_summary_json(std::span<const SimilarityRecord> records,
                                   std::span<const Embedding> targets) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_source;  // kept, total
  std::size_t kept = 0;
  for (const auto& r : records) {
    auto& [k, total] = per_source[r.source];
    ++total;
    if (r.selected) {
      ++k;
      ++kept;
    }
  }
  std::map<std::string, std::size_t> target_counts;
  for (const auto& t : targets) ++target_counts[t.source];

  nlohmann::ordered_json doc;
  doc["targets"] = nlohmann::ordered_json::array();
  for (const auto& [source, count] : target_counts) {
    doc["targets"].push_back({{"source", source}, {"count", count}});
  }
  doc["sources"] = nlohmann::ordered_json::array();
  for (const auto& [source, counts] : per_source) {
    doc["sources"].push_back({{"source", source}, {"kept", counts.first}, {"total", counts.second}});
  }
  doc["kept_total"] = kept;
  doc["training_set_size"] = kept + targets.size();
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    doc["records"].push_back(
        {{"id", r.id}, {"source", r.source}, {"score", r.score}, {"selected", r.selected}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace dehaze
