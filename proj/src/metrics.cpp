#include "dehaze/metrics.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "dehaze/errors.hpp"
#include "dehaze/process.hpp"

namespace dehaze {

double psnr(std::span<const double> a, std::span<const double> b, double peak) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("PSNR inputs differ in size");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak) {
  if (!a.same_shape(b)) throw ShapeError("PSNR inputs differ in shape");
  return psnr(a.samples(), b.samples(), peak);
}

double psnr(const LumaPlane& a, const LumaPlane& b, double peak) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeError("PSNR inputs differ in shape");
  }
  return psnr(a.samples(), b.samples(), peak);
}

std::vector<double> gaussian_taps(const SsimParams& p) {
  std::vector<double> taps(static_cast<std::size_t>(p.window));
  const double center = (p.window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < p.window; ++i) {
    const double d = i - center;
    taps[i] = std::exp(-(d * d) / (2.0 * p.sigma * p.sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

namespace {

// Valid-mode separable filtering of one plane with `taps` along x then y.
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height,
                                 const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int ow = width - n + 1;
  const int oh = height - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * height);
  for (int y = 0; y < height; ++y) {
    const double* line = src.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * line[x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(std::span<const double> a, std::span<const double> b, int width, int height,
            const SsimParams& p) {
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (a.size() != count || b.size() != count) throw ShapeError("SSIM inputs differ in size");
  if (width < p.window || height < p.window) {
    throw ShapeError("SSIM needs at least " + std::to_string(p.window) + "x" +
                     std::to_string(p.window) + " pixels, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  const auto taps = gaussian_taps(p);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

  std::vector<double> va(a.begin(), a.end());
  std::vector<double> vb(b.begin(), b.end());
  std::vector<double> aa(count), bb(count), ab(count);
  for (std::size_t i = 0; i < count; ++i) {
    aa[i] = va[i] * va[i];
    bb[i] = vb[i] * vb[i];
    ab[i] = va[i] * vb[i];
  }
  const auto mu_a = filter_valid(va, width, height, taps);
  const auto mu_b = filter_valid(vb, width, height, taps);
  const auto e_aa = filter_valid(aa, width, height, taps);
  const auto e_bb = filter_valid(bb, width, height, taps);
  const auto e_ab = filter_valid(ab, width, height, taps);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

double ssim(const LumaPlane& a, const LumaPlane& b, const SsimParams& p) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeError("SSIM inputs differ in shape");
  }
  return ssim(a.samples(), b.samples(), a.width(), a.height(), p);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& p) {
  if (!a.same_shape(b)) throw ShapeError("SSIM inputs differ in shape");
  double sum = 0.0;
  for (int c = 0; c < a.channels(); ++c) sum += ssim(a.plane(c), b.plane(c), a.width(), a.height(), p);
  return sum / a.channels();
}

MetricEntry evaluate_pair(const std::string& pair_id, const ImageBuffer& restored,
                          const ImageBuffer& gt) {
  const ImageBuffer r = crop_to_multiple(restored, 8);
  const ImageBuffer g = crop_to_multiple(gt, 8);
  if (!r.same_shape(g)) {
    throw ShapeError(pair_id + ": restored " + std::to_string(r.width()) + "x" +
                     std::to_string(r.height()) + "x" + std::to_string(r.channels()) +
                     " vs ground truth " + std::to_string(g.width()) + "x" +
                     std::to_string(g.height()) + "x" + std::to_string(g.channels()) +
                     " after cropping");
  }
  MetricEntry e;
  e.pair_id = pair_id;
  e.psnr_rgb = psnr(r, g);
  e.ssim_rgb = ssim(r, g);
  if (r.channels() == 3) {
    const LumaPlane ry = rgb_to_luma(r);
    const LumaPlane gy = rgb_to_luma(g);
    e.psnr_y = psnr(ry, gy);
    e.ssim_y = ssim(ry, gy);
  } else {
    e.psnr_y = e.psnr_rgb;
    e.ssim_y = e.ssim_rgb;
  }
  return e;
}

MetricReport aggregate(std::vector<MetricEntry> entries) {
  if (entries.empty()) throw std::invalid_argument("cannot aggregate an empty entry list");
  MetricReport report;
  const double n = static_cast<double>(entries.size());
  double psnr_y = 0.0, psnr_rgb = 0.0, ssim_y = 0.0, ssim_rgb = 0.0, lpips = 0.0;
  std::size_t finite_y = 0, finite_rgb = 0, with_lpips = 0;
  for (const auto& e : entries) {
    if (std::isinf(e.psnr_y)) {
      ++report.infinite_psnr_y;
    } else {
      psnr_y += e.psnr_y;
      ++finite_y;
    }
    if (std::isinf(e.psnr_rgb)) {
      ++report.infinite_psnr_rgb;
    } else {
      psnr_rgb += e.psnr_rgb;
      ++finite_rgb;
    }
    ssim_y += e.ssim_y;
    ssim_rgb += e.ssim_rgb;
    if (e.lpips) {
      lpips += *e.lpips;
      ++with_lpips;
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  report.means.psnr_y = finite_y > 0 ? psnr_y / static_cast<double>(finite_y) : inf;
  report.means.psnr_rgb = finite_rgb > 0 ? psnr_rgb / static_cast<double>(finite_rgb) : inf;
  report.means.ssim_y = ssim_y / n;
  report.means.ssim_rgb = ssim_rgb / n;
  if (with_lpips == entries.size()) report.means.lpips = lpips / n;
  report.entries = std::move(entries);
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::ordered_json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

bool has_lpips(const MetricReport& report) {
  for (const auto& e : report.entries) {
    if (e.lpips) return true;
  }
  return false;
}

}  // namespace

std::string to_csv(const MetricReport& report) {
  const bool lpips = has_lpips(report);
  std::string out = "pair_id,psnr_y,ssim_y,psnr_rgb,ssim_rgb";
  out += lpips ? ",lpips\n" : "\n";
  for (const auto& e : report.entries) {
    out += e.pair_id + ',' + fixed(e.psnr_y, 4) + ',' + fixed(e.ssim_y, 6) + ',' +
           fixed(e.psnr_rgb, 4) + ',' + fixed(e.ssim_rgb, 6);
    if (lpips) out += ',' + (e.lpips ? fixed(*e.lpips, 6) : std::string());
    out += '\n';
  }
  return out;
}

std::string to_json(const MetricReport& report) {
  nlohmann::ordered_json doc;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json row = {{"pair_id", e.pair_id},
                                  {"psnr_y", json_number(e.psnr_y)},
                                  {"ssim_y", e.ssim_y},
                                  {"psnr_rgb", json_number(e.psnr_rgb)},
                                  {"ssim_rgb", e.ssim_rgb}};
    if (e.lpips) row["lpips"] = *e.lpips;
    doc["entries"].push_back(std::move(row));
  }
  nlohmann::ordered_json means = {{"psnr_y", json_number(report.means.psnr_y)},
                                  {"ssim_y", report.means.ssim_y},
                                  {"psnr_rgb", json_number(report.means.psnr_rgb)},
                                  {"ssim_rgb", report.means.ssim_rgb}};
  if (report.means.lpips) means["lpips"] = *report.means.lpips;
  doc["means"] = std::move(means);
  doc["infinite_psnr"] = {{"psnr_y", report.infinite_psnr_y}, {"psnr_rgb", report.infinite_psnr_rgb}};
  doc["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) {
    doc["failures"].push_back({{"pair_id", f.pair_id}, {"error", f.message}});
  }
  return doc.dump(2) + "\n";
}

void write_report(const MetricReport& report, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path) {
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    if (path.empty()) return;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError(path.string() + ": write failed");
  };
  write(csv_path, to_csv(report));
  write(json_path, to_json(report));
}

double run_metric_hook(const ExternalMetricHook& hook, const std::filesystem::path& restored,
                       const std::filesystem::path& gt) {
  const std::string command =
      substitute(substitute(hook.command_template, "{restored}", restored.string()), "{gt}", gt.string());
  const ProcessResult result = run_shell(command);
  if (result.exit_code != 0) {
    throw ProcessError("metric hook exited with status " + std::to_string(result.exit_code) +
                       "\nstderr:\n" + result.err);
  }
  std::string_view text = result.out;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    throw ProcessError("metric hook printed '" + std::string(text) + "', expected one number");
  }
  return value;
}

}  // namespace dehaze
