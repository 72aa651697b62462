#include "edstereo/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "edstereo/image_io.hpp"

namespace edstereo {
namespace fs = std::filesystem;

StereoPair::StereoPair(GrayImage left_view, GrayImage right_view,
                       int max_disparity_levels, int scale)
    : left(std::move(left_view)),
      right(std::move(right_view)),
      max_disparity(max_disparity_levels),
      gt_scale(scale) {
  require_same_shape(left, right, "stereo pair views differ in size");
  if (max_disparity < 1) {
    throw Error(ErrorKind::InvalidArgument, "max_disparity must be >= 1");
  }
  if (gt_scale < 1) {
    throw Error(ErrorKind::InvalidArgument, "gt_scale must be >= 1");
  }
}

GroundTruth decode_ground_truth(const GrayImage& stored, int gt_scale,
                                int search_range) {
  if (gt_scale < 1) {
    throw Error(ErrorKind::InvalidArgument, "gt_scale must be >= 1");
  }
  std::vector<int> disparities(stored.size());
  std::vector<Membership> known(stored.size());
  std::size_t off_grid = 0;
  std::size_t out_of_range = 0;
  int widest = std::max(search_range, 1);
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const int v = stored[i];
    // round half up; v and gt_scale are non-negative
    const int d = (2 * v + gt_scale) / (2 * gt_scale);
    disparities[i] = d;
    known[i] = v == 0 ? Membership::Excluded : Membership::InRegion;
    if (v % gt_scale != 0) ++off_grid;
    if (v != 0 && d >= search_range) ++out_of_range;
    widest = std::max(widest, d + 1);
  }
  return GroundTruth{
      DisparityMap(stored.width(), stored.height(), std::move(disparities), widest),
      RegionMask(stored.width(), stored.height(), std::move(known)), off_grid,
      out_of_range};
}

GroundTruth load_ground_truth(const fs::path& path, int gt_scale, int search_range) {
  const Image image = load_image(path);
  if (image.channels != 1) {
    throw Error(ErrorKind::Format,
                path.string() + ": ground truth must be single-channel");
  }
  return decode_ground_truth(to_lightness(image), gt_scale, search_range);
}

RegionMask region_from_image(const GrayImage& image, int threshold) {
  std::vector<Membership> flags(image.size());
  std::transform(image.values().begin(), image.values().end(), flags.begin(),
                 [threshold](std::uint8_t v) {
                   return v >= threshold ? Membership::InRegion
                                         : Membership::Excluded;
                 });
  return RegionMask(image.width(), image.height(), std::move(flags));
}

RegionMask load_region_mask(const fs::path& path, int threshold) {
  const Image image = load_image(path);
  if (image.channels != 1) {
    // Some mask files are stored as RGB with equal channels; use the first.
    std::vector<std::uint8_t> first(static_cast<std::size_t>(image.width) * image.height);
    for (std::size_t i = 0; i < first.size(); ++i) {
      first[i] = image.data[i * image.channels];
    }
    return region_from_image(GrayImage(image.width, image.height, std::move(first)),
                             threshold);
  }
  return region_from_image(to_lightness(image), threshold);
}

RegionMask intersect(const RegionMask& a, const RegionMask& b) {
  require_same_shape(a, b, "region masks differ in size");
  std::vector<Membership> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (a[i] == Membership::InRegion && b[i] == Membership::InRegion)
                 ? Membership::InRegion
                 : Membership::Excluded;
  }
  return RegionMask(a.width(), a.height(), std::move(out));
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

int parse_int(const std::string& value, const std::string& key,
              std::string_view origin) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::Format, std::string(origin) + ": key '" + key +
                                       "' expects an integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

Manifest parse_manifest(std::string_view text, const fs::path& base_dir,
                        std::string_view origin) {
  std::map<std::string, std::string> entries;
  std::istringstream lines{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Format, std::string(origin) + ":" +
                                         std::to_string(line_no) +
                                         ": expected 'key = value'");
    }
    entries[trim(std::string_view(line).substr(0, eq))] =
        trim(std::string_view(line).substr(eq + 1));
  }

  Manifest m;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string v = it->second;
    entries.erase(it);
    return v;
  };
  auto require_path = [&](const std::string& key,
                          std::optional<std::string> value) -> fs::path {
    if (!value || value->empty()) {
      throw Error(ErrorKind::Format,
                  std::string(origin) + ": missing required key '" + key + "'");
    }
    return base_dir / *value;
  };

  m.name = take("name").value_or(std::string());
  m.left = require_path("left", take("left"));
  m.right = require_path("right", take("right"));
  auto gt = take("ground_truth");
  if (!gt) gt = take("gt");
  m.ground_truth = require_path("ground_truth", gt);
  if (auto v = take("nonocc"); v && !v->empty()) m.nonocc = base_dir / *v;
  if (auto v = take("disc"); v && !v->empty()) m.disc = base_dir / *v;
  const auto max_disp = take("max_disparity");
  if (!max_disp) {
    throw Error(ErrorKind::Format,
                std::string(origin) + ": missing required key 'max_disparity'");
  }
  m.max_disparity = parse_int(*max_disp, "max_disparity", origin);
  if (auto v = take("gt_scale")) m.gt_scale = parse_int(*v, "gt_scale", origin);
  if (auto v = take("region_threshold")) {
    m.region_threshold = parse_int(*v, "region_threshold", origin);
  }
  if (!entries.empty()) {
    throw Error(ErrorKind::Format, std::string(origin) + ": unknown key '" +
                                       entries.begin()->first + "'");
  }
  if (m.max_disparity < 1) {
    throw Error(ErrorKind::Format, std::string(origin) + ": max_disparity must be >= 1");
  }
  if (m.gt_scale < 1) {
    throw Error(ErrorKind::Format, std::string(origin) + ": gt_scale must be >= 1");
  }
  if (m.region_threshold < 1 || m.region_threshold > 255) {
    throw Error(ErrorKind::Format,
                std::string(origin) + ": region_threshold must be in [1, 255]");
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, path.string() + ": cannot open manifest");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Manifest m = parse_manifest(buffer.str(), path.parent_path(), path.string());
  if (m.name.empty()) m.name = path.stem().string();
  return m;
}

std::vector<fs::path> find_manifests(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::Io, dir.string() + ": not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".manifest" || ext == ".txt") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

Scene load_scene(const Manifest& manifest) {
  StereoPair pair(to_lightness(load_image(manifest.left)),
                  to_lightness(load_image(manifest.right)), manifest.max_disparity,
                  manifest.gt_scale);
  GroundTruth truth =
      load_ground_truth(manifest.ground_truth, manifest.gt_scale, manifest.max_disparity);
  require_same_shape(pair.left, truth.disparity,
                     (manifest.ground_truth.string() + ": ground truth size").c_str());
  RegionMask all = truth.known;
  auto region = [&](const std::optional<fs::path>& path) {
    if (!path) return all;
    RegionMask mask = load_region_mask(*path, manifest.region_threshold);
    require_same_shape(all, mask, (path->string() + ": mask size").c_str());
    return intersect(all, mask);
  };
  RegionMask nonocc = region(manifest.nonocc);
  RegionMask disc = region(manifest.disc);
  return Scene{manifest.name, std::move(pair), std::move(truth), std::move(all),
               std::move(nonocc), std::move(disc)};
}

}  // namespace edstereo
