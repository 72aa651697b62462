#include "edstereo/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "edstereo/benchmark.hpp"
#include "edstereo/dataset.hpp"
#include "edstereo/entropy.hpp"
#include "edstereo/eval.hpp"
#include "edstereo/image_io.hpp"
#include "edstereo/lrc.hpp"
#include "edstereo/matcher.hpp"

namespace edstereo::cli {
namespace fs = std::filesystem;

const char* to_string(Command command) {
  switch (command) {
    case Command::Match: return "match";
    case Command::Entropy: return "entropy";
    case Command::Confidence: return "confidence";
    case Command::Classify: return "classify";
    case Command::Lrc: return "lrc";
    case Command::Evaluate: return "evaluate";
    case Command::Benchmark: return "benchmark";
  }
  return "?";
}

namespace {

CLI::Validator odd_at_least_3(const std::string& name) {
  return CLI::Validator(
      [name](std::string& value) -> std::string {
        int v = 0;
        try {
          v = std::stoi(value);
        } catch (const std::exception&) {
          return name + " must be an integer";
        }
        if (v % 2 == 0) return name + " must be odd";
        if (v < 3) return name + " must be >= 3";
        return {};
      },
      "ODD>=3");
}

struct Requirement {
  const std::optional<fs::path>* value;
  const char* flag;
  const char* what;
};

std::string check_required(const RunConfig& cfg) {
  std::vector<Requirement> needed;
  switch (cfg.command) {
    case Command::Match:
    case Command::Lrc:
      needed = {{&cfg.left, "--left", "left image"}, {&cfg.right, "--right", "right image"}};
      break;
    case Command::Entropy:
      needed = {{&cfg.input, "--input", "image to filter"}};
      break;
    case Command::Confidence:
    case Command::Classify:
      needed = {{&cfg.left, "--left", "left image"},
                {&cfg.depth, "--depth", "8-bit depth map of the left image"}};
      break;
    case Command::Evaluate:
      if (!cfg.manifest) {
        needed = {{&cfg.left, "--left", "left image"},
                  {&cfg.ground_truth, "--gt", "ground-truth disparity image"}};
        if (!cfg.depth) needed.push_back({&cfg.right, "--right", "right image"});
      }
      break;
    case Command::Benchmark:
      needed = {{&cfg.manifest_dir, "--manifest-dir", "directory of pair manifests"}};
      break;
  }
  for (const auto& r : needed) {
    if (!*r.value) {
      return std::string(to_string(cfg.command)) + " requires " + r.flag + " <" + r.what +
             ">; pass it on the command line or in --config";
    }
  }
  const bool needs_range =
      cfg.command == Command::Match || cfg.command == Command::Lrc ||
      (cfg.command == Command::Evaluate && !cfg.manifest);
  if (needs_range && !cfg.max_disparity) {
    return std::string(to_string(cfg.command)) +
           " requires --max-disparity <number of disparity levels>";
  }
  return {};
}

}  // namespace

ParseResult parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Entropy-difference stereo error detection", "ed_stereo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read flags from a key = value file (flags win)");

  auto path_opt = [&](const char* name, std::optional<fs::path>& target, const char* help) {
    return app.add_option_function<std::string>(
        name, [&target](const std::string& v) { target = fs::path(v); }, help);
  };
  path_opt("--left", cfg.left, "Left view (PGM/PPM/PNG)");
  path_opt("--right", cfg.right, "Right view (PGM/PPM/PNG)");
  path_opt("--depth", cfg.depth, "8-bit depth map of the left view");
  path_opt("--input", cfg.input, "Image for the entropy command");
  path_opt("--gt", cfg.ground_truth, "Ground-truth disparity image (value = gt-scale * d)");
  path_opt("--nonocc", cfg.nonocc, "Non-occluded region mask (nonzero = in region)");
  path_opt("--disc", cfg.disc, "Discontinuity region mask (nonzero = in region)");
  path_opt("--manifest", cfg.manifest, "Pair manifest (key = value)");
  path_opt("--manifest-dir", cfg.manifest_dir, "Directory of pair manifests");
  app.add_option_function<std::string>(
      "--out", [&cfg](const std::string& v) { cfg.out_dir = v; }, "Output directory");

  app.add_option("--block", cfg.block_size, "SAD block size (odd)")
      ->check(odd_at_least_3("block"));
  app.add_option_function<int>(
         "--neighborhood", [&cfg](int v) { cfg.neighborhood = v; },
         "Entropy neighborhood (odd, defaults to --block)")
      ->check(odd_at_least_3("neighborhood"));
  app.add_option_function<int>(
         "--max-disparity", [&cfg](int v) { cfg.max_disparity = v; },
         "Number of disparity levels")
      ->check(CLI::PositiveNumber);
  app.add_option("--gt-scale", cfg.gt_scale, "Stored value per disparity level")
      ->check(CLI::Range(1, 255));
  app.add_option("--region-threshold", cfg.region_threshold,
                 "Minimum mask value counted as in-region")
      ->check(CLI::Range(1, 255));
  app.add_option("--lrc-tol", cfg.lrc_tol, "LRC tolerance in pixels")->check(CLI::NonNegativeNumber);
  app.add_option("--err-tol", cfg.err_tol, "Ground-truth error tolerance in pixels")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--auc-steps", cfg.auc_steps, "Sparsification steps")->check(CLI::Range(2, 100000));
  app.add_option("--windows", cfg.windows, "Benchmark window sizes, comma separated")
      ->delimiter(',')
      ->check(odd_at_least_3("window"));
  std::map<std::string, Conditioning> conditioning_names{
      {"ent", Conditioning::EntropyDifference}, {"ent_l", Conditioning::ImageEntropy}};
  app.add_option("--conditioning", cfg.conditioning,
                 "Map selecting depth entropies for sigma: ent or ent_l")
      ->transform(CLI::CheckedTransformer(conditioning_names, CLI::ignore_case));

  const std::pair<Command, const char*> commands[] = {
      {Command::Match, "SAD/WTA disparity map of the left view"},
      {Command::Entropy, "Local entropy map of an image"},
      {Command::Confidence, "Entropy-difference confidence map"},
      {Command::Classify, "Threshold detection and reliability mask"},
      {Command::Lrc, "Left-right consistency mask"},
      {Command::Evaluate, "Score both classifiers against ground truth"},
      {Command::Benchmark, "Run every manifest in a directory"},
  };
  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [command, help] : commands) {
    subs.emplace_back(command, app.add_subcommand(to_string(command), help));
  }

  ParseResult result;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    result.message = app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.message = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = kExitUsage;
    result.message = std::string(e.what()) + "\nRun with --help to list every flag.";
    return result;
  }

  for (const auto& [command, sub] : subs) {
    if (sub->parsed()) cfg.command = command;
  }
  if (const std::string missing = check_required(cfg); !missing.empty()) {
    result.exit_code = kExitUsage;
    result.message = missing;
    return result;
  }
  result.config = std::move(cfg);
  return result;
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string pct(const std::optional<double>& v) { return v ? pct(*v) : std::string("n/a"); }

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void wrote(std::ostream& out, const fs::path& path, const std::string& what) {
  out << "wrote " << path.string() << " (" << what << ")\n";
}

GrayImage mask_image(const ReliabilityMask& mask) {
  std::vector<std::uint8_t> px(mask.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = mask[i] == Reliability::Reliable ? 255 : 0;
  }
  return GrayImage(mask.width(), mask.height(), std::move(px));
}

GrayImage load_gray(const fs::path& path) { return to_lightness(load_image(path)); }

// External depth image decoded with the ground-truth convention, without
// the unknown-marker semantics.
DisparityMap depth_to_disparity(const GrayImage& depth, int scale, int levels) {
  std::vector<int> d(depth.size());
  int widest = std::max(levels, 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = (2 * depth[i] + scale) / (2 * scale);
    widest = std::max(widest, d[i] + 1);
  }
  return DisparityMap(depth.width(), depth.height(), std::move(d), widest);
}

ThresholdDiagnostics threshold_for(const ConfidenceMaps& maps, Conditioning conditioning) {
  if (conditioning == Conditioning::EntropyDifference) {
    return detect_threshold(maps.difference, maps.depth_entropy);
  }
  return detect_threshold(maps.difference, maps.depth_entropy, maps.image_entropy,
                          Conditioning::ImageEntropy);
}

std::string report_table(const std::string& method, const std::vector<EvalReport>& reports) {
  std::ostringstream s;
  for (const auto& r : reports) {
    s << method << " " << to_string(r.region) << ": precision " << pct(r.precision)
      << " accuracy " << pct(r.accuracy) << " recall " << pct(r.recall) << " pixels "
      << r.pixel_count << "\n";
  }
  return s.str();
}

int run_match(const RunConfig& cfg, std::ostream& out) {
  const StereoPair pair(load_gray(*cfg.left), load_gray(*cfg.right), *cfg.max_disparity,
                        cfg.gt_scale);
  const DisparityMap disp = sad_match_left(pair, MatchConfig{cfg.block_size, *cfg.max_disparity});
  const fs::path path = cfg.out_dir / "disparity_left.pgm";
  write_pgm(path, depth_image_for_entropy(disp, cfg.gt_scale));
  wrote(out, path, "left disparity map");
  return 0;
}

int run_entropy(const RunConfig& cfg, std::ostream& out) {
  const RealMap ent = local_entropy(load_gray(*cfg.input), EntropyConfig{cfg.effective_neighborhood()});
  const auto [lo, hi] = std::minmax_element(ent.values().begin(), ent.values().end());
  const fs::path path = cfg.out_dir / "entropy.pgm";
  write_pgm(path, normalize_for_display(ent));
  wrote(out, path, "entropy map, min " + real(*lo) + " max " + real(*hi) + " bits");
  return 0;
}

int run_confidence(const RunConfig& cfg, std::ostream& out) {
  const ConfidenceMaps maps = entropy_difference_confidence(
      load_gray(*cfg.left), load_gray(*cfg.depth), EntropyConfig{cfg.effective_neighborhood()});
  const std::pair<const RealMap*, const char*> items[] = {
      {&maps.image_entropy, "entropy_left.pgm"},
      {&maps.depth_entropy, "entropy_depth.pgm"},
      {&maps.difference, "confidence.pgm"}};
  for (const auto& [map, name] : items) {
    const fs::path path = cfg.out_dir / name;
    write_pgm(path, normalize_for_display(*map));
    wrote(out, path, "normalized map");
  }
  return 0;
}

int run_classify(const RunConfig& cfg, std::ostream& out) {
  const ConfidenceMaps maps = entropy_difference_confidence(
      load_gray(*cfg.left), load_gray(*cfg.depth), EntropyConfig{cfg.effective_neighborhood()});
  const ThresholdDiagnostics diag = threshold_for(maps, cfg.conditioning);
  const ReliabilityMask mask = classify(maps.difference, diag.ent_th);

  const fs::path mask_path = cfg.out_dir / "mask.pgm";
  write_pgm(mask_path, mask_image(mask));
  wrote(out, mask_path, "reliability mask, 255 = reliable");
  const fs::path csv_path = cfg.out_dir / "threshold.csv";
  write_text_atomic(csv_path, diagnostics_csv(diag));
  wrote(out, csv_path, "percentiles and sigmas");
  const fs::path summary_path = cfg.out_dir / "threshold_summary.txt";
  write_text_atomic(summary_path, diagnostics_summary(diag) + "\n");
  wrote(out, summary_path, "fit summary");

  const double incorrect = 100.0 * static_cast<double>(count_flag(mask, Reliability::Incorrect)) /
                           static_cast<double>(mask.size());
  out << "ent_th " << real(diag.ent_th) << (diag.fallback_used ? " (P50 fallback)" : "")
      << " conditioning " << to_string(diag.conditioning) << " incorrect " << pct(incorrect)
      << "%\n";
  return 0;
}

int run_lrc(const RunConfig& cfg, std::ostream& out) {
  const StereoPair pair(load_gray(*cfg.left), load_gray(*cfg.right), *cfg.max_disparity,
                        cfg.gt_scale);
  const MatchConfig mc{cfg.block_size, *cfg.max_disparity};
  const DisparityMap left = sad_match_left(pair, mc);
  const DisparityMap right = sad_match_right(pair, mc);
  const ReliabilityMask mask = lrc_check(left, right, cfg.lrc_tol);
  const fs::path mask_path = cfg.out_dir / "lrc_mask.pgm";
  write_pgm(mask_path, mask_image(mask));
  wrote(out, mask_path, "lrc mask, 255 = reliable");
  const double incorrect = 100.0 * static_cast<double>(count_flag(mask, Reliability::Incorrect)) /
                           static_cast<double>(mask.size());
  out << "lrc tol " << cfg.lrc_tol << " incorrect " << pct(incorrect) << "%\n";
  return 0;
}

int run_evaluate(const RunConfig& cfg, std::ostream& out) {
  Manifest m;
  if (cfg.manifest) {
    m = load_manifest(*cfg.manifest);
  } else {
    m.name = cfg.left->stem().string();
    m.left = *cfg.left;
    m.right = cfg.right.value_or(*cfg.left);
    m.ground_truth = *cfg.ground_truth;
    m.nonocc = cfg.nonocc;
    m.disc = cfg.disc;
    m.max_disparity = *cfg.max_disparity;
    m.gt_scale = cfg.gt_scale;
    m.region_threshold = cfg.region_threshold;
  }
  const Scene scene = load_scene(m);
  out << "positive class: reliable (correct disparity); err_tol " << cfg.err_tol
      << "; conditioning " << to_string(cfg.conditioning) << "\n";

  BenchmarkConfig bc;
  bc.windows = {cfg.block_size};
  bc.neighborhood = cfg.neighborhood;
  bc.lrc_tol = cfg.lrc_tol;
  bc.err_tol = cfg.err_tol;
  bc.auc_steps = cfg.auc_steps;
  bc.conditioning = cfg.conditioning;

  std::vector<ClassifierRow> rows;
  std::vector<AucRow> auc_rows;
  if (cfg.depth) {
    // Externally produced depth map: proposed method only.
    const GrayImage depth = load_gray(*cfg.depth);
    const DisparityMap disp = depth_to_disparity(depth, m.gt_scale, m.max_disparity);
    const ConfidenceMaps maps = entropy_difference_confidence(
        scene.pair.left, depth, EntropyConfig{cfg.effective_neighborhood()});
    const ThresholdDiagnostics diag = threshold_for(maps, cfg.conditioning);
    const ReliabilityMask pred = classify(maps.difference, diag.ent_th);
    const ReliabilityMask truth =
        truth_mask(disp, scene.truth.disparity, scene.truth.known, cfg.err_tol);
    const RegionMask* regions[3] = {&scene.all, &scene.nonocc, &scene.disc};
    const RegionLabel labels[3] = {RegionLabel::All, RegionLabel::NonOcc, RegionLabel::Disc};
    std::vector<EvalReport> reports;
    for (int r = 0; r < 3; ++r) {
      reports.push_back(score_classifier(pred, truth, *regions[r], labels[r]));
      rows.push_back(ClassifierRow{scene.name, cfg.block_size, kMethodProposed, reports.back(),
                                   diag.ent_th, diag.fallback_used});
    }
    out << report_table(kMethodProposed, reports);
    auc_rows.push_back(AucRow{scene.name, cfg.block_size, kMeasureEd, RegionLabel::NonOcc,
                              auc_sparsification(maps.difference, truth, scene.nonocc,
                                                 cfg.auc_steps)});
  } else {
    const PairRun run = run_pair(scene, cfg.block_size, bc);
    std::vector<EvalReport> proposed;
    std::vector<EvalReport> lrc;
    for (int r = 0; r < 3; ++r) {
      proposed.push_back(run.proposed[r].report);
      lrc.push_back(run.lrc[r].report);
      rows.push_back(run.proposed[r]);
    }
    for (int r = 0; r < 3; ++r) rows.push_back(run.lrc[r]);
    out << report_table(kMethodProposed, proposed) << report_table(kMethodLrc, lrc);
    auc_rows.push_back(run.auc_ed);
    auc_rows.push_back(run.auc_depth_only);
  }
  for (const auto& a : auc_rows) {
    out << "auc " << a.measure << " " << to_string(a.region) << ": " << real(a.report.auc)
        << " (error rate " << real(a.report.error_rate) << ", optimal "
        << real(a.report.auc_optimal) << ")\n";
  }
  const fs::path eval_path = cfg.out_dir / "evaluation.csv";
  write_text_atomic(eval_path, classifier_csv(rows));
  wrote(out, eval_path, "classifier report");
  const fs::path auc_path = cfg.out_dir / "auc.csv";
  write_text_atomic(auc_path, auc_csv(auc_rows));
  wrote(out, auc_path, "sparsification report");
  return 0;
}

int run_benchmark_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  BenchmarkConfig bc;
  bc.windows = cfg.windows;
  bc.neighborhood = cfg.neighborhood;
  bc.lrc_tol = cfg.lrc_tol;
  bc.err_tol = cfg.err_tol;
  bc.auc_steps = cfg.auc_steps;
  bc.conditioning = cfg.conditioning;
  const auto manifests = find_manifests(*cfg.manifest_dir);
  const BenchmarkResult result = run_benchmark(manifests, bc);
  for (const auto& f : result.failures) {
    err << "skipped pair " << f.pair << ": " << f.message << "\n";
  }
  const std::pair<std::string, std::string> files[] = {
      {"classifier.csv", classifier_csv(result.classifier_rows)},
      {"summary.csv", summary_csv(result.summary())},
      {"auc.csv", auc_csv(result.auc_rows)},
      {"timing.csv", timing_csv(result.timing_rows)},
  };
  for (const auto& [name, text] : files) {
    const fs::path path = cfg.out_dir / name;
    write_text_atomic(path, text);
    wrote(out, path, "benchmark report");
  }
  out << "positive class: reliable (correct disparity); conditioning "
      << to_string(cfg.conditioning) << "\n";
  for (const auto& row : result.summary()) {
    out << row.pair << " " << row.method << " " << to_string(row.region) << ": precision "
        << pct(row.precision) << " accuracy " << pct(row.accuracy) << " recall "
        << pct(row.recall) << "\n";
  }
  return result.failures.empty() || !result.classifier_rows.empty() ? 0 : kExitFailure;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::Match: return run_match(cfg, out);
      case Command::Entropy: return run_entropy(cfg, out);
      case Command::Confidence: return run_confidence(cfg, out);
      case Command::Classify: return run_classify(cfg, out);
      case Command::Lrc: return run_lrc(cfg, out);
      case Command::Evaluate: return run_evaluate(cfg, out);
      case Command::Benchmark: return run_benchmark_command(cfg, out, err);
    }
  } catch (const Error& e) {
    err << "error [" << edstereo::to_string(e.kind()) << "] in " << to_string(cfg.command)
        << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Io: return kExitIo;
      case ErrorKind::Format: return kExitFormat;
      default: return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error in " << to_string(cfg.command) << ": " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace edstereo::cli
