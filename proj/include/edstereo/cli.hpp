#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edstereo/threshold.hpp"

namespace edstereo::cli {

enum class Command { Match, Entropy, Confidence, Classify, Lrc, Evaluate, Benchmark };

const char* to_string(Command command);

struct RunConfig {
  Command command = Command::Classify;

  std::optional<std::filesystem::path> left;
  std::optional<std::filesystem::path> right;
  std::optional<std::filesystem::path> depth;
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> nonocc;
  std::optional<std::filesystem::path> disc;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> manifest_dir;
  std::filesystem::path out_dir = ".";

  int block_size = 5;
  /// Defaults to block_size.
  std::optional<int> neighborhood;
  std::optional<int> max_disparity;
  int gt_scale = 1;
  int region_threshold = 1;
  int lrc_tol = 1;
  int err_tol = 1;
  int auc_steps = 20;
  std::vector<int> windows{5, 7};
  Conditioning conditioning = Conditioning::EntropyDifference;

  int effective_neighborhood() const { return neighborhood.value_or(block_size); }
};

/// Either a validated config, or text to print with an exit status
/// (0 for --help, nonzero for usage errors).
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;
  std::string message;
};

/// Flags may come from the command line or a `key = value` file given with
/// --config; command-line values win.
ParseResult parse_args(int argc, const char* const* argv);

/// Exit status for each failure category.
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitFormat = 4;
inline constexpr int kExitFailure = 5;

/// Executes the command, writing files atomically under cfg.out_dir and one
/// summary line per artifact to `out`. Errors go to `err` with their stage.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace edstereo::cli
