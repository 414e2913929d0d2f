#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <moran/realization.hpp>
#include <moran/serialize.hpp>
#include <moran/word.hpp>

namespace moran::cli {

enum class Command { dim, local_dim, lq, realize, estimate, verify, conditions };
enum class Estimator { box, local, sq };
enum class Format { json, csv };

std::string to_string(Command command);
Command command_from_string(const std::string& text);
std::string to_string(Estimator estimator);
Estimator estimator_from_string(const std::string& text);
std::string to_string(Format format);
Format format_from_string(const std::string& text);

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kDefaultDepth = 50;
inline constexpr std::size_t kDefaultTailWindow = 10;
inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr double kDefaultScaleBase = 1.0 / 3.0;
inline constexpr std::size_t kDefaultPathSample = 32;

struct ExplicitInterval {
  Word word;
  double left = 0.0;
  double right = 0.0;
};

struct RunConfig {
  Json spec;                         ///< inline spec document (file references resolved)
  std::optional<Json> weight_rule;   ///< absent means the uniform measure
  Command command = Command::dim;
  std::optional<Estimator> estimator;
  std::size_t depth = kDefaultDepth;
  std::size_t tail_window = kDefaultTailWindow;
  double tolerance = kDefaultTolerance;
  double scale_base = kDefaultScaleBase;
  double scale_largest = 0.0;        ///< resolved to base^4 when absent
  std::size_t scale_count = 0;       ///< resolved to max(4, depth - 5) when absent
  std::uint64_t seed = 0;
  std::vector<double> q_grid;
  std::optional<Word> path;
  std::optional<double> x;
  std::size_t path_sample = kDefaultPathSample;
  GapRule gap_rule = GapRule::uniform_gaps;
  double eta = 0.0;                  ///< uniformly_perfect placements only
  std::vector<ExplicitInterval> intervals;
  std::optional<std::pair<double, double>> region;
  double sq_q = 2.0;
  double delta = 0.0;
  std::string output_path;           ///< empty means stdout
  Format format = Format::json;
};

/// Strict parser: unknown keys and out-of-range values throw InvalidArgument
/// naming the key path. A string "spec" is read as a file path relative to
/// `base_dir`.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Fully resolved document; parse_config(config_to_json(c)) reproduces c.
Json config_to_json(const RunConfig& config);

/// Text shown by --help describing the config keys and defaults.
std::string config_help();

}  // namespace moran::cli
