#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <moran/error.hpp>

#include "moran_cli/config.hpp"
#include "moran_cli/run.hpp"

namespace {

int fail(const std::string& message, int code, bool quiet) {
  if (!quiet) std::cerr << "moran: " << message << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace moran::cli;
  using moran::Json;
  CLI::App app{"Dimensions of Moran sets and measures"};
  app.footer(config_help());

  std::string config_path;
  std::string command;
  std::string out_path;
  std::string format;
  std::string estimator;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--command", command, "dim | local-dim | lq | realize | estimate | verify | conditions");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "csv | json (default json)")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "Sampling seed (default 0)");
  auto* depth_opt = app.add_option("--depth", depth, "Levels to evaluate (default 50)");
  app.add_flag("--quiet", quiet, "Suppress the summary line on stderr");
  app.add_option("estimator", estimator, "box | local | sq for the estimate command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  Json doc;
  {
    std::ifstream in(config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      doc = Json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
      return fail(std::string("config is not valid JSON: ") + e.what(), kConfigError, quiet);
    }
  }
  if (!doc.is_object()) return fail("config must be a JSON object", kConfigError, quiet);
  if (!command.empty()) doc["command"] = command;
  if (!estimator.empty()) doc["estimator"] = estimator;
  if (*seed_opt) doc["seed"] = seed;
  if (*depth_opt) doc["depth"] = depth;
  if (!out_path.empty() || !format.empty()) {
    Json output = doc.contains("output") ? doc["output"] : Json::object();
    if (!out_path.empty()) output["path"] = out_path;
    if (!format.empty()) output["format"] = format;
    doc["output"] = output;
  }

  RunConfig config;
  try {
    config = parse_config(doc, std::filesystem::path(config_path).parent_path());
  } catch (const moran::Error& e) {
    return fail(e.what(), kConfigError, quiet);
  }

  const auto outcome = run(config);
  if (!outcome.output.empty()) {
    if (config.output_path.empty()) {
      std::cout << outcome.output;
    } else {
      std::ofstream out(config.output_path, std::ios::binary);
      if (!out) return fail("cannot write " + config.output_path, kConfigError, quiet);
      out << outcome.output;
    }
  }
  if (outcome.exit_code != kSuccess) return fail(outcome.message, outcome.exit_code, quiet);
  if (!quiet) std::cerr << outcome.message << "\n";
  return kSuccess;
}
