#include <algorithm>
#include <filesystem>
#include <iostream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqsense/config.hpp"
#include "cqsense/csv.hpp"
#include "cqsense/figures.hpp"
#include "cqsense/validate.hpp"
#include "cqsense/version.hpp"

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

int run_figure(const std::string& name, const std::string& out_dir) {
  const auto names = cqsense::figure_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::cerr << "unknown figure '" << name << "'; choose one of:";
    for (const auto& n : names) std::cerr << ' ' << n;
    std::cerr << '\n';
    return kExitUsage;
  }
  const std::string csv = cqsense::to_csv(cqsense::make_figure(name));
  if (out_dir.empty()) {
    std::cout << csv;
    return 0;
  }
  std::filesystem::create_directories(out_dir);
  const std::string path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
  cqsense::write_text_file(path, csv);
  std::cerr << "wrote " << path << '\n';
  return 0;
}

int run_compute(const std::string& config_path, const std::string& out_path,
                const std::vector<std::string>& overrides) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(cqsense::read_text_file(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kExitUsage;
  }
  for (const auto& o : overrides) cqsense::apply_override(doc, o);
  cqsense::RunConfig config = cqsense::parse_config(doc);
  if (!out_path.empty()) config.output_path = out_path;
  const cqsense::RunResult result = cqsense::run_config(config);
  if (config.output_path.empty()) {
    std::cout << result.payload;
  } else {
    cqsense::write_text_file(config.output_path, result.payload);
  }
  return result.ok ? 0 : kExitCheckFailure;
}

int run_validate(const std::string& filter, double c2_error) {
  const auto results = cqsense::run_validation({filter, c2_error});
  std::cout << cqsense::format_validation_table(results);
  if (results.empty()) {
    std::cerr << "no checks match '" << filter << "'\n";
    return kExitUsage;
  }
  for (const auto& r : results) {
    if (!r.passed) return kExitCheckFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical and passive quantum sensing toolkit"};
  app.set_version_flag("--version", cqsense::kVersion);
  app.require_subcommand(1);

  std::string figure_name;
  std::string figure_out;
  auto* figure = app.add_subcommand("figure", "Write the dataset behind a figure as CSV");
  figure->add_option("name", figure_name, "Figure name")->required();
  figure->add_option("--out", figure_out, "Output directory (stdout if omitted)");

  std::string config_path;
  std::string compute_out;
  std::vector<std::string> overrides;
  auto* compute = app.add_subcommand("compute", "Run a JSON configuration");
  compute->add_option("--config", config_path, "Configuration file")->required();
  compute->add_option("--out", compute_out, "Report file (overrides output.path)");
  compute->add_option("--set", overrides, "Override a field, e.g. --set params.gamma=0.5");

  std::string filter;
  double c2_error = 0.0;
  auto* validate = app.add_subcommand("validate", "Run oracle-agreement and invariant checks");
  validate->add_option("--filter", filter, "Regex selecting check names");
  validate->add_option("--inject-c2-error", c2_error)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*figure) return run_figure(figure_name, figure_out);
    if (*compute) return run_compute(config_path, compute_out, overrides);
    return run_validate(filter, c2_error);
  } catch (const std::regex_error& e) {
    std::cerr << "invalid filter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
