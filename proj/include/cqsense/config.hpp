#ifndef CQSENSE_CONFIG_HPP
#define CQSENSE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqsense/dynamics.hpp"
#include "cqsense/errors.hpp"
#include "cqsense/protocols.hpp"

namespace cqsense {

enum class Mode { evolve, qfi, fi, optimize, bound, figure, validate };

struct GridSpec {
  double t_min = 0.0;
  double t_max = 1.0;
  int points = 2;
  bool logarithmic = false;
};

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::cqs;
  /// With both absent, PQS uses the QFI-optimal split of the budget
  /// (evolve mode treats absent values as zero).
  std::optional<double> alpha;
  std::optional<double> r;
  double n_max = 1.0;
  double total_time = 1.0;
  double t_pm = 0.0;
  double psi = 0.0;
  /// CQS only: evaluate the exact steady state instead of a finite window.
  bool steady_state = false;
};

struct RunConfig {
  Mode mode = Mode::qfi;
  SystemParams params;
  ProtocolConfig protocol;
  std::optional<GridSpec> grid;
  std::optional<double> t;
  std::string output_path;
  std::string output_format = "json";
  std::string figure;
  /// Constant photon number for the bound mode.
  std::optional<double> bound_photons;
  /// Normalized copy of the input document, echoed in reports.
  nlohmann::json echo;
};

/// Schema violation; what() lists every offending field path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

RunConfig parse_config(const nlohmann::json& doc);

/// Applies "a.b.c=value" to doc. The value is parsed as JSON when possible
/// and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

struct RunResult {
  std::string payload;
  /// False only when a validate run has failing checks.
  bool ok = true;
};

/// Runs the configured computation and returns the payload (JSON or CSV).
/// Library errors propagate unchanged.
RunResult run_config(const RunConfig& config);

}  // namespace cqsense

#endif  // CQSENSE_CONFIG_HPP
