#include "cqsense/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "cqsense/csv.hpp"
#include "cqsense/figures.hpp"
#include "cqsense/numerics.hpp"
#include "cqsense/parallel.hpp"
#include "cqsense/validate.hpp"
#include "cqsense/version.hpp"

namespace cqsense {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid config:";
  for (const auto& issue : issues) out += "\n  " + issue;
  return out;
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::evolve: return "evolve";
    case Mode::qfi: return "qfi";
    case Mode::fi: return "fi";
    case Mode::optimize: return "optimize";
    case Mode::bound: return "bound";
    case Mode::figure: return "figure";
    case Mode::validate: return "validate";
  }
  return "?";
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Collects schema issues while reading one JSON object.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& issues)
      : obj_(obj), path_(std::move(path)), issues_(issues) {
    if (!obj_.is_object()) issues_.push_back(where() + ": expected an object");
  }

  std::optional<double> number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      issues_.push_back(where(key) + ": expected a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      issues_.push_back(where(key) + ": must be finite");
      return std::nullopt;
    }
    return d;
  }

  void number(const std::string& key, double& out) {
    if (auto d = number(key)) out = *d;
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      issues_.push_back(where(key) + ": expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      issues_.push_back(where(key) + ": expected a boolean");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  const json* object(const std::string& key) {
    const json* v = find(key);
    if (v && !v->is_object()) {
      issues_.push_back(where(key) + ": expected an object");
      return nullptr;
    }
    return v;
  }

  void require(const std::string& key) {
    if (obj_.is_object() && !obj_.contains(key)) issues_.push_back(where(key) + ": is required");
  }

  void issue(const std::string& key, const std::string& what) {
    issues_.push_back(where(key) + ": " + what);
  }

  /// Reports keys that were never looked up.
  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) issues_.push_back(where(key) + ": unknown field");
    }
  }

  std::string where(const std::string& key = "") const {
    std::string p = path_.empty() ? "" : path_;
    if (!key.empty()) p += "/" + key;
    return p.empty() ? "/" : p;
  }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) return nullptr;
    return &obj_.at(key);
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
};

void read_params(const json& doc, SystemParams& p, std::vector<std::string>& issues) {
  Reader r(doc, "/params", issues);
  r.number("omega0", p.omega0);
  r.number("delta_omega", p.delta_omega);
  r.number("epsilon", p.epsilon);
  r.number("gamma", p.gamma);
  r.number("n_bath", p.n_bath);
  r.finish();
  if (p.epsilon < 0.0) r.issue("epsilon", "must be nonnegative");
  if (p.gamma < 0.0) r.issue("gamma", "must be nonnegative");
  if (p.n_bath < 0.0) r.issue("n_bath", "must be nonnegative");
}

void read_protocol(const json& doc, ProtocolConfig& pc, std::vector<std::string>& issues) {
  Reader r(doc, "/protocol", issues);
  if (auto kind = r.string("kind")) {
    const std::string k = lower(*kind);
    if (k == "cqs") {
      pc.kind = ProtocolKind::cqs;
    } else if (k == "pqs") {
      pc.kind = ProtocolKind::pqs;
    } else {
      r.issue("kind", "must be CQS or PQS");
    }
  }
  pc.alpha = r.number("alpha");
  pc.r = r.number("r");
  r.number("n_max", pc.n_max);
  r.number("T", pc.total_time);
  r.number("t_pm", pc.t_pm);
  r.number("psi", pc.psi);
  if (auto s = r.boolean("steady_state")) pc.steady_state = *s;
  r.finish();
  if (pc.alpha && *pc.alpha < 0.0) r.issue("alpha", "must be nonnegative");
  if (!(pc.n_max > 0.0)) r.issue("n_max", "must be positive");
  if (!(pc.total_time > 0.0)) r.issue("T", "must be positive");
  if (pc.t_pm < 0.0) r.issue("t_pm", "must be nonnegative");
  if (pc.steady_state && pc.kind == ProtocolKind::pqs) {
    r.issue("steady_state", "only applies to CQS");
  }
}

void read_grid(const json& doc, GridSpec& g, std::vector<std::string>& issues) {
  Reader r(doc, "/grid", issues);
  r.require("t_min");
  r.require("t_max");
  r.require("points");
  r.number("t_min", g.t_min);
  r.number("t_max", g.t_max);
  if (auto n = r.number("points")) {
    if (*n != std::floor(*n) || *n < 2 || *n > 1e6) {
      r.issue("points", "must be an integer in [2, 1000000]");
    } else {
      g.points = static_cast<int>(*n);
    }
  }
  if (auto s = r.string("spacing")) {
    if (*s == "log") {
      g.logarithmic = true;
    } else if (*s != "linear") {
      r.issue("spacing", "must be linear or log");
    }
  }
  r.finish();
  if (g.t_min < 0.0) r.issue("t_min", "must be nonnegative");
  if (!(g.t_min < g.t_max)) r.issue("t_max", "must exceed t_min");
  if (g.logarithmic && !(g.t_min > 0.0)) r.issue("t_min", "must be positive for log spacing");
}

json params_json(const SystemParams& p) {
  return {{"omega0", p.omega0},
          {"delta_omega", p.delta_omega},
          {"epsilon", p.epsilon},
          {"gamma", p.gamma},
          {"n_bath", p.n_bath}};
}

json echo_of(const RunConfig& c) {
  json e;
  e["mode"] = mode_name(c.mode);
  e["params"] = params_json(c.params);
  json pr = {{"kind", std::string(to_string(c.protocol.kind))},
             {"n_max", c.protocol.n_max},
             {"T", c.protocol.total_time},
             {"t_pm", c.protocol.t_pm},
             {"psi", c.protocol.psi},
             {"steady_state", c.protocol.steady_state}};
  if (c.protocol.alpha) pr["alpha"] = *c.protocol.alpha;
  if (c.protocol.r) pr["r"] = *c.protocol.r;
  e["protocol"] = pr;
  if (c.grid) {
    e["grid"] = {{"t_min", c.grid->t_min},
                 {"t_max", c.grid->t_max},
                 {"points", c.grid->points},
                 {"spacing", c.grid->logarithmic ? "log" : "linear"}};
  }
  if (c.t) e["t"] = *c.t;
  e["output"] = {{"format", c.output_format}};
  if (!c.figure.empty()) e["figure"] = c.figure;
  if (c.bound_photons) e["bound"] = {{"photons", *c.bound_photons}};
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<double> time_points(const RunConfig& c) {
  if (c.t) return {*c.t};
  const GridSpec& g = *c.grid;
  return g.logarithmic ? numerics::log_space(g.t_min, g.t_max, g.points)
                       : numerics::linear_space(g.t_min, g.t_max, g.points);
}

bool pqs_uses_optimal_split(const ProtocolConfig& pc) { return !pc.alpha && !pc.r; }

PqsInput explicit_input(const ProtocolConfig& pc) {
  PqsInput in;
  in.alpha.magnitude = pc.alpha.value_or(0.0);
  in.squeeze.r = pc.r.value_or(0.0);
  return in;
}

PqsInput pqs_input_at(const RunConfig& c, double t) {
  if (!pqs_uses_optimal_split(c.protocol)) return explicit_input(c.protocol);
  return pqs_optimal_qfi(c.protocol.n_max, c.params, t).input;
}

ProtocolSpec spec_at(const RunConfig& c, double t) {
  ProtocolSpec spec;
  spec.kind = c.protocol.kind;
  spec.params = c.params;
  spec.budget = {c.protocol.n_max, c.protocol.total_time, c.protocol.t_pm};
  if (spec.kind == ProtocolKind::pqs) spec.pqs_input = pqs_input_at(c, t);
  return spec;
}

json state_json(const GaussianStated& s) {
  return {{"v", {s.v()(0), s.v()(1)}},
          {"sigma", {{s.sigma()(0, 0), s.sigma()(0, 1)}, {s.sigma()(1, 0), s.sigma()(1, 1)}}},
          {"mean_photons", mean_photons(s)},
          {"purity", purity(s)}};
}

json report_json(const MetrologyReport& r) {
  return {{"qfi_single_shot", r.qfi_single_shot},
          {"fi_homodyne_best", r.fi_homodyne_best},
          {"best_psi", r.best_psi},
          {"photons_at_t", r.photons_at_t},
          {"repetitions", r.repetitions},
          {"total_qfi", r.total_qfi},
          {"bound_value", r.bound_value},
          {"bound_cap", r.bound_cap},
          {"t_opt", r.t_opt},
          {"accuracy_warning", r.accuracy_warning}};
}

GaussianStated evolved_state(const RunConfig& c, double t) {
  if (c.protocol.kind == ProtocolKind::pqs) {
    const GaussianStated start = pqs_input_state(explicit_input(c.protocol), c.params.n_bath);
    return t == 0.0 ? start : evolve_passive(c.params, start, t);
  }
  return evolve_critical(c.params, thermal_state(c.params.n_bath), t);
}

json evolve_at(const RunConfig& c, double t) {
  json out = state_json(evolved_state(c, t));
  out["t"] = t;
  return out;
}

DerivativePair pair_at(const RunConfig& c, double t) {
  if (c.protocol.kind == ProtocolKind::pqs) return pqs_pair(pqs_input_at(c, t), c.params, t);
  return cqs_pair(c.params, t);
}

json steady_report(const RunConfig& c) {
  const double ec = c.params.epsilon_c();
  if (c.params.gamma > 0.0 && c.params.epsilon >= ec) {
    throw NoSteadyStateError("steady state requested with epsilon >= epsilon_c");
  }
  const DerivativePair pair = cqs_steady_pair(c.params);
  const HomodyneOptimum hom = best_homodyne(pair);
  const double n = mean_photons(pair.state);
  if (n > c.protocol.n_max * (1.0 + 1e-9)) {
    throw ConstraintError("steady-state photon number exceeds the budget");
  }
  json out = {{"qfi_single_shot", qfi(pair)},
              {"fi_homodyne_best", hom.fi},
              {"best_psi", hom.psi},
              {"photons_at_t", n},
              {"accuracy_warning", pair.accuracy_warning}};
  if (c.mode == Mode::fi) {
    out["psi"] = c.protocol.psi;
    out["fi_homodyne"] = fi_homodyne(pair, {c.protocol.psi});
  }
  return out;
}

json qfi_at(const RunConfig& c, double t) {
  const ProtocolSpec spec = spec_at(c, t);
  json out = report_json(total_qfi(spec, t));
  out["t"] = t;
  if (c.mode == Mode::fi) {
    out["psi"] = c.protocol.psi;
    out["fi_homodyne"] = fi_homodyne(pair_at(c, t), {c.protocol.psi});
  }
  return out;
}

json optimize_report(const RunConfig& c) {
  std::pair<double, double> bracket;
  if (c.grid) {
    bracket = {c.grid->t_min, c.grid->t_max};
  } else if (c.params.gamma > 0.0) {
    bracket = {1e-3 / c.params.gamma, 20.0 / c.params.gamma};
    if (c.protocol.kind == ProtocolKind::cqs) {
      const double w = c.params.omega();
      const double kappa =
          std::sqrt(std::max(0.0, c.params.epsilon * c.params.epsilon - w * w));
      if (c.params.gamma > kappa) bracket.second = 20.0 / (c.params.gamma - kappa);
    }
  } else {
    throw PreconditionError("optimize mode with gamma = 0 needs a grid bracket");
  }
  if (!(bracket.first > 0.0)) throw DomainError("optimization bracket must start above 0");
  const ResourceBudget budget{c.protocol.n_max, c.protocol.total_time, c.protocol.t_pm};
  const RateFunction rate = [&](double t) {
    if (c.protocol.kind == ProtocolKind::pqs) {
      if (pqs_uses_optimal_split(c.protocol)) {
        return pqs_optimal_qfi(c.protocol.n_max, c.params, t).value;
      }
      return pqs_qfi(explicit_input(c.protocol), c.params, t);
    }
    return cqs_qfi(c.params, t);
  };
  const TimeOptimum best = optimize_time(rate, budget, bracket);
  MetrologyReport report = total_qfi(spec_at(c, best.t_opt), best.t_opt);
  report.t_opt = best.t_opt;
  json out = report_json(report);
  out["best_rate"] = best.best_rate;
  return out;
}

json bound_report(const RunConfig& c) {
  const double T = c.protocol.total_time;
  BoundResult b;
  if (c.bound_photons) {
    const double n = *c.bound_photons;
    b = fundamental_bound([n](double) { return n; }, T, c.params.gamma, c.params.n_bath);
  } else if (c.protocol.kind == ProtocolKind::pqs) {
    const PqsInput input = pqs_input_at(c, T);
    const GaussianStated start = pqs_input_state(input, c.params.n_bath);
    const SystemParams p = c.params;
    b = fundamental_bound([&](double s) { return mean_photons(evolve_passive(p, start, s)); },
                          T, p.gamma, p.n_bath);
  } else {
    const SystemParams p = c.params;
    b = fundamental_bound([&](double s) { return mean_photons_vs_time(p, s); }, T, p.gamma,
                          p.n_bath);
  }
  return {{"bound_value", b.integral}, {"bound_cap", b.cap}, {"T", T}};
}

std::string rows_to_csv(const std::vector<json>& rows) {
  CsvTable table;
  for (const auto& [key, value] : rows.front().items()) {
    if (value.is_number() || value.is_boolean()) {
      table.header.push_back(key);
    } else if (value.is_array() && key == "v") {
      table.header.insert(table.header.end(), {"v_x", "v_p"});
    } else if (value.is_array() && key == "sigma") {
      table.header.insert(table.header.end(), {"sigma_xx", "sigma_xp", "sigma_pp"});
    }
  }
  // t first, remaining columns in key order
  std::stable_partition(table.header.begin(), table.header.end(),
                        [](const std::string& h) { return h == "t"; });
  for (const auto& row : rows) {
    std::vector<double> values;
    for (const auto& h : table.header) {
      if (h == "v_x") values.push_back(row["v"][0]);
      else if (h == "v_p") values.push_back(row["v"][1]);
      else if (h == "sigma_xx") values.push_back(row["sigma"][0][0]);
      else if (h == "sigma_xp") values.push_back(row["sigma"][0][1]);
      else if (h == "sigma_pp") values.push_back(row["sigma"][1][1]);
      else if (row[h].is_boolean()) values.push_back(row[h].get<bool>() ? 1.0 : 0.0);
      else if (row[h].is_null()) values.push_back(INFINITY);
      else values.push_back(row[h].get<double>());
    }
    table.rows.push_back(std::move(values));
  }
  return to_csv(table);
}

std::string table_json(const CsvTable& table) {
  return json({{"header", table.header}, {"rows", table.rows}}).dump(2) + "\n";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

RunConfig parse_config(const json& doc) {
  std::vector<std::string> issues;
  RunConfig c;
  Reader top(doc, "", issues);
  top.require("mode");
  if (auto m = top.string("mode")) {
    static const std::pair<const char*, Mode> modes[] = {
        {"evolve", Mode::evolve}, {"qfi", Mode::qfi},         {"fi", Mode::fi},
        {"optimize", Mode::optimize}, {"bound", Mode::bound}, {"figure", Mode::figure},
        {"validate", Mode::validate}};
    bool found = false;
    for (const auto& [name, mode] : modes) {
      if (*m == name) {
        c.mode = mode;
        found = true;
      }
    }
    if (!found) top.issue("mode", "unknown mode '" + *m + "'");
  }
  if (const json* p = top.object("params")) read_params(*p, c.params, issues);
  bool has_protocol = false;
  if (const json* p = top.object("protocol")) {
    read_protocol(*p, c.protocol, issues);
    has_protocol = true;
  }
  if (const json* g = top.object("grid")) {
    c.grid.emplace();
    read_grid(*g, *c.grid, issues);
  }
  c.t = top.number("t");
  if (c.t && *c.t < 0.0) top.issue("t", "must be nonnegative");
  if (const json* o = top.object("output")) {
    Reader r(*o, "/output", issues);
    if (auto path = r.string("path")) c.output_path = *path;
    if (auto fmt = r.string("format")) {
      if (*fmt != "csv" && *fmt != "json") r.issue("format", "must be csv or json");
      c.output_format = *fmt;
    }
    r.finish();
  }
  if (auto f = top.string("figure")) c.figure = *f;
  if (const json* b = top.object("bound")) {
    Reader r(*b, "/bound", issues);
    c.bound_photons = r.number("photons");
    if (c.bound_photons && *c.bound_photons < 0.0) r.issue("photons", "must be nonnegative");
    r.finish();
  }
  top.finish();

  const bool windowed = c.mode == Mode::evolve || c.mode == Mode::qfi || c.mode == Mode::fi;
  if (windowed && !c.protocol.steady_state) {
    if (c.t && c.grid) top.issue("t", "give either t or grid, not both");
    if (!c.t && !c.grid) top.issue("t", "is required (or give a grid)");
  }
  if ((c.mode == Mode::qfi || c.mode == Mode::fi || c.mode == Mode::optimize) && !has_protocol) {
    top.issue("protocol", "is required for this mode");
  }
  if ((c.mode == Mode::qfi || c.mode == Mode::fi || c.mode == Mode::optimize) && has_protocol &&
      !doc["protocol"].contains("n_max")) {
    top.issue("protocol/n_max", "is required for this mode");
  }
  if (c.mode == Mode::figure) {
    const auto names = figure_names();
    if (c.figure.empty()) {
      top.issue("figure", "is required for figure mode");
    } else if (std::find(names.begin(), names.end(), c.figure) == names.end()) {
      top.issue("figure", "unknown figure '" + c.figure + "'");
    }
  }
  if (c.protocol.steady_state && c.mode != Mode::qfi && c.mode != Mode::fi) {
    top.issue("protocol/steady_state", "only supported in qfi and fi modes");
  }
  if (c.mode == Mode::qfi || c.mode == Mode::fi) {
    const double t0 = c.t ? *c.t : (c.grid ? c.grid->t_min : 1.0);
    if (!c.protocol.steady_state && !(t0 > 0.0)) top.issue("t", "must be positive in this mode");
  }
  if (c.mode == Mode::validate && c.output_format == "csv") {
    top.issue("output/format", "validate reports are JSON only");
  }
  if (c.mode == Mode::evolve && c.protocol.kind == ProtocolKind::pqs &&
      c.params.epsilon != 0.0) {
    top.issue("params/epsilon", "must be 0 for PQS");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  c.echo = echo_of(c);
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError({"--set " + assignment + ": expected path=value"});
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError({"--set " + assignment + ": empty path component"});
    if (!node->is_object()) {
      if (!node->is_null()) {
        throw ConfigError({"--set " + assignment + ": " + key + " is not inside an object"});
      }
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunResult run_config(const RunConfig& c) {
  RunResult result;
  json report;
  std::vector<json> rows;
  switch (c.mode) {
    case Mode::evolve: {
      const auto ts = time_points(c);
      rows = parallel_map(ts.size(), [&](std::size_t i) { return evolve_at(c, ts[i]); });
      break;
    }
    case Mode::qfi:
    case Mode::fi: {
      if (c.protocol.steady_state) {
        report = steady_report(c);
        break;
      }
      const auto ts = time_points(c);
      rows = parallel_map(ts.size(), [&](std::size_t i) { return qfi_at(c, ts[i]); });
      break;
    }
    case Mode::optimize:
      report = optimize_report(c);
      break;
    case Mode::bound:
      report = bound_report(c);
      break;
    case Mode::figure: {
      const CsvTable table = make_figure(c.figure);
      result.payload = c.output_format == "json" ? table_json(table) : to_csv(table);
      return result;
    }
    case Mode::validate: {
      const auto checks = run_validation({});
      json list = json::array();
      for (const auto& r : checks) {
        list.push_back({{"name", r.name},
                        {"measured", r.measured},
                        {"tolerance", r.tolerance},
                        {"passed", r.passed},
                        {"detail", r.detail}});
        result.ok = result.ok && r.passed;
      }
      report = {{"checks", list}, {"all_passed", result.ok}};
      break;
    }
  }

  if (!rows.empty()) {
    if (c.output_format == "csv") {
      result.payload = rows_to_csv(rows);
      return result;
    }
    report = rows.size() == 1 ? rows.front() : json{{"rows", rows}};
  } else if (c.output_format == "csv") {
    result.payload = rows_to_csv({report});
    return result;
  }
  const json out = {{"config", c.echo}, {"report", report}, {"version", kVersion}};
  result.payload = out.dump(2) + "\n";
  return result;
}

}  // namespace cqsense
