#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ivf/adiabatic.hpp"
#include "ivf/maps.hpp"
#include "ivf/section.hpp"

namespace ivf {

using Json = nlohmann::json;

enum class ExperimentKind {
  iterate,
  flow_error,
  dh_scan,
  restore_field,
  section,
  invariant_series,
  seed_levelset,
  coeff_dump,
};

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int schema = 2;
inline constexpr int numerical = 3;
inline constexpr int io = 4;
}  // namespace exit_code

/// The "map" block: {"map": "standard"|"froeschle"|"flow", "epsilon": e,
/// "params": {...}, "power": q, "winding": [...], "domain": {...}}.
struct MapConfig {
  std::string kind = "standard";
  double epsilon = 0.1;
  Json params = Json::object();
  int power = 1;
  std::vector<int> winding;
  Domain domain;

  MapFamily build() const { return build(epsilon); }
  MapFamily build(double eps) const;
  std::size_t dim() const;
  Vec default_base_point() const;
};

MapConfig parse_map_config(const Json& block);
IntegratorSettings parse_integrator(const Json& config);
InvariantOptions parse_invariant_options(const Json& config);
SectionSpec parse_section_spec(const Json& block, std::size_t dim);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> notes;
  double estimated_map_applications = 0.0;
  bool ok() const { return errors.empty(); }
};

/// Schema and cross-field checks plus a cost estimate in map applications.
/// Never throws for malformed input; problems land in errors.
ValidationReport validate_config(const Json& config);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int workers = 0;  ///< 0: take "workers" from the config (default 1)
  bool quiet = true;
};

struct RunSummary {
  int exit_code = exit_code::ok;
  std::vector<std::filesystem::path> outputs;
  std::size_t failures = 0;
  std::vector<std::string> failure_log;
  double wall_time_s = 0.0;
  std::uint64_t field_evaluations = 0;
  std::uint64_t map_applications = 0;
  double estimated_map_applications = 0.0;
  std::string message;
};

/// Runs one experiment. Artifacts are written atomically (temp file + rename)
/// into opts.out_dir together with manifest.json. Exit codes: 2 for schema
/// violations, 3 for numerical failures (partial outputs kept, failures.log
/// written), 4 for I/O errors.
RunSummary run_experiment(const Json& config, const RunOptions& opts);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const Json& config);

}  // namespace ivf
