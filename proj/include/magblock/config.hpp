#pragma once

// JSON run configuration. One schema serves hand-written config files, the
// canonical spec echoed into provenance sidecars, and the spec hash.
//
//   {
//     "system":     {"delta": 21, "g_qm": 21, "omega_drive": 0.1, ...},
//     "thermal":    {"magnon_frequency_ghz": 8.5, "temperature_k": 0.02},
//     "axes":       [{"param": "delta", "min": -30, "max": 30, "count": 241,
//                     "spacing": "linear"}],
//     "solver":     "deterministic" | "trajectory",
//     "cutoff":     "auto" | <integer>,
//     "g2_tol":     1e-3,
//     "trajectory": {"n_trajectories": 500, "seed": 12345, ...},
//     "blockade_threshold": 1e-2
//   }
//
// Every key is optional; unknown keys are rejected.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "magblock/observables.hpp"
#include "magblock/sweep.hpp"

namespace magblock {

/// Malformed or schema-violating configuration; carries a 1-based line when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  SweepSpec spec;  ///< base parameters, solver, cutoff, trajectory, axes
  ClassifyOptions classify;
};

/// Parses config text; `source` names the origin in error messages. A
/// provenance sidecar (object with "spec" and "provenance") is accepted and
/// its "spec" block used.
/// Fields absent from the file keep the values in `defaults`.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>",
                       const SystemParams& defaults = SystemParams::paper_defaults());
RunConfig load_config(const std::string& path,
                      const SystemParams& defaults = SystemParams::paper_defaults());

/// Applies "name=value" to the system block, e.g. "delta=14.8" or "n_max=12".
void apply_override(SystemParams& p, std::string_view assignment);

nlohmann::json to_json(const SystemParams& p);
nlohmann::json to_json(const TrajectoryConfig& cfg);
nlohmann::json to_json(const Axis& axis);
nlohmann::json to_json(const SweepSpec& spec);

/// Compact, key-sorted serialization used for hashing.
std::string canonical_json(const SweepSpec& spec);
std::string sha256_hex(std::string_view data);

}  // namespace magblock
