#include "magblock/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace magblock {

using nlohmann::json;

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// First line mentioning "key"; good enough to point a user at the culprit.
int line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  void check_keys(const json& obj, std::string_view where,
                  std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) {
      fail(std::string(where) + " must be an object", where);
    }
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail("unknown key \"" + key + "\" in " + std::string(where), key);
      }
    }
  }

  double number(const json& obj, std::string_view key, double fallback) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return fallback;
    if (!it->is_number()) fail("\"" + std::string(key) + "\" must be a number", key);
    return it->get<double>();
  }

  long long integer(const json& obj, std::string_view key, long long fallback) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) fail("\"" + std::string(key) + "\" must be an integer", key);
    return it->get<long long>();
  }

  std::uint64_t unsigned_integer(const json& obj, std::string_view key,
                                 std::uint64_t fallback) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return fallback;
    if (!it->is_number_unsigned()) {
      fail("\"" + std::string(key) + "\" must be a non-negative integer", key);
    }
    return it->get<std::uint64_t>();
  }

  std::string string(const json& obj, std::string_view key, std::string fallback) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return fallback;
    if (!it->is_string()) fail("\"" + std::string(key) + "\" must be a string", key);
    return it->get<std::string>();
  }

  [[noreturn]] void fail(const std::string& msg, std::string_view key) const {
    throw ConfigError(msg, line_of_key(text_, key));
  }

 private:
  std::string_view text_;
};

SystemParams read_system(const json& obj, const Reader& rd, SystemParams p) {
  rd.check_keys(obj, "system",
                {"delta", "delta_q", "delta_m", "g_qm", "omega_drive", "xi_probe", "kappa_m",
                 "kappa_q", "n_th", "n_max"});
  if (obj.contains("delta")) {
    if (obj.contains("delta_q") || obj.contains("delta_m")) {
      rd.fail("\"delta\" cannot be combined with \"delta_q\"/\"delta_m\"", "delta");
    }
    p.set_common_detuning(rd.number(obj, "delta", 0.0));
  }
  p.delta_q = rd.number(obj, "delta_q", p.delta_q);
  p.delta_m = rd.number(obj, "delta_m", p.delta_m);
  p.g_qm = rd.number(obj, "g_qm", p.g_qm);
  p.omega_drive = rd.number(obj, "omega_drive", p.omega_drive);
  p.xi_probe = rd.number(obj, "xi_probe", p.xi_probe);
  p.kappa_m = rd.number(obj, "kappa_m", p.kappa_m);
  p.kappa_q = rd.number(obj, "kappa_q", p.kappa_q);
  p.n_th = rd.number(obj, "n_th", p.n_th);
  p.n_max = static_cast<int>(rd.integer(obj, "n_max", p.n_max));
  return p;
}

TrajectoryConfig read_trajectory(const json& obj, const Reader& rd, TrajectoryConfig cfg) {
  rd.check_keys(obj, "trajectory",
                {"n_trajectories", "t_burn_in", "t_sample", "sample_interval", "seed", "dt_max",
                 "bootstrap_resamples"});
  cfg.n_trajectories = static_cast<int>(rd.integer(obj, "n_trajectories", cfg.n_trajectories));
  cfg.t_burn_in = rd.number(obj, "t_burn_in", cfg.t_burn_in);
  cfg.t_sample = rd.number(obj, "t_sample", cfg.t_sample);
  cfg.sample_interval = rd.number(obj, "sample_interval", cfg.sample_interval);
  cfg.rng_seed = rd.unsigned_integer(obj, "seed", cfg.rng_seed);
  cfg.dt_max = rd.number(obj, "dt_max", cfg.dt_max);
  cfg.bootstrap_resamples =
      static_cast<int>(rd.integer(obj, "bootstrap_resamples", cfg.bootstrap_resamples));
  return cfg;
}

Axis read_axis(const json& obj, const Reader& rd) {
  rd.check_keys(obj, "axis", {"param", "min", "max", "count", "spacing"});
  Axis a;
  try {
    a.param = axis_from_name(rd.string(obj, "param", ""));
  } catch (const InvalidParameter& e) {
    rd.fail(e.what(), "param");
  }
  a.min = rd.number(obj, "min", a.min);
  a.max = rd.number(obj, "max", a.max);
  a.count = static_cast<int>(rd.integer(obj, "count", a.count));
  const std::string spacing = rd.string(obj, "spacing", "linear");
  if (spacing == "linear") {
    a.spacing = Spacing::linear;
  } else if (spacing == "log") {
    a.spacing = Spacing::log;
  } else {
    rd.fail("spacing must be \"linear\" or \"log\"", "spacing");
  }
  return a;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source,
                       const SystemParams& defaults) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": malformed JSON: " + e.what(),
                      line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const Reader rd(text);
  if (root.is_object() && root.contains("spec") && root.contains("provenance")) {
    root = root.at("spec");
  }
  rd.check_keys(root, "configuration",
                {"system", "thermal", "axes", "solver", "cutoff", "g2_tol", "trajectory",
                 "blockade_threshold"});

  RunConfig cfg;
  SweepSpec& spec = cfg.spec;
  spec.base = defaults;
  if (root.contains("system")) spec.base = read_system(root.at("system"), rd, spec.base);
  if (root.contains("thermal")) {
    const json& th = root.at("thermal");
    rd.check_keys(th, "thermal", {"magnon_frequency_ghz", "temperature_k"});
    if (root.contains("system") && root.at("system").contains("n_th")) {
      rd.fail("\"thermal\" and \"system.n_th\" are mutually exclusive", "thermal");
    }
    const double ghz = rd.number(th, "magnon_frequency_ghz", 0.0);
    const double kelvin = rd.number(th, "temperature_k", 0.0);
    try {
      spec.base.n_th = thermal_occupation(ghz * 1e9, kelvin);
    } catch (const InvalidParameter& e) {
      rd.fail(e.what(), "thermal");
    }
  }
  spec.trajectory = TrajectoryConfig::defaults_for(spec.base);
  if (root.contains("trajectory")) {
    spec.trajectory = read_trajectory(root.at("trajectory"), rd, spec.trajectory);
  }
  if (root.contains("axes")) {
    const json& axes = root.at("axes");
    if (!axes.is_array()) rd.fail("\"axes\" must be an array", "axes");
    for (const json& a : axes) spec.axes.push_back(read_axis(a, rd));
  }
  const std::string solver = rd.string(root, "solver", "deterministic");
  if (solver == "deterministic") {
    spec.solver = SolverKind::deterministic;
  } else if (solver == "trajectory") {
    spec.solver = SolverKind::trajectory;
  } else {
    rd.fail("solver must be \"deterministic\" or \"trajectory\"", "solver");
  }
  if (root.contains("cutoff")) {
    const json& c = root.at("cutoff");
    if (c.is_string() && c.get<std::string>() == "auto") {
      spec.cutoff.automatic = true;
    } else if (c.is_number_integer()) {
      spec.cutoff.automatic = false;
      spec.cutoff.fixed = c.get<int>();
      spec.base.n_max = spec.cutoff.fixed;
    } else {
      rd.fail("cutoff must be \"auto\" or an integer", "cutoff");
    }
  }
  spec.cutoff.g2_tol = rd.number(root, "g2_tol", spec.cutoff.g2_tol);
  cfg.classify.blockade_threshold =
      rd.number(root, "blockade_threshold", cfg.classify.blockade_threshold);

  try {
    spec.base.validate();
    spec.trajectory.validate();
    for (const Axis& a : spec.axes) a.validate();
    if (spec.axes.size() > 2) throw InvalidParameter("at most two sweep axes are supported");
    if (!(spec.cutoff.g2_tol > 0.0)) throw InvalidParameter("g2_tol must be > 0");
  } catch (const Error& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const SystemParams& defaults) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path, defaults);
}

void apply_override(SystemParams& p, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like name=value: " + std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  json obj;
  try {
    obj[key] = json::parse(value);
  } catch (const json::parse_error&) {
    throw ConfigError("override value is not a number: " + std::string(assignment));
  }
  const std::string text = obj.dump();
  p = read_system(obj, Reader(text), p);
}

json to_json(const SystemParams& p) {
  return json{{"delta_q", p.delta_q},         {"delta_m", p.delta_m},   {"g_qm", p.g_qm},
              {"omega_drive", p.omega_drive}, {"xi_probe", p.xi_probe}, {"kappa_m", p.kappa_m},
              {"kappa_q", p.kappa_q},         {"n_th", p.n_th},         {"n_max", p.n_max}};
}

json to_json(const TrajectoryConfig& cfg) {
  return json{{"n_trajectories", cfg.n_trajectories},
              {"t_burn_in", cfg.t_burn_in},
              {"t_sample", cfg.t_sample},
              {"sample_interval", cfg.sample_interval},
              {"seed", cfg.rng_seed},
              {"dt_max", cfg.dt_max},
              {"bootstrap_resamples", cfg.bootstrap_resamples}};
}

json to_json(const Axis& axis) {
  return json{{"param", std::string(axis_name(axis.param))},
              {"min", axis.min},
              {"max", axis.max},
              {"count", axis.count},
              {"spacing", axis.spacing == Spacing::linear ? "linear" : "log"}};
}

json to_json(const SweepSpec& spec) {
  json axes = json::array();
  for (const Axis& a : spec.axes) axes.push_back(to_json(a));
  json j{{"system", to_json(spec.base)},
         {"axes", axes},
         {"solver", spec.solver == SolverKind::deterministic ? "deterministic" : "trajectory"},
         {"g2_tol", spec.cutoff.g2_tol},
         {"trajectory", to_json(spec.trajectory)}};
  if (spec.cutoff.automatic) {
    j["cutoff"] = "auto";
  } else {
    // A fixed cutoff overrides the base cutoff at every point.
    j["cutoff"] = spec.cutoff.fixed;
    j["system"]["n_max"] = spec.cutoff.fixed;
  }
  return j;
}

std::string canonical_json(const SweepSpec& spec) { return to_json(spec).dump(); }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace magblock
