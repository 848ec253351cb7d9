#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "hlob/agents.hpp"

namespace hlob {

/// Everything needed to reproduce one simulation run.
///
/// Config files are flat `key = value` lines with `#` comments. Top-level
/// keys apply first, then the section named after the selected variant
/// (e.g. `[MM+LL+LM]`); command-line flags are applied last by the caller.
/// A `[result]` section is ignored so manifests load back as configs.
///
/// Keys: preset, mu0, lambda0, alpha_mm, beta_mm, alpha_lm, beta_lm,
/// alpha_ll, beta_ll (alpha_* = none removes that kernel), m_p1, nu_p1,
/// s_p1, m_v1, m_v2, lambda_c, delta, cancellation (thinning|single),
/// horizon, warmup, seed, initial_mid, seed_levels, out.
struct RunConfig {
  std::string variant{"HP"};
  SimulationConfig sim;
  std::filesystem::path out{"out"};

  static RunConfig preset(Variant v);
  /// Throws std::invalid_argument for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  void validate() const { sim.validate(); }
};

/// `preset` overrides any preset named in the file.
RunConfig load_config(std::istream& is, std::optional<Variant> preset = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<Variant> preset = std::nullopt);

/// Writes the fully resolved parameter set as config lines.
void write_config(std::ostream& os, const RunConfig& config);

}  // namespace hlob
