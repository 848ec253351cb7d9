#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hlob/run_config.hpp"

namespace hlob::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNonConvergence = 3,
  kAborted = 4,
};

/// Run parameters as given on the command line. Unset values fall back to
/// the config file, then to the preset.
struct RunFlags {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config;
  std::optional<double> horizon;
  std::optional<double> warmup;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

RunConfig resolve(const RunFlags& flags, std::optional<Variant> variant = std::nullopt);

int simulate(const RunFlags& flags, bool snapshots);
int fit(const std::filesystem::path& stream, const std::string& structure,
        const std::filesystem::path& out);
int reconstruct(const std::filesystem::path& snapshots, const std::filesystem::path& out);
int analyze(const std::vector<std::filesystem::path>& runs, const std::string& pairing,
            const std::filesystem::path& out);
int compare(const RunFlags& flags, const std::vector<std::string>& variants);

}  // namespace hlob::cli
