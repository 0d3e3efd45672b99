#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wplap::cli {

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "csv";
  // sharpness only
  std::optional<double> epsilon;
  std::optional<std::string> q_grid;
};

/// Each command returns the list of files it wrote; library errors propagate.
std::vector<std::filesystem::path> cmd_solve(const RunOptions& opts);
std::vector<std::filesystem::path> cmd_oscillation(const RunOptions& opts);
std::vector<std::filesystem::path> cmd_sharpness(const RunOptions& opts);
std::vector<std::filesystem::path> cmd_cz_sweep(const RunOptions& opts);
std::vector<std::filesystem::path> cmd_energy_sweep(const RunOptions& opts);

/// "3,4,5" or "a..b" (step 0.25) or "a..b:step".
std::vector<double> parse_q_grid(const std::string& text);

}  // namespace wplap::cli
