#pragma once

#include "wplap/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wplap {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

/// Tags embedded in every output file.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version{kVersion};

  /// Hash of the canonical (sorted-key) dump of the config.
  static Provenance of(const nlohmann::json& config, std::uint64_t seed);
  nlohmann::json to_json() const;
  /// "# config_hash=... seed=... version=..."
  std::string comment_line() const;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);
/// io when missing or unreadable, config when not valid JSON.
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// "node_id value" rows.
std::string nodal_csv(const DiscreteScalarField& u, const Provenance& prov);
/// "element_id gx gy" rows.
std::string element_csv(const DiscreteVectorField& g, const Provenance& prov);

/// Element vectors from CSV rows "gx gy" or "element_id gx gy" (one per
/// element, '#' comments and a header allowed).
DiscreteVectorField read_element_csv(const MeshPtr& mesh, const std::filesystem::path& path);

}  // namespace wplap
