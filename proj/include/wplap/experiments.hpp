#pragma once

#include "wplap/analysis.hpp"
#include "wplap/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace wplap {

/// Smooth seeded vector field: a sum of `modes` plane waves per component.
struct RandomFieldSpec {
  int modes = 6;
  double max_frequency = 4.0;
  double amplitude = 1.0;
};
std::function<Vec2(const Vec2&)> random_smooth_field(std::uint64_t seed, const RandomFieldSpec& spec = {});

struct SweepRow {
  std::uint64_t seed = 0;
  int level = 0;  ///< 0 coarse, 1 after one refinement
  double ratio = 0.0;
  bool zero_datum = false;
};

struct SweepSummary {
  double sup_coarse = 0.0;
  double sup_fine = 0.0;
  /// |sup_fine - sup_coarse| / sup_coarse
  double relative_change = 0.0;
  bool finite = true;
};

struct EnergySweepConfig {
  double boundary_eps = 0.2;
  double weight_exponent = 0.1;
  double p = 2.0;
  double h = 0.1;
  int seeds = 50;
  std::uint64_t base_seed = 0;
  int threads = 1;
  int chords = 256;
};

struct EnergySweepResult {
  std::vector<SweepRow> rows;
  SweepSummary summary;
  nlohmann::json to_json() const;
};

/// energy_ratio over seeded smooth data on a corner domain, on a mesh and its
/// uniform refinement, with M = |x|^exponent Id.
EnergySweepResult energy_sweep(const EnergySweepConfig& config);

struct CzSweepConfig {
  double boundary_eps = 0.05;
  double weight_exponent = 0.05;
  double p = 2.0;
  double q = 4.0;
  double h = 0.1;
  int seeds = 20;
  std::uint64_t base_seed = 0;
  int threads = 1;
  int chords = 256;
  /// Hypotheses are tagged satisfied when both eps * q stay at or below this.
  double smallness_threshold = 0.25;
};

struct CzSweepResult {
  std::vector<SweepRow> rows;
  SweepSummary summary;
  double self_test_ratio = 0.0;
  bool weight_small = false;
  bool boundary_small = false;
  bool hypotheses_satisfied = false;
  nlohmann::json to_json() const;
  /// seed,level,ratio,hypotheses
  std::string to_csv() const;
};

CzSweepResult cz_sweep(const CzSweepConfig& config);

}  // namespace wplap
