#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "frnav/nav_graph.hpp"
#include "frnav/region_gen.hpp"
#include "frnav/scene.hpp"
#include "frnav/trajectory.hpp"

namespace frnav {

/// Knobs for one planning episode. Defaults reproduce the benchmark setup.
struct PipelineConfig {
  int n_beams = 3600;
  double max_range = 5.0;
  double depth_jump = 0.5;
  int max_directions = 6;
  double min_gap_width = 0.05;  // floor; per-gap admission uses circumradius

  RegionGenConfig region;
  RefineConfig refine;
  int degree = 5;
  int n_yaw = 36;

  double goal_tolerance = 0.2;
  int step_budget = 200;

  /// Clearance (m) the executed trajectory keeps to the raw region boundary,
  /// clamped per halfspace so the generation pose stays feasible. Compensates
  /// for the finite angular resolution of the scan between sampled surface
  /// points.
  double exec_margin = 0.015;
  double exec_margin_keep = 0.001;

  // Ablations
  bool no_direction_aware = false;
  bool no_continuous_safety = false;
  int static_check_samples = 50;

  double oracle_dt = 1e-3;  // collision-oracle parameter step

  bool log_scans = false;  // include full point clouds in the episode log
};

struct ModuleTimings {
  double region_ms = 0.0;
  double target_ms = 0.0;
  double traj_ms = 0.0;
  long region_calls = 0;
  long target_calls = 0;
  long traj_calls = 0;
};

struct EpisodeResult {
  bool completed = false;
  bool collided = false;  // independent oracle verdict
  double path_length = 0.0;
  double straight_line = 0.0;
  int steps = 0;
  double min_clearance = 0.0;
  ModuleTimings timings;
  nlohmann::ordered_json log;
};

/// Runs the incremental planning loop on a scene: scan, gaps, directions,
/// per-direction regions, frontier expansion, lazy trajectory generation on
/// the selected edge, kinematic execution. An independent oracle samples
/// every executed trajectory against the true obstacle discs.
EpisodeResult run_episode(const Scene& scene, const PipelineConfig& cfg);

struct BenchConfig {
  std::vector<double> densities{0.6, 0.8, 1.0, 1.2};
  int scenarios = 5;
  int trials = 4;
  std::uint64_t seed = 1;
  std::vector<std::string> variants{"full"};  // full, no-direction-aware,
                                              // no-continuous-safety
  PipelineConfig pipeline;
};

struct MetricsRow {
  double density = 0.0;
  std::string variant;
  double length_scale = 0.0;  // NaN when no trial completed
  double complete_rate = 0.0;
  double collision_free_rate = 0.0;
  double t_region_ms = 0.0;  // mean per call
  double t_target_ms = 0.0;
  double t_traj_ms = 0.0;
};

struct BenchOutcome {
  std::vector<MetricsRow> rows;
  std::vector<EpisodeResult> episodes;  // in run order
};

/// Applies an ablation variant name onto a pipeline config.
PipelineConfig apply_variant(PipelineConfig cfg, const std::string& variant);

/// Scene seed for (base seed, density index, scenario, trial). Trials use
/// distinct scenes: the planner is deterministic, so repeats of one scene
/// would be identical.
std::uint64_t bench_scene_seed(std::uint64_t seed, int density_index,
                               int scenario, int trial);

BenchOutcome run_bench(const BenchConfig& cfg);

/// Aggregates per-density metrics. Length Scale averages completed trials
/// only and is NaN when none completed; rates count all trials.
MetricsRow compute_metrics(double density, const std::string& variant,
                           const std::vector<EpisodeResult>& results);

/// CSV with columns density,variant,length_scale,complete_rate,
/// collision_free_rate,t_region_ms,t_target_ms,t_traj_ms. Rates carry two
/// decimals; length_scale "N/A" when undefined.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);

}  // namespace frnav
