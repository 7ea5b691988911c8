#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "frnav/episode.hpp"
#include "frnav/json_io.hpp"
#include "frnav/render.hpp"
#include "frnav/scene.hpp"

namespace {

void print_rows(const std::vector<frnav::MetricsRow>& rows) {
  std::printf("%-8s %-22s %-12s %-9s %-15s %-12s %-12s %-12s\n", "density",
              "variant", "length_scale", "complete", "collision_free",
              "region_ms", "target_ms", "traj_ms");
  for (const frnav::MetricsRow& r : rows) {
    char ls[32];
    if (std::isfinite(r.length_scale)) {
      std::snprintf(ls, sizeof(ls), "%.4f", r.length_scale);
    } else {
      std::snprintf(ls, sizeof(ls), "N/A");
    }
    std::printf("%-8.2f %-22s %-12s %-9.2f %-15.2f %-12.3f %-12.3f %-12.3f\n",
                r.density, r.variant.c_str(), ls, r.complete_rate,
                r.collision_free_rate, r.t_region_ms, r.t_target_ms, r.t_traj_ms);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direction-aware free-region navigation simulator"};
  app.require_subcommand(1);

  // gen-scene
  double density = 1.0;
  std::uint64_t seed = 1;
  std::string out_path;
  CLI::App* gen = app.add_subcommand("gen-scene", "Generate a random scene");
  gen->add_option("--density", density, "Obstacles per square meter")->required();
  gen->add_option("--seed", seed, "Scene seed")->required();
  gen->add_option("--out", out_path, "Output scene.json")->required();

  // run
  std::string scene_path, episode_out;
  bool no_dir = false, no_cont = false, log_scans = false;
  CLI::App* run = app.add_subcommand("run", "Run one episode on a scene");
  run->add_option("--scene", scene_path, "Input scene.json")->required();
  run->add_option("--out", episode_out, "Output episode.json")->required();
  run->add_flag("--no-direction-aware", no_dir, "Ablation: isotropic regions");
  run->add_flag("--no-continuous-safety", no_cont,
                "Ablation: sampled checking, no refinement");
  run->add_flag("--log-scans", log_scans, "Include point clouds in the log");

  // bench
  std::vector<double> densities{0.6, 0.8, 1.0, 1.2};
  int scenarios = 5, trials = 4;
  std::uint64_t bench_seed = 1;
  std::string metrics_out;
  std::vector<std::string> variants{"full"};
  CLI::App* bench = app.add_subcommand("bench", "Density-sweep benchmark");
  bench->add_option("--densities", densities, "Obstacle densities")->delimiter(',');
  bench->add_option("--scenarios", scenarios, "Scenarios per density");
  bench->add_option("--trials", trials, "Trials per scenario");
  bench->add_option("--seed", bench_seed, "Benchmark seed");
  bench->add_option("--variants", variants,
                    "Pipeline variants: full, no-direction-aware, "
                    "no-continuous-safety")
      ->delimiter(',');
  bench->add_option("--out", metrics_out, "Output metrics.csv")->required();

  // render
  std::string episode_path, svg_out;
  CLI::App* render = app.add_subcommand("render", "Render an episode to SVG");
  render->add_option("--episode", episode_path, "Input episode.json")->required();
  render->add_option("--out", svg_out, "Output plot.svg")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const frnav::Scene scene = frnav::generate_scene(density, seed);
      frnav::write_text_file(out_path, frnav::scene_to_json(scene).dump(2) + "\n");
      std::printf("wrote %s (%zu obstacles)\n", out_path.c_str(),
                  scene.obstacles.size());
    } else if (run->parsed()) {
      const frnav::Scene scene = frnav::scene_from_json(
          nlohmann::json::parse(frnav::read_text_file(scene_path)));
      frnav::PipelineConfig cfg;
      cfg.no_direction_aware = no_dir;
      cfg.no_continuous_safety = no_cont;
      cfg.log_scans = log_scans;
      const frnav::EpisodeResult res = frnav::run_episode(scene, cfg);
      frnav::write_text_file(episode_out, res.log.dump(2) + "\n");
      std::printf("completed=%d collided=%d steps=%d path=%.3f straight=%.3f\n",
                  res.completed ? 1 : 0, res.collided ? 1 : 0, res.steps,
                  res.path_length, res.straight_line);
    } else if (bench->parsed()) {
      frnav::BenchConfig cfg;
      cfg.densities = densities;
      cfg.scenarios = scenarios;
      cfg.trials = trials;
      cfg.seed = bench_seed;
      cfg.variants = variants;
      const frnav::BenchOutcome outcome = frnav::run_bench(cfg);
      frnav::write_text_file(metrics_out, frnav::metrics_to_csv(outcome.rows));
      print_rows(outcome.rows);
      std::printf("wrote %s\n", metrics_out.c_str());
    } else if (render->parsed()) {
      const nlohmann::json log =
          nlohmann::json::parse(frnav::read_text_file(episode_path));
      frnav::write_text_file(svg_out, frnav::render_svg(log));
      std::printf("wrote %s\n", svg_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
