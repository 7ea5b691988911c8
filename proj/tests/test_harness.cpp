#include <doctest.h>

#include <cmath>

#include "frnav/episode.hpp"
#include "frnav/json_io.hpp"
#include "frnav/render.hpp"
#include "frnav/scene.hpp"

using namespace frnav;

TEST_SUITE_BEGIN("harness");

TEST_CASE("scene generation counts and determinism") {
  const Scene a = generate_scene(0.6, 7);
  CHECK(a.obstacles.size() == 15);
  const Scene b = generate_scene(0.6, 7);
  REQUIRE(a.obstacles.size() == b.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    CHECK(a.obstacles[i].center.x() == b.obstacles[i].center.x());
    CHECK(a.obstacles[i].center.y() == b.obstacles[i].center.y());
  }
  CHECK(generate_scene(1.2, 3).obstacles.size() == 30);
}

TEST_CASE("accepted scenes pass the connectivity oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scene s = generate_scene(1.0, seed);
    CHECK(grid_path_exists(s, 0.05));
    const double clearance = 0.3 + s.robot.circumradius() + 0.1;
    for (const Obstacle& o : s.obstacles) {
      CHECK((o.center - s.start.position).norm() >= clearance - 1e-12);
      CHECK((o.center - s.goal).norm() >= clearance - 1e-12);
    }
  }
}

TEST_CASE("scene json round trip preserves the scene") {
  const Scene a = generate_scene(0.8, 11);
  const nlohmann::ordered_json j = scene_to_json(a);
  // Field order is part of the format.
  auto it = j.begin();
  CHECK(it.key() == "workspace");
  ++it;
  CHECK(it.key() == "obstacles");
  ++it;
  CHECK(it.key() == "start");
  ++it;
  CHECK(it.key() == "goal");
  ++it;
  CHECK(it.key() == "robot");
  ++it;
  CHECK(it.key() == "seed");

  const Scene b = scene_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(b.obstacles.size() == a.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    CHECK(b.obstacles[i].center.x() == doctest::Approx(a.obstacles[i].center.x()));
  }
  CHECK(b.goal.x() == doctest::Approx(a.goal.x()));
  CHECK(b.seed == a.seed);
}

TEST_CASE("empty scene: straight-shot episode") {
  Scene s;
  s.width = 5.0;
  s.height = 5.0;
  s.start = Pose{Vec2(0.5, 0.5), M_PI / 4};
  s.goal = Vec2(4.5, 4.5);
  s.seed = 0;

  PipelineConfig cfg;
  const EpisodeResult res = run_episode(s, cfg);
  CHECK(res.completed);
  CHECK(!res.collided);
  const double ls = res.path_length / res.straight_line;
  CHECK(ls >= 1.0 - 1e-9);
  CHECK(ls <= 1.05);
}

TEST_CASE("episode on a light scene completes without oracle collisions") {
  const Scene s = generate_scene(0.6, 21);
  PipelineConfig cfg;
  const EpisodeResult res = run_episode(s, cfg);
  CHECK(res.completed);
  CHECK(!res.collided);
  CHECK(res.path_length >= res.straight_line - 1e-6);
}

TEST_CASE("episode determinism excluding timings") {
  const Scene s = generate_scene(0.8, 5);
  PipelineConfig cfg;
  EpisodeResult a = run_episode(s, cfg);
  EpisodeResult b = run_episode(s, cfg);
  a.log.erase("timings");
  b.log.erase("timings");
  CHECK(a.log.dump() == b.log.dump());
  CHECK(a.completed == b.completed);
  CHECK(a.collided == b.collided);
  CHECK(a.path_length == b.path_length);
}

TEST_CASE("metric definitions") {
  EpisodeResult done;
  done.completed = true;
  done.collided = false;
  done.path_length = 4.0;
  done.straight_line = 4.0;
  SUBCASE("single straight completed trial") {
    const MetricsRow row = compute_metrics(1.0, "full", {done});
    CHECK(row.length_scale == doctest::Approx(1.0));
    CHECK(row.complete_rate == doctest::Approx(1.0));
    CHECK(row.collision_free_rate == doctest::Approx(1.0));
  }
  SUBCASE("mixed outcomes") {
    EpisodeResult failed;
    failed.completed = false;
    failed.collided = true;
    failed.path_length = 1.0;
    failed.straight_line = 4.0;
    const MetricsRow row = compute_metrics(1.0, "full", {done, failed});
    CHECK(row.complete_rate == doctest::Approx(0.5));
    CHECK(row.collision_free_rate == doctest::Approx(0.5));
    CHECK(row.length_scale == doctest::Approx(1.0));  // completed trials only
  }
  SUBCASE("no completion yields N/A length scale") {
    EpisodeResult failed;
    failed.completed = false;
    failed.collided = false;
    failed.straight_line = 4.0;
    const MetricsRow row = compute_metrics(1.0, "full", {failed});
    CHECK(!std::isfinite(row.length_scale));
    const std::string csv = metrics_to_csv({row});
    CHECK(csv.find("N/A") != std::string::npos);
  }
}

TEST_CASE("svg rendering basics") {
  Scene s;
  s.width = 5.0;
  s.height = 5.0;
  s.start = Pose{Vec2(0.5, 0.5), M_PI / 4};
  s.goal = Vec2(4.5, 4.5);
  PipelineConfig cfg;
  const EpisodeResult res = run_episode(s, cfg);
  const std::string svg = render_svg(res.log);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("class=\"traj\"") != std::string::npos);
  CHECK(svg.find("class=\"region\"") != std::string::npos);
  CHECK(render_svg(res.log) == svg);  // deterministic
}

TEST_CASE("ablation variants wire the flags") {
  PipelineConfig base;
  CHECK(apply_variant(base, "full").no_direction_aware == false);
  CHECK(apply_variant(base, "no-direction-aware").no_direction_aware == true);
  CHECK(apply_variant(base, "no-continuous-safety").no_continuous_safety == true);
  CHECK_THROWS(apply_variant(base, "bogus"));
}

TEST_SUITE_END();
