#include "frnav/episode.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "frnav/json_io.hpp"
#include "frnav/perception.hpp"

namespace frnav {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

// Pull every hyperplane toward the pose by up to `margin` (distance units),
// clamped so the pose keeps `keep` slack. Compensates for the unsampled
// surface between scan beams: the executed trajectory then clears the raw
// boundary by at least the shift.
ConvexRegion tighten_region(const ConvexRegion& region, const ConvexBody& body,
                            const Pose& pose, double margin, double keep) {
  ConvexRegion out = region;
  const ViolationResult v = halfspace_violation(region, body, pose);
  for (int k = 0; k < region.size(); ++k) {
    const double norm = region.halfspaces[k].normal.norm();
    const double slack_dist = -v.per_halfspace[k] / norm;
    const double shift = std::min(margin, std::max(0.0, slack_dist - keep));
    out.halfspaces[k].offset -= shift * norm;
  }
  return out;
}

UnitDirection direction_to(const Vec2& from, const Vec2& to, double heading) {
  const Vec2 d = to - from;
  if (d.norm() > 1e-9) {
    return UnitDirection(d);
  }
  return UnitDirection::from_angle(heading);
}

// Scanned walls bound the region only within sensor range; the declared
// workspace rectangle covers the never-observed space beyond. Keeps targets
// (and therefore scan poses) inside the workspace.
void clamp_to_workspace(ConvexRegion& region, const Scene& scene) {
  region.halfspaces.push_back(Halfspace{Vec2(1.0, 0.0), scene.width});
  region.halfspaces.push_back(Halfspace{Vec2(-1.0, 0.0), 0.0});
  region.halfspaces.push_back(Halfspace{Vec2(0.0, 1.0), scene.height});
  region.halfspaces.push_back(Halfspace{Vec2(0.0, -1.0), 0.0});
}

const char* status_name(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::untried: return "untried";
    case EdgeStatus::certified: return "certified";
    case EdgeStatus::invalid: return "invalid";
    case EdgeStatus::executed: return "executed";
  }
  return "untried";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::safe: return "safe";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

nlohmann::ordered_json region_to_json(const ConvexRegion& region) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Halfspace& h : region.halfspaces) {
    rows.push_back({h.normal.x(), h.normal.y(), h.offset});
  }
  return rows;
}

nlohmann::ordered_json traj_to_json(const PoseTrajectory& traj) {
  nlohmann::ordered_json j;
  j["degree"] = traj.position.degree();
  nlohmann::ordered_json pos = nlohmann::ordered_json::array();
  for (int i = 0; i < traj.position.control_points().rows(); ++i) {
    pos.push_back({traj.position.control_points()(i, 0),
                   traj.position.control_points()(i, 1)});
  }
  j["position"] = pos;
  nlohmann::ordered_json yaw = nlohmann::ordered_json::array();
  for (int i = 0; i < traj.yaw.control_points().rows(); ++i) {
    yaw.push_back(traj.yaw.control_points()(i, 0));
  }
  j["yaw"] = yaw;
  return j;
}

struct ExecutedMotion {
  int edge_id;
  bool reversed;
};

}  // namespace

PipelineConfig apply_variant(PipelineConfig cfg, const std::string& variant) {
  if (variant == "full") {
    return cfg;
  }
  if (variant == "no-direction-aware") {
    cfg.no_direction_aware = true;
    return cfg;
  }
  if (variant == "no-continuous-safety") {
    cfg.no_continuous_safety = true;
    return cfg;
  }
  throw std::invalid_argument("unknown variant: " + variant);
}

std::uint64_t bench_scene_seed(std::uint64_t seed, int density_index,
                               int scenario, int trial) {
  std::uint64_t h = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (static_cast<std::uint64_t>(density_index) + 1));
  h = mix64(h ^ ((static_cast<std::uint64_t>(scenario) + 1) << 8));
  h = mix64(h ^ ((static_cast<std::uint64_t>(trial) + 1) << 16));
  return h;
}

EpisodeResult run_episode(const Scene& scene, const PipelineConfig& cfg) {
  EpisodeResult res;
  res.straight_line = (scene.goal - scene.start.position).norm();

  RegionGenConfig rcfg = cfg.region;
  rcfg.sensor_range = cfg.max_range;
  rcfg.beam_step = 2.0 * M_PI / cfg.n_beams;
  if (cfg.no_direction_aware) {
    rcfg.lambda = 1.0;
    rcfg.direction_aware_selection = false;
  }
  const ConvexBody& robot = scene.robot;

  // Scan plus goal-facing region for a new node. Falls back to the bare
  // sensor box when generation fails at the node pose.
  auto observe = [&](const Pose& pose, ScanResult& scan, ConvexRegion& region) {
    scan = simulate_scan(scene, pose, cfg.n_beams, cfg.max_range);
    const UnitDirection to_goal = direction_to(pose.position, scene.goal, pose.heading);
    const Clock::time_point t0 = Clock::now();
    RegionResult rr = generate_region(scan.cloud, pose.position, pose.heading,
                                      robot, to_goal, rcfg);
    res.timings.region_ms += ms_since(t0);
    res.timings.region_calls += 1;
    if (rr.status == RegionStatus::ok) {
      clamp_to_workspace(rr.region, scene);
      region = tighten_region(rr.region, robot, pose, cfg.exec_margin,
                              cfg.exec_margin_keep);
    } else {
      const double box = rcfg.sensor_range + rcfg.sensor_box_margin;
      region.halfspaces = {
          Halfspace{Vec2(1.0, 0.0), pose.position.x() + box},
          Halfspace{Vec2(-1.0, 0.0), -(pose.position.x() - box)},
          Halfspace{Vec2(0.0, 1.0), pose.position.y() + box},
          Halfspace{Vec2(0.0, -1.0), -(pose.position.y() - box)},
      };
      clamp_to_workspace(region, scene);
    }
  };

  ScanResult scan0;
  ConvexRegion region0;
  observe(scene.start, scan0, region0);

  NavGraph graph(scene.start, std::move(region0), scan0.cloud, scene.goal,
                 cfg.goal_tolerance);
  std::vector<RangeMap> node_maps{scan0.map};
  std::vector<ExecutedMotion> executed;

  res.completed =
      (scene.start.position - scene.goal).norm() <= cfg.goal_tolerance;
  bool aborted = false;

  while (!res.completed && !aborted && res.steps < cfg.step_budget) {
    const int cur = graph.current();

    if (!graph.node(cur).expanded) {
      const GraphNode& node = graph.node(cur);
      const RangeMap& map = node_maps[cur];
      // No circumradius admission here: a gap that looks too narrow at its
      // near bound can still be traversable deeper in, and the region plus
      // target-pose machinery is the actual feasibility gate.
      const std::vector<Gap> gaps =
          extract_gaps(map, cfg.depth_jump, cfg.min_gap_width);
      const UnitDirection goal_dir =
          direction_to(node.pose.position, scene.goal, node.pose.heading);
      const std::vector<UnitDirection> dirs =
          gaps_to_directions(gaps, map, goal_dir, cfg.max_directions);

      std::vector<ExpansionCandidate> candidates;
      for (const UnitDirection& dir : dirs) {
        const Clock::time_point t0 = Clock::now();
        RegionResult rr = generate_region(node.scan, node.pose.position,
                                          node.pose.heading, robot, dir, rcfg);
        res.timings.region_ms += ms_since(t0);
        res.timings.region_calls += 1;
        if (rr.status != RegionStatus::ok) continue;
        clamp_to_workspace(rr.region, scene);
        ConvexRegion tight = tighten_region(rr.region, robot, node.pose,
                                            cfg.exec_margin, cfg.exec_margin_keep);

        const Clock::time_point t1 = Clock::now();
        const TargetResult target =
            select_target_pose(tight, robot, dir, node.pose, cfg.n_yaw);
        res.timings.target_ms += ms_since(t1);
        res.timings.target_calls += 1;
        if (!target.found) continue;
        candidates.push_back(ExpansionCandidate{dir, std::move(tight),
                                                target.pose, target.progress});
      }
      graph.expand_node(cur, std::move(candidates), robot, cfg.n_yaw);
    }

    const std::optional<int> eid = graph.select_frontier_edge();
    if (!eid) break;  // frontier exhausted
    const int edge_id = *eid;
    const Pose src_pose = graph.node(graph.edge(edge_id).source).pose;
    const Pose target_pose = graph.edge(edge_id).target;

    const Clock::time_point t0 = Clock::now();
    GenerateResult gen;
    if (cfg.no_continuous_safety) {
      // Ablation: straight initialization plus a fixed-grid static check,
      // accepted or rejected with no refinement.
      PoseTrajectory traj = init_trajectory(src_pose, target_pose, cfg.degree);
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < cfg.static_check_samples; ++i) {
        const double t = static_cast<double>(i) / (cfg.static_check_samples - 1);
        worst = std::max(
            worst, violation(traj, graph.edge(edge_id).region, robot, t).worst);
      }
      if (worst <= 0.0) {
        gen.status = GenStatus::ok;
        gen.trajectory = std::move(traj);
        SafetyCertificate cert;
        cert.verdict = Verdict::safe;
        cert.margin = worst;
        gen.certificate = cert;
      } else {
        gen.status = GenStatus::stalled;
      }
    } else {
      gen = generate_safe_to(graph.edge(edge_id).region, robot, target_pose,
                             src_pose, cfg.refine, cfg.degree);
    }
    res.timings.traj_ms += ms_since(t0);
    res.timings.traj_calls += 1;
    res.steps += 1;

    if (!gen.ok()) {
      graph.invalidate(edge_id);
      continue;
    }

    // Reverse-replay along the tree to the edge source, then the new edge.
    for (const auto& [hop_edge, rev] :
         graph.tree_path(graph.current(), graph.edge(edge_id).source)) {
      executed.push_back(ExecutedMotion{hop_edge, rev});
    }
    executed.push_back(ExecutedMotion{edge_id, false});

    ScanResult scan2;
    ConvexRegion region2;
    try {
      observe(target_pose, scan2, region2);
    } catch (const PoseInsideObstacle&) {
      // Should be excluded by construction; treated as a failed episode.
      graph.commit(edge_id, std::move(*gen.trajectory), *gen.certificate,
                   ConvexRegion{}, PointCloud{});
      node_maps.push_back(RangeMap{});
      aborted = true;
      break;
    }
    graph.commit(edge_id, std::move(*gen.trajectory), *gen.certificate,
                 std::move(region2), scan2.cloud);
    node_maps.push_back(scan2.map);

    if ((target_pose.position - scene.goal).norm() <= cfg.goal_tolerance) {
      res.completed = true;
    }
  }

  // Independent collision oracle plus executed path length: dense parameter
  // sampling of every executed trajectory against the true obstacle discs.
  double worst_pen = -std::numeric_limits<double>::infinity();
  const int samples = static_cast<int>(std::lround(1.0 / cfg.oracle_dt));
  for (const ExecutedMotion& motion : executed) {
    const PoseTrajectory& stored = *graph.edge(motion.edge_id).trajectory;
    const PoseTrajectory traj = motion.reversed ? stored.reversed() : stored;
    Vec2 prev = traj.pose_at(0.0).position;
    for (int i = 0; i <= samples; ++i) {
      const double t = static_cast<double>(i) / samples;
      const Pose pose = traj.pose_at(t);
      res.path_length += (pose.position - prev).norm();
      prev = pose.position;
      for (const Obstacle& obs : scene.obstacles) {
        const double pen =
            polygon_circle_penetration(robot, pose, obs.center, obs.radius);
        worst_pen = std::max(worst_pen, pen);
        if (pen > 0.0) {
          res.collided = true;
        }
      }
    }
  }
  res.min_clearance = scene.obstacles.empty() || executed.empty()
                          ? std::numeric_limits<double>::infinity()
                          : -worst_pen;

  // Episode log.
  nlohmann::ordered_json log;
  log["version"] = 1;
  log["scene"] = scene_to_json(scene);
  log["variant"] = cfg.no_direction_aware   ? "no-direction-aware"
                   : cfg.no_continuous_safety ? "no-continuous-safety"
                                              : "full";
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const GraphNode& node : graph.nodes()) {
    nlohmann::ordered_json nj;
    nj["id"] = node.id;
    nj["pose"] = {round4(node.pose.position.x()), round4(node.pose.position.y()),
                  round4(node.pose.heading)};
    nj["region"] = region_to_json(node.region);
    if (cfg.log_scans) {
      nlohmann::ordered_json pts = nlohmann::ordered_json::array();
      for (const Vec2& p : node.scan.points) {
        pts.push_back({round4(p.x()), round4(p.y())});
      }
      nj["scan"] = pts;
    } else {
      nj["scan_points"] = node.scan.size();
    }
    nodes.push_back(std::move(nj));
  }
  log["nodes"] = nodes;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const FrontierEdge& edge : graph.edges()) {
    nlohmann::ordered_json ej;
    ej["id"] = edge.id;
    ej["source"] = edge.source;
    ej["direction"] = {round4(edge.direction.x()), round4(edge.direction.y())};
    ej["target"] = {round4(edge.target.position.x()),
                    round4(edge.target.position.y()), round4(edge.target.heading)};
    ej["progress"] = round4(edge.progress);
    ej["status"] = status_name(edge.status);
    ej["region"] = region_to_json(edge.region);
    if (edge.trajectory) {
      ej["trajectory"] = traj_to_json(*edge.trajectory);
    }
    if (edge.certificate) {
      ej["certificate"] = {{"verdict", verdict_name(edge.certificate->verdict)},
                           {"margin", edge.certificate->margin},
                           {"intervals", edge.certificate->intervals_examined}};
    }
    edges.push_back(std::move(ej));
  }
  log["edges"] = edges;
  nlohmann::ordered_json exec = nlohmann::ordered_json::array();
  for (const ExecutedMotion& m : executed) {
    exec.push_back({{"edge", m.edge_id}, {"reversed", m.reversed}});
  }
  log["executed"] = exec;
  log["result"] = {{"completed", res.completed},
                   {"collided", res.collided},
                   {"path_length", round4(res.path_length)},
                   {"straight_line", round4(res.straight_line)},
                   {"steps", res.steps},
                   {"min_clearance",
                    std::isfinite(res.min_clearance) ? round4(res.min_clearance)
                                                     : 999.0}};
  log["timings"] = {{"region_ms", res.timings.region_ms},
                    {"region_calls", res.timings.region_calls},
                    {"target_ms", res.timings.target_ms},
                    {"target_calls", res.timings.target_calls},
                    {"traj_ms", res.timings.traj_ms},
                    {"traj_calls", res.timings.traj_calls}};
  res.log = std::move(log);
  return res;
}

MetricsRow compute_metrics(double density, const std::string& variant,
                           const std::vector<EpisodeResult>& results) {
  if (results.empty()) {
    throw std::invalid_argument("compute_metrics: need at least one result");
  }
  MetricsRow row;
  row.density = density;
  row.variant = variant;
  int completed = 0, clean = 0;
  double ls_sum = 0.0;
  double region_ms = 0.0, target_ms = 0.0, traj_ms = 0.0;
  long region_calls = 0, target_calls = 0, traj_calls = 0;
  for (const EpisodeResult& r : results) {
    if (r.completed) {
      ++completed;
      ls_sum += r.path_length / r.straight_line;
    }
    if (!r.collided) ++clean;
    region_ms += r.timings.region_ms;
    target_ms += r.timings.target_ms;
    traj_ms += r.timings.traj_ms;
    region_calls += r.timings.region_calls;
    target_calls += r.timings.target_calls;
    traj_calls += r.timings.traj_calls;
  }
  row.complete_rate = static_cast<double>(completed) / results.size();
  row.collision_free_rate = static_cast<double>(clean) / results.size();
  row.length_scale = completed > 0
                         ? ls_sum / completed
                         : std::numeric_limits<double>::quiet_NaN();
  row.t_region_ms = region_calls > 0 ? region_ms / region_calls : 0.0;
  row.t_target_ms = target_calls > 0 ? target_ms / target_calls : 0.0;
  row.t_traj_ms = traj_calls > 0 ? traj_ms / traj_calls : 0.0;
  return row;
}

BenchOutcome run_bench(const BenchConfig& cfg) {
  BenchOutcome out;
  for (int di = 0; di < static_cast<int>(cfg.densities.size()); ++di) {
    const double density = cfg.densities[di];
    std::vector<Scene> scenes;
    for (int s = 0; s < cfg.scenarios; ++s) {
      for (int t = 0; t < cfg.trials; ++t) {
        scenes.push_back(
            generate_scene(density, bench_scene_seed(cfg.seed, di, s, t)));
      }
    }
    for (const std::string& variant : cfg.variants) {
      const PipelineConfig pc = apply_variant(cfg.pipeline, variant);
      std::vector<EpisodeResult> results;
      results.reserve(scenes.size());
      for (const Scene& scene : scenes) {
        results.push_back(run_episode(scene, pc));
      }
      out.rows.push_back(compute_metrics(density, variant, results));
      for (EpisodeResult& r : results) {
        out.episodes.push_back(std::move(r));
      }
    }
  }
  return out;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::string csv =
      "density,variant,length_scale,complete_rate,collision_free_rate,"
      "t_region_ms,t_target_ms,t_traj_ms\n";
  char buf[256];
  for (const MetricsRow& r : rows) {
    std::string ls = "N/A";
    if (std::isfinite(r.length_scale)) {
      std::snprintf(buf, sizeof(buf), "%.4f", r.length_scale);
      ls = buf;
    }
    std::snprintf(buf, sizeof(buf), "%.2f,%s,%s,%.2f,%.2f,%.3f,%.3f,%.3f\n",
                  r.density, r.variant.c_str(), ls.c_str(), r.complete_rate,
                  r.collision_free_rate, r.t_region_ms, r.t_target_ms,
                  r.t_traj_ms);
    csv += buf;
  }
  return csv;
}

}  // namespace frnav
