#include "frnav/render.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "frnav/geometry.hpp"
#include "frnav/trajectory.hpp"

namespace frnav {

namespace {

constexpr double kScale = 100.0;  // px per meter

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

ConvexRegion region_from_json(const nlohmann::json& rows) {
  ConvexRegion region;
  for (const auto& r : rows) {
    region.halfspaces.push_back(
        Halfspace{Vec2(r.at(0).get<double>(), r.at(1).get<double>()),
                  r.at(2).get<double>()});
  }
  return region;
}

PoseTrajectory traj_from_json(const nlohmann::json& j) {
  const auto& pos = j.at("position");
  const auto& yaw = j.at("yaw");
  Eigen::MatrixXd p(pos.size(), 2);
  for (int i = 0; i < static_cast<int>(pos.size()); ++i) {
    p(i, 0) = pos.at(i).at(0).get<double>();
    p(i, 1) = pos.at(i).at(1).get<double>();
  }
  Eigen::MatrixXd y(yaw.size(), 1);
  for (int i = 0; i < static_cast<int>(yaw.size()); ++i) {
    y(i, 0) = yaw.at(i).get<double>();
  }
  return PoseTrajectory{BezierCurve(std::move(p)), BezierCurve(std::move(y))};
}

}  // namespace

std::string render_svg(const nlohmann::json& log) {
  const auto& scene = log.at("scene");
  const double w = scene.at("workspace").at(0).get<double>();
  const double h = scene.at("workspace").at(1).get<double>();

  auto sx = [&](double x) { return x * kScale; };
  auto sy = [&](double y) { return (h - y) * kScale; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
         fmt(w * kScale) + " " + fmt(h * kScale) + "\">\n";
  svg += "<style>\n"
         ".workspace{fill:#fff;stroke:#222;stroke-width:2}\n"
         ".obstacle{fill:#9a9a9a;stroke:#666}\n"
         ".region{fill:#3b6fd410;stroke:#3b6fd4;stroke-width:1}\n"
         ".robot{fill:#22222230;stroke:#222;stroke-width:1}\n"
         ".traj{fill:none;stroke:#c03030;stroke-width:2.5}\n"
         ".edge-untried{stroke:#b8b8b8;stroke-width:1;stroke-dasharray:3 3}\n"
         ".edge-certified{stroke:#3aa03a;stroke-width:1.5;stroke-dasharray:5 3}\n"
         ".edge-invalid{stroke:#d07070;stroke-width:1;stroke-dasharray:2 4}\n"
         ".edge-executed{stroke:#2a7e2a;stroke-width:1.5}\n"
         ".goal{fill:none;stroke:#d4a013;stroke-width:2}\n"
         "</style>\n";
  svg += "<rect class=\"workspace\" x=\"0\" y=\"0\" width=\"" + fmt(w * kScale) +
         "\" height=\"" + fmt(h * kScale) + "\"/>\n";

  // Regions below everything else.
  for (const auto& node : log.at("nodes")) {
    const ConvexRegion region = region_from_json(node.at("region"));
    const std::vector<Vec2> poly = region_vertices(region);
    if (poly.size() < 3) continue;
    svg += "<polygon class=\"region\" points=\"";
    for (const Vec2& p : poly) {
      svg += fmt(sx(p.x())) + "," + fmt(sy(p.y())) + " ";
    }
    svg += "\"/>\n";
  }

  for (const auto& obs : scene.at("obstacles")) {
    svg += "<circle class=\"obstacle\" cx=\"" + fmt(sx(obs.at("x").get<double>())) +
           "\" cy=\"" + fmt(sy(obs.at("y").get<double>())) + "\" r=\"" +
           fmt(obs.at("r").get<double>() * kScale) + "\"/>\n";
  }

  // Graph edges as source -> target segments.
  for (const auto& edge : log.at("edges")) {
    const int src = edge.at("source").get<int>();
    const auto& spose = log.at("nodes").at(src).at("pose");
    const auto& tpose = edge.at("target");
    svg += "<line class=\"edge-" + edge.at("status").get<std::string>() +
           "\" x1=\"" + fmt(sx(spose.at(0).get<double>())) + "\" y1=\"" +
           fmt(sy(spose.at(1).get<double>())) + "\" x2=\"" +
           fmt(sx(tpose.at(0).get<double>())) + "\" y2=\"" +
           fmt(sy(tpose.at(1).get<double>())) + "\"/>\n";
  }

  // Executed trajectories sampled densely.
  for (const auto& m : log.at("executed")) {
    const auto& edge = log.at("edges").at(m.at("edge").get<int>());
    if (!edge.contains("trajectory")) continue;
    const PoseTrajectory traj = traj_from_json(edge.at("trajectory"));
    svg += "<polyline class=\"traj\" points=\"";
    for (int i = 0; i <= 64; ++i) {
      const Pose pose = traj.pose_at(static_cast<double>(i) / 64.0);
      svg += fmt(sx(pose.position.x())) + "," + fmt(sy(pose.position.y())) + " ";
    }
    svg += "\"/>\n";
  }

  // Robot footprints at node poses.
  const auto& rverts = scene.at("robot").at("vertices");
  for (const auto& node : log.at("nodes")) {
    const auto& pose = node.at("pose");
    const Mat2 rot = rotation(pose.at(2).get<double>());
    const Vec2 pos(pose.at(0).get<double>(), pose.at(1).get<double>());
    svg += "<polygon class=\"robot\" points=\"";
    for (const auto& v : rverts) {
      const Vec2 world =
          pos + rot * Vec2(v.at(0).get<double>(), v.at(1).get<double>());
      svg += fmt(sx(world.x())) + "," + fmt(sy(world.y())) + " ";
    }
    svg += "\"/>\n";
  }

  const auto& goal = scene.at("goal");
  svg += "<circle class=\"goal\" cx=\"" + fmt(sx(goal.at("x").get<double>())) +
         "\" cy=\"" + fmt(sy(goal.at("y").get<double>())) + "\" r=\"" +
         fmt(0.2 * kScale) + "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace frnav
