#include "frnav/json_io.hpp"

#include <fstream>
#include <sstream>

namespace frnav {

nlohmann::ordered_json scene_to_json(const Scene& scene) {
  nlohmann::ordered_json j;
  j["workspace"] = {scene.width, scene.height};
  j["obstacles"] = nlohmann::ordered_json::array();
  for (const Obstacle& o : scene.obstacles) {
    j["obstacles"].push_back({{"x", o.center.x()}, {"y", o.center.y()}, {"r", o.radius}});
  }
  j["start"] = {{"x", scene.start.position.x()},
                {"y", scene.start.position.y()},
                {"theta", scene.start.heading}};
  j["goal"] = {{"x", scene.goal.x()}, {"y", scene.goal.y()}};
  nlohmann::ordered_json verts = nlohmann::ordered_json::array();
  for (const Vec2& v : scene.robot.vertices()) {
    verts.push_back({v.x(), v.y()});
  }
  j["robot"] = {{"vertices", verts}};
  j["seed"] = scene.seed;
  return j;
}

Scene scene_from_json(const nlohmann::json& j) {
  Scene scene;
  scene.width = j.at("workspace").at(0).get<double>();
  scene.height = j.at("workspace").at(1).get<double>();
  scene.obstacles.clear();
  for (const auto& o : j.at("obstacles")) {
    scene.obstacles.push_back(Obstacle{
        Vec2(o.at("x").get<double>(), o.at("y").get<double>()),
        o.at("r").get<double>()});
  }
  scene.start = Pose{Vec2(j.at("start").at("x").get<double>(),
                          j.at("start").at("y").get<double>()),
                     j.at("start").at("theta").get<double>()};
  scene.goal = Vec2(j.at("goal").at("x").get<double>(), j.at("goal").at("y").get<double>());
  std::vector<Vec2> verts;
  for (const auto& v : j.at("robot").at("vertices")) {
    verts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  }
  scene.robot = ConvexBody(std::move(verts));
  scene.seed = j.value("seed", std::uint64_t{0});
  return scene;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace frnav
