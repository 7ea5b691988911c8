#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "frnav/scene.hpp"

namespace frnav {

/// scene.json schema (field order fixed):
/// {workspace: [w,h], obstacles: [{x,y,r}], start: {x,y,theta},
///  goal: {x,y}, robot: {vertices: [[x,y],...]}, seed}
nlohmann::ordered_json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace frnav
