#include "frnav/scene.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace frnav {

namespace {

// splitmix64: deterministic across platforms, unlike <random> distributions.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Rng {
  std::uint64_t state;
  double uniform() {  // [0, 1)
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace

bool grid_path_exists(const Scene& scene, double cell) {
  const double inflate = scene.robot.inradius();
  const int nx = static_cast<int>(std::ceil(scene.width / cell));
  const int ny = static_cast<int>(std::ceil(scene.height / cell));
  std::vector<char> blocked(static_cast<std::size_t>(nx) * ny, 0);

  auto at = [&](int ix, int iy) -> char& {
    return blocked[static_cast<std::size_t>(iy) * nx + ix];
  };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Vec2 c((ix + 0.5) * cell, (iy + 0.5) * cell);
      if (c.x() < inflate || c.y() < inflate || c.x() > scene.width - inflate ||
          c.y() > scene.height - inflate) {
        at(ix, iy) = 1;
        continue;
      }
      for (const Obstacle& obs : scene.obstacles) {
        if ((c - obs.center).norm() <= obs.radius + inflate) {
          at(ix, iy) = 1;
          break;
        }
      }
    }
  }

  auto cell_of = [&](const Vec2& p) {
    const int ix = std::clamp(static_cast<int>(p.x() / cell), 0, nx - 1);
    const int iy = std::clamp(static_cast<int>(p.y() / cell), 0, ny - 1);
    return std::pair<int, int>(ix, iy);
  };
  const auto [sx, sy] = cell_of(scene.start.position);
  const auto [gx, gy] = cell_of(scene.goal);
  if (at(sx, sy) || at(gx, gy)) return false;

  std::vector<char> seen(blocked.size(), 0);
  std::queue<std::pair<int, int>> q;
  q.emplace(sx, sy);
  seen[static_cast<std::size_t>(sy) * nx + sx] = 1;
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    const auto [x, y] = q.front();
    q.pop();
    if (x == gx && y == gy) return true;
    for (int k = 0; k < 4; ++k) {
      const int nx2 = x + dx[k];
      const int ny2 = y + dy[k];
      if (nx2 < 0 || ny2 < 0 || nx2 >= nx || ny2 >= ny) continue;
      const std::size_t idx = static_cast<std::size_t>(ny2) * nx + nx2;
      if (seen[idx] || blocked[idx]) continue;
      seen[idx] = 1;
      q.emplace(nx2, ny2);
    }
  }
  return false;
}

Scene generate_scene(double density, std::uint64_t seed, const SceneGenParams& params) {
  if (!(density > 0.0)) {
    throw std::invalid_argument("generate_scene: density must be positive");
  }
  const int n_obs =
      static_cast<int>(std::lround(density * params.width * params.height));

  Scene scene;
  scene.width = params.width;
  scene.height = params.height;
  scene.seed = seed;
  scene.goal = params.goal;
  const Vec2 to_goal = params.goal - params.start;
  scene.start = Pose{params.start, std::atan2(to_goal.y(), to_goal.x())};
  const double clearance =
      params.obstacle_radius + scene.robot.circumradius() + params.clearance_extra;

  for (int attempt = 0; attempt < params.max_redraws; ++attempt) {
    std::uint64_t derived = seed;
    for (int i = 0; i <= attempt; ++i) splitmix64(derived);
    Rng rng{derived};

    scene.obstacles.clear();
    bool ok = true;
    for (int i = 0; i < n_obs && ok; ++i) {
      bool placed = false;
      for (int tries = 0; tries < 10000; ++tries) {
        const double r = params.obstacle_radius;
        const Vec2 c(rng.uniform(r, params.width - r),
                     rng.uniform(r, params.height - r));
        if ((c - params.start).norm() < clearance) continue;
        if ((c - params.goal).norm() < clearance) continue;
        scene.obstacles.push_back(Obstacle{c, r});
        placed = true;
        break;
      }
      ok = placed;
    }
    if (ok && grid_path_exists(scene, params.grid_cell)) {
      return scene;
    }
  }
  throw SceneGenerationExhausted("no feasible scene after max redraws");
}

}  // namespace frnav
