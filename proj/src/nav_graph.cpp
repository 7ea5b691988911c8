#include "frnav/nav_graph.hpp"

#include <algorithm>
#include <cmath>

namespace frnav {

NavGraph::NavGraph(const Pose& start, ConvexRegion start_region,
                   PointCloud start_scan, const Vec2& goal, double goal_tolerance)
    : goal_(goal), goal_tolerance_(goal_tolerance) {
  GraphNode root;
  root.id = 0;
  root.pose = start;
  root.region = std::move(start_region);
  root.scan = std::move(start_scan);
  nodes_.push_back(std::move(root));
  current_ = 0;
}

std::vector<int> NavGraph::expand_node(int node_id,
                                       std::vector<ExpansionCandidate> candidates,
                                       const ConvexBody& body, int n_yaw) {
  std::vector<int> created;
  const GraphNode& src = nodes_[node_id];

  for (ExpansionCandidate& cand : candidates) {
    // Goal override: when the goal admits a feasible body placement inside
    // the candidate's region, head straight there. Yaw offsets are tried
    // nearest-first around the node's heading.
    for (int rank = 0; rank < n_yaw; ++rank) {
      const int s = (rank + 1) / 2;
      const double sign = (rank % 2 == 1) ? 1.0 : -1.0;
      const double offset = sign * wrap_to_pi(2.0 * M_PI * s / n_yaw);
      const double theta = src.pose.heading + offset;
      const Pose goal_pose{goal_, theta};
      if (halfspace_violation(cand.region, body, goal_pose).worst <= 0.0) {
        cand.target = goal_pose;
        cand.progress = cand.direction.dot(goal_ - src.pose.position);
        break;
      }
    }

    bool duplicate = false;
    for (const GraphNode& node : nodes_) {
      const double dpos = (node.pose.position - cand.target.position).norm();
      const double dth = std::abs(wrap_to_pi(node.pose.heading - cand.target.heading));
      if (dpos <= 0.1 && dth <= 10.0 * M_PI / 180.0) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    FrontierEdge edge;
    edge.id = static_cast<int>(edges_.size());
    edge.source = node_id;
    edge.direction = cand.direction;
    edge.target = cand.target;
    edge.progress = cand.progress;
    edge.status = EdgeStatus::untried;
    edge.region = std::move(cand.region);
    created.push_back(edge.id);
    edges_.push_back(std::move(edge));
  }
  nodes_[node_id].expanded = true;
  return created;
}

std::optional<int> NavGraph::select_frontier_edge() const {
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const FrontierEdge& e : edges_) {
    if (e.status != EdgeStatus::untried) continue;
    const double dist = (e.target.position - goal_).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = e.id;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

int NavGraph::commit(int edge_id, PoseTrajectory traj, SafetyCertificate cert,
                     ConvexRegion new_region, PointCloud new_scan) {
  FrontierEdge& edge = edges_[edge_id];
  edge.status = EdgeStatus::executed;
  edge.trajectory = std::move(traj);
  edge.certificate = std::move(cert);

  GraphNode node;
  node.id = static_cast<int>(nodes_.size());
  node.pose = edge.target;
  node.region = std::move(new_region);
  node.scan = std::move(new_scan);
  node.parent_edge = edge_id;
  nodes_.push_back(std::move(node));
  current_ = nodes_.back().id;
  return current_;
}

void NavGraph::invalidate(int edge_id) {
  edges_[edge_id].status = EdgeStatus::invalid;
}

std::vector<std::pair<int, bool>> NavGraph::tree_path(int from_node,
                                                      int to_node) const {
  auto chain_to_root = [&](int node) {
    std::vector<int> chain{node};
    while (nodes_[chain.back()].parent_edge >= 0) {
      chain.push_back(edges_[nodes_[chain.back()].parent_edge].source);
    }
    return chain;
  };
  const std::vector<int> up = chain_to_root(from_node);
  const std::vector<int> down = chain_to_root(to_node);

  // Lowest common ancestor via membership in the root chains.
  std::vector<char> in_up(nodes_.size(), 0);
  for (int id : up) in_up[id] = 1;
  int lca = to_node;
  for (int id : down) {
    if (in_up[id]) {
      lca = id;
      break;
    }
  }

  std::vector<std::pair<int, bool>> path;
  for (int id : up) {
    if (id == lca) break;
    path.emplace_back(nodes_[id].parent_edge, true);  // reversed replay
  }
  std::vector<std::pair<int, bool>> fwd;
  for (int id : down) {
    if (id == lca) break;
    fwd.emplace_back(nodes_[id].parent_edge, false);
  }
  std::reverse(fwd.begin(), fwd.end());
  path.insert(path.end(), fwd.begin(), fwd.end());
  return path;
}

}  // namespace frnav
