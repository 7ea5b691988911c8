#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "frnav/geometry.hpp"
#include "frnav/perception.hpp"
#include "frnav/trajectory.hpp"

namespace frnav {

struct GraphNode {
  int id{0};
  Pose pose;
  ConvexRegion region;   // local free region generated at this pose
  PointCloud scan;       // cloud the region was generated from
  int parent_edge{-1};   // executed edge that created this node, -1 at root
  bool expanded{false};
};

enum class EdgeStatus { untried, certified, invalid, executed };

struct FrontierEdge {
  int id{0};
  int source{0};
  UnitDirection direction{Vec2{1.0, 0.0}};
  Pose target;
  double progress{0.0};
  EdgeStatus status{EdgeStatus::untried};
  ConvexRegion region;  // region the candidate motion lives in
  std::optional<PoseTrajectory> trajectory;
  std::optional<SafetyCertificate> certificate;
};

struct ExpansionCandidate {
  UnitDirection direction;
  ConvexRegion region;
  Pose target;
  double progress{0.0};
};

/// Tree of visited poses with lazily evaluated frontier edges. Single
/// writer: one planning loop owns the graph.
class NavGraph {
 public:
  NavGraph(const Pose& start, ConvexRegion start_region, PointCloud start_scan,
           const Vec2& goal, double goal_tolerance);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<FrontierEdge>& edges() const { return edges_; }
  GraphNode& node(int id) { return nodes_[id]; }
  const GraphNode& node(int id) const { return nodes_[id]; }
  const FrontierEdge& edge(int id) const { return edges_[id]; }
  int current() const { return current_; }
  const Vec2& goal() const { return goal_; }
  double goal_tolerance() const { return goal_tolerance_; }

  /// Creates one untried edge per candidate unless its target nearly
  /// duplicates an existing node (within 0.1 m and 10 degrees). When the
  /// goal admits a feasible body placement inside a candidate's region
  /// (some sampled yaw with worst violation <= 0), that candidate's target
  /// is overridden with the goal pose. Returns new edge ids.
  std::vector<int> expand_node(int node_id,
                               std::vector<ExpansionCandidate> candidates,
                               const ConvexBody& body, int n_yaw);

  /// Untried edge whose target is closest to the goal, lowest id on ties.
  std::optional<int> select_frontier_edge() const;

  /// Marks the edge executed, adds the reached node (with its fresh region
  /// and scan) and moves the current node there. Returns the new node id.
  int commit(int edge_id, PoseTrajectory traj, SafetyCertificate cert,
             ConvexRegion new_region, PointCloud new_scan);

  /// Marks the edge invalid; invalid edges are never reselected.
  void invalidate(int edge_id);

  /// Executed-edge hops from one node to another along the tree:
  /// (edge id, reversed). Reversed hops replay the stored trajectory
  /// backwards.
  std::vector<std::pair<int, bool>> tree_path(int from_node, int to_node) const;

 private:
  std::vector<GraphNode> nodes_;
  std::vector<FrontierEdge> edges_;
  int current_{0};
  Vec2 goal_;
  double goal_tolerance_;
};

}  // namespace frnav
