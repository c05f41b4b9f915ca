#pragma once

#include "gta/geometry.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gta {

inline constexpr const char* kLoopAlert = "CRITICAL: Potential Loop Detected";

struct MemoryConfig {
  double delta_merge = 0.8;  // meters
  int tau_loop = 3;          // alert when visit_count > tau_loop
  double delta_h = 0.3;      // meters

  void validate() const;
};

struct TopoNode {
  int id = 0;
  Vec2 position = Vec2::Zero();
  int visit_count = 1;
  double floor_height = 0.0;
};

enum class VerticalStatus { Level, Upstairs, Downstairs };

const char* to_string(VerticalStatus s);

VerticalStatus vertical_status(double height_now, double height_ref, const MemoryConfig& config);

struct Observation {
  int node = 0;
  bool created = false;
  bool arrived = false;  // current node changed (or bootstrap)
};

/// Sparse memory of visited space. Node positions are fixed at creation; a node's
/// visit count grows each time the agent arrives from a different node.
class TopoGraph {
public:
  Observation observe_pose(const Vec3& pose_xyh, const MemoryConfig& config);

  bool empty() const { return nodes_.empty(); }
  const std::vector<TopoNode>& nodes() const { return nodes_; }
  const TopoNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const TopoNode& current() const;
  int current_id() const { return current_.value(); }
  /// Normalized (lo, hi) pairs.
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int a, int b) const;
  std::vector<int> neighbors(int id) const;

  double height_now() const { return height_now_; }
  double height_prev() const { return height_prev_; }

  /// Text export: see docs/formats.md.
  std::string serialize() const;
  static TopoGraph deserialize(const std::string& text);

  bool operator==(const TopoGraph& other) const;

private:
  std::vector<TopoNode> nodes_;
  std::set<std::pair<int, int>> edges_;
  std::optional<int> current_;
  double height_now_ = 0.0;
  double height_prev_ = 0.0;
};

/// The loop alert when the current node's visit count exceeds tau_loop.
std::optional<std::string> detect_loop(const TopoGraph& graph, const MemoryConfig& config);

/// Deterministic state block for the prompt.
std::string state_summary(const TopoGraph& graph, const MemoryConfig& config);

}  // namespace gta
