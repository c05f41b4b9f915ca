#pragma once

#include "gta/frame.hpp"
#include "gta/geometry.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gta {

struct SceneBox {
  std::string label;
  Aabb box;
  Rgb color{200, 200, 200};
};

/// Analytic scene: axis-aligned boxes standing on a flat floor.
struct SceneSpec {
  std::string name;
  double floor_height = 0.0;
  Vec2 bounds_min = Vec2::Zero();
  Vec2 bounds_max = Vec2::Zero();
  std::vector<SceneBox> boxes;
  Rgb floor_color{150, 140, 120};

  /// Throws ValidationError naming the offending box.
  void validate() const;
  bool in_bounds(const Vec2& p) const;
  /// Planar clearance from `p` to the nearest box footprint (negative inside a box).
  double clearance(const Vec2& p) const;
  /// Nearest hit over all boxes and the floor plane.
  std::optional<double> raycast(const Ray& ray) const;
  /// Which surface the nearest hit belongs to: box index, or -1 for the floor.
  std::optional<std::pair<double, int>> raycast_labeled(const Ray& ray) const;
  /// Distance from `p` to the nearest scene surface (box faces or floor).
  double distance_to_surface(const Vec3& p) const;
};

struct EpisodeSpec {
  std::string id;
  std::string scene_path;  // as written in the episode file
  std::shared_ptr<const SceneSpec> scene;
  AgentState start;
  Vec2 goal = Vec2::Zero();
  std::string instruction;
  double success_radius = 3.0;
  double shortest_path_length = 0.0;
  std::vector<Vec2> reference_path;
  int max_steps = 20;

  /// Throws ValidationError; needs `scene` and the agent radius for free-space checks.
  void validate(double agent_radius) const;
};

struct ControllerConfig {
  double d_max = 3.0;
  double step_size = 0.1;
  double turn_rate = 0.2;  // radians per micro-step
  double agent_radius = 0.18;

  void validate() const;
};

struct SensorConfig {
  CameraIntrinsics intrinsics = CameraIntrinsics::from_hfov(128, 96, kPi / 2);
  CameraRig rig;
  double min_depth = 0.1;
  double max_depth = 10.0;
  double frame_interval = 0.05;  // seconds between rig positions
};

/// Ray-traced RGB-D capture; depth is z-depth, 0 where nothing is hit within max_depth.
RgbdFrame render_rgbd(const SceneSpec& scene, const AgentState& agent, double camera_yaw,
                      const SensorConfig& sensor, double timestamp = 0.0);

/// One frame per rig yaw offset, timestamps start_time + k * frame_interval.
std::vector<RgbdFrame> capture_rotation_scan(const SceneSpec& scene, const AgentState& agent,
                                             const SensorConfig& sensor, double start_time = 0.0);

struct PathPoint {
  double t = 0.0;
  AgentState state;
};

struct ExecutionResult {
  AgentState state;
  bool reached = false;
  std::vector<PathPoint> path;  // every micro-step, excluding the start
};

/// Rotate in place toward the waypoint, then drive straight in micro-steps. A step whose
/// disc would touch a box is not taken and the motion ends with reached = false.
/// Throws HorizonExceededError if the waypoint is farther than d_max.
ExecutionResult execute_waypoint(const SceneSpec& scene, const AgentState& state, const Vec2& waypoint,
                                 const ControllerConfig& config, double start_time = 0.0,
                                 double micro_step_dt = 0.1);

}  // namespace gta
