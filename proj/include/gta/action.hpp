#pragma once

#include "gta/bev.hpp"
#include "gta/frame.hpp"
#include "gta/reasoning.hpp"
#include "gta/tsdf.hpp"

#include <array>
#include <optional>
#include <string>

namespace gta {

enum class ViewId { Bev, Ego0, Ego1, Ego2, Ego3 };

const char* to_string(ViewId v);
std::optional<ViewId> parse_view_id(const std::string& s);
/// Index 0..3 for ego views.
int ego_index(ViewId v);

/// Parsed planner decision.
struct SpatialAction {
  enum class Kind { Waypoint, Stop };

  Kind kind = Kind::Stop;
  ViewId view = ViewId::Ego0;  // meaningful for waypoints only
  int u = 0;
  int v = 0;
  std::string thought;
  std::optional<TaskPlan> updated_plan;

  static SpatialAction waypoint(ViewId view, int u, int v, std::string thought = {});
  static SpatialAction stop(std::string thought = {});

  /// Compact form used in the history block, e.g. "waypoint(ego_0, 512, 730)".
  std::string describe() const;
};

/// Renders an action as a response in the documented schema.
std::string to_response_json(const SpatialAction& action);

/// Locates the outermost JSON object in free-form text and validates it against
/// the response schema. Throws ParseError when no object can be read and
/// ValidationError when the object breaks the schema or ranges.
SpatialAction parse_action(const std::string& response);

/// Checklist from a decomposition response ("todo" array).
TaskPlan parse_plan_response(const std::string& response);

struct GroundingContext {
  CameraIntrinsics intrinsics;
  CameraRig rig;
  double floor_height = 0.0;
  AgentState agent;
  double d_max = 3.0;
  double agent_radius = 0.18;
  double max_range = 10.0;
  double clearance_factor = 1.5;  // pull-back = clearance_factor * agent_radius
};

struct GroundedWaypoint {
  Vec3 waypoint = Vec3::Zero();      // navigable target on the floor plane
  Vec3 surface_hit = Vec3::Zero();   // ray-cast hit in the map (ego views) or the bev point
  Vec2 floor_point = Vec2::Zero();   // floor projection of the hit, before pull-back and clamping
  bool clamped = false;              // shortened to d_max
};

/// Turns a (view, u, v) selection into a metric waypoint. Ego selections are ray-cast
/// into the volume from that view's camera pose, projected to the floor and pulled back
/// toward the camera; bev selections map straight through the bev transform. The result
/// is clamped to d_max around the agent. Throws GroundingError when the ray finds no
/// surface or the target lies in unobserved space.
GroundedWaypoint ground_action(const SpatialAction& action, const std::array<const RgbdFrame*, 4>& views,
                               const BevImage& bev, const TsdfVolume& volume, const GroundingContext& ctx);

}  // namespace gta
