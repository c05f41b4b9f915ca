#pragma once

#include "gta/geometry.hpp"
#include "gta/image.hpp"

#include <vector>

namespace gta {

/// One RGB-D capture from the rotating camera.
struct RgbdFrame {
  RgbImage color;
  std::vector<float> depth;  // row-major z-depth in meters, 0 = invalid
  double timestamp = 0.0;
  double camera_yaw = 0.0;   // rig rotation relative to the body at capture
  Pose3 body_pose;
  AgentState agent_state;

  int width() const { return color.width; }
  int height() const { return color.height; }
  float depth_at(int u, int v) const { return depth[static_cast<std::size_t>(v) * color.width + u]; }

  /// Heading of the optical axis in the world, in (-pi, pi].
  double world_yaw() const { return normalize_angle(agent_state.theta() + camera_yaw); }
  Pose3 camera_pose(const CameraRig& rig) const { return body_pose * rig.extrinsic(camera_yaw); }

  /// Throws ShapeError when color/depth disagree with each other or with `intrinsics`.
  void check_shape(const CameraIntrinsics& intrinsics) const;
};

}  // namespace gta
