#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <vector>

namespace gta {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

/// Absolute angular difference wrapped into [0, pi].
double angular_distance(double a, double b);

/// Rigid transform, world-from-body convention. World is z-up.
class Pose3 {
public:
  Pose3() = default;
  /// Throws ValidationError if `rotation` is not a proper rotation (tolerance 1e-6).
  Pose3(const Mat3& rotation, const Vec3& translation);

  static Pose3 identity() { return {}; }
  /// Rotation about +z by `yaw`, then translation.
  static Pose3 from_yaw(double yaw, const Vec3& translation);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Pose3 operator*(const Pose3& rhs) const;
  Vec3 operator*(const Vec3& point) const { return rotation_ * point + translation_; }
  Pose3 inverse() const;
  Mat4 matrix() const;

  /// Max abs entry of R*R^T - I.
  double orthonormality_error() const;

private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

/// Planar agent state; theta is kept in (-pi, pi].
class AgentState {
public:
  AgentState() = default;
  AgentState(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  AgentState with_position(const Vec2& p) const { return {p.x(), p.y(), theta_}; }
  AgentState with_theta(double theta) const { return {x_, y_, theta}; }

  /// Body pose with the body origin on the floor at `floor_height`.
  Pose3 body_pose(double floor_height) const;

  bool operator==(const AgentState&) const = default;

private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

struct CameraIntrinsics {
  double fx = 64.0;
  double fy = 64.0;
  double cx = 63.5;
  double cy = 47.5;
  int width = 128;
  int height = 96;

  /// Throws ValidationError when the fields break the pinhole invariants.
  void validate() const;
  bool contains(double u, double v) const;
  /// Intrinsics with the given horizontal field of view, principal point at the image center.
  static CameraIntrinsics from_hfov(int width, int height, double hfov_radians);
};

/// Rotating camera mounted on the agent. Camera frame is z-forward, x-right, y-down.
struct CameraRig {
  double mount_height = 1.25;
  double pitch = 0.0;  // radians, positive tilts the optical axis down
  int yaw_steps = 8;   // offsets k * 2pi / yaw_steps, k = 0..yaw_steps-1

  void validate() const;
  std::vector<double> yaw_offsets() const;
  double angular_step() const;
  /// Body-from-camera transform at rig rotation `yaw` (CCW about body z).
  Pose3 extrinsic(double yaw) const;
};

class Ray {
public:
  /// Normalizes `direction`; throws ValidationError on a zero vector.
  Ray(const Vec3& origin, const Vec3& direction);

  const Vec3& origin() const { return origin_; }
  const Vec3& direction() const { return direction_; }
  Vec3 at(double t) const { return origin_ + t * direction_; }

private:
  Vec3 origin_;
  Vec3 direction_;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const;
};

/// Camera-frame point for pixel (u, v) at z-depth `depth`.
Vec3 back_project(const Vec2& pixel, double depth, const CameraIntrinsics& intrinsics);

/// Pinhole projection of a camera-frame point with z > 0.
Vec2 project(const Vec3& point_camera, const CameraIntrinsics& intrinsics);

Vec3 to_world(const Vec3& point_camera, const Pose3& body_pose, const Pose3& cam_extrinsic);

/// Smallest t >= 0 at which the ray meets the box surface.
std::optional<double> ray_aabb_intersect(const Ray& ray, const Aabb& box);

}  // namespace gta
