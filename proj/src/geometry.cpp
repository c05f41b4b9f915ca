#include "gta/geometry.hpp"

#include "gta/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gta {

double normalize_angle(double radians) {
  double a = std::fmod(radians, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double angular_distance(double a, double b) {
  return std::abs(normalize_angle(a - b));
}

Pose3::Pose3(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw ValidationError("pose has non-finite entries");
  }
  if (orthonormality_error() > 1e-6 || rotation.determinant() < 0.0) {
    throw ValidationError("pose rotation is not a proper rotation matrix");
  }
}

Pose3 Pose3::from_yaw(double yaw, const Vec3& translation) {
  return Pose3(Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(), translation);
}

Pose3 Pose3::operator*(const Pose3& rhs) const {
  Pose3 out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

Pose3 Pose3::inverse() const {
  Pose3 out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

Mat4 Pose3::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

double Pose3::orthonormality_error() const {
  return (rotation_ * rotation_.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Pose3 AgentState::body_pose(double floor_height) const {
  return Pose3::from_yaw(theta_, Vec3(x_, y_, floor_height));
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ValidationError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ValidationError("intrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw ValidationError("intrinsics: principal point outside the image");
  }
}

bool CameraIntrinsics::contains(double u, double v) const {
  return u >= 0.0 && v >= 0.0 && u <= width - 1 && v <= height - 1;
}

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_radians) {
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.cx = (width - 1) / 2.0;
  k.cy = (height - 1) / 2.0;
  k.fx = (width / 2.0) / std::tan(hfov_radians / 2.0);
  k.fy = k.fx;
  return k;
}

void CameraRig::validate() const {
  if (!(mount_height > 0.0)) throw ValidationError("rig: mount_height must be positive");
  if (yaw_steps < 1) throw ValidationError("rig: yaw_steps must be >= 1");
  if (!(std::abs(pitch) < kPi / 2)) throw ValidationError("rig: pitch must be within (-90, 90) degrees");
}

std::vector<double> CameraRig::yaw_offsets() const {
  std::vector<double> out;
  out.reserve(yaw_steps);
  for (int k = 0; k < yaw_steps; ++k) out.push_back(k * angular_step());
  return out;
}

double CameraRig::angular_step() const { return 2.0 * kPi / yaw_steps; }

Pose3 CameraRig::extrinsic(double yaw) const {
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const Vec3 forward(cp * cy, cp * sy, -sp);
  const Vec3 right(sy, -cy, 0.0);
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose3(r, Vec3(0.0, 0.0, mount_height));
}

Ray::Ray(const Vec3& origin, const Vec3& direction) : origin_(origin) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("ray direction must be nonzero and finite");
  direction_ = direction / n;
}

bool Aabb::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

Vec3 back_project(const Vec2& pixel, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw InvalidDepthError("back_project: depth must be positive, got " + std::to_string(depth));
  }
  if (!k.contains(pixel.x(), pixel.y())) {
    throw BoundsError("back_project: pixel outside image bounds");
  }
  return {(pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth, depth};
}

Vec2 project(const Vec3& p, const CameraIntrinsics& k) {
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

Vec3 to_world(const Vec3& point_camera, const Pose3& body_pose, const Pose3& cam_extrinsic) {
  return body_pose * (cam_extrinsic * point_camera);
}

std::optional<double> ray_aabb_intersect(const Ray& ray, const Aabb& box) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin()[axis];
    const double d = ray.direction()[axis];
    if (std::abs(d) < 1e-15) {
      if (o < box.min[axis] || o > box.max[axis]) return std::nullopt;
      continue;
    }
    double t0 = (box.min[axis] - o) / d;
    double t1 = (box.max[axis] - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;
  // Origin inside the box: the first surface point ahead is the exit.
  return t_near >= 0.0 ? t_near : t_far;
}

}  // namespace gta
