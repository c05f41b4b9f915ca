#include "gta/sim.hpp"

#include "gta/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gta {

namespace {

// Boxes thinner than this above the floor are treated as floor markings, not obstacles.
constexpr double kObstacleMinHeight = 0.02;

double rect_signed_distance(const Aabb& b, const Vec2& p) {
  const double dx = std::max({b.min.x() - p.x(), 0.0, p.x() - b.max.x()});
  const double dy = std::max({b.min.y() - p.y(), 0.0, p.y() - b.max.y()});
  if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
  return -std::min({p.x() - b.min.x(), b.max.x() - p.x(), p.y() - b.min.y(), b.max.y() - p.y()});
}

double box_surface_distance(const Aabb& b, const Vec3& p) {
  const Vec3 outside = (b.min - p).cwiseMax(p - b.max).cwiseMax(Vec3::Zero());
  if (outside.squaredNorm() > 0.0) return outside.norm();
  return (p - b.min).cwiseMin(b.max - p).minCoeff();
}

}  // namespace

void SceneSpec::validate() const {
  if (!(bounds_min.array() < bounds_max.array()).all()) throw ValidationError("scene bounds are empty");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const std::string where = "box " + std::to_string(i) + " ('" + b.label + "')";
    if (!b.box.min.allFinite() || !b.box.max.allFinite()) throw ValidationError(where + ": non-finite corner");
    if (!(b.box.min.array() <= b.box.max.array()).all()) throw ValidationError(where + ": min exceeds max");
    if (b.box.min.x() < bounds_min.x() || b.box.min.y() < bounds_min.y() || b.box.max.x() > bounds_max.x() ||
        b.box.max.y() > bounds_max.y())
      throw ValidationError(where + ": outside scene bounds");
    if (b.box.min.z() < floor_height - 1e-9) throw ValidationError(where + ": extends below the floor");
  }
}

bool SceneSpec::in_bounds(const Vec2& p) const {
  return (p.array() >= bounds_min.array()).all() && (p.array() <= bounds_max.array()).all();
}

double SceneSpec::clearance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) {
    if (b.box.max.z() < floor_height + kObstacleMinHeight) continue;
    best = std::min(best, rect_signed_distance(b.box, p));
  }
  return best;
}

std::optional<std::pair<double, int>> SceneSpec::raycast_labeled(const Ray& ray) const {
  std::optional<std::pair<double, int>> best;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (const auto t = ray_aabb_intersect(ray, boxes[i].box); t && (!best || *t < best->first)) {
      best = {{*t, static_cast<int>(i)}};
    }
  }
  const double dz = ray.direction().z();
  if (dz < 0.0 && ray.origin().z() > floor_height) {
    const double t = (floor_height - ray.origin().z()) / dz;
    if (in_bounds(ray.at(t).head<2>()) && (!best || t < best->first)) best = {{t, -1}};
  }
  return best;
}

std::optional<double> SceneSpec::raycast(const Ray& ray) const {
  if (const auto hit = raycast_labeled(ray)) return hit->first;
  return std::nullopt;
}

double SceneSpec::distance_to_surface(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) best = std::min(best, box_surface_distance(b.box, p));
  if (in_bounds(p.head<2>())) best = std::min(best, std::abs(p.z() - floor_height));
  return best;
}

void EpisodeSpec::validate(double agent_radius) const {
  const std::string where = "episode '" + id + "'";
  if (!scene) throw ValidationError(where + ": no scene attached");
  auto check_free = [&](const Vec2& p, const std::string& what) {
    if (!scene->in_bounds(p)) throw ValidationError(where + ": " + what + " outside scene bounds");
    if (scene->clearance(p) < agent_radius) throw ValidationError(where + ": " + what + " is not in free space");
  };
  check_free(start.position(), "start");
  check_free(goal, "goal");
  if (!(shortest_path_length > 0.0)) throw ValidationError(where + ": shortest_path_length must be positive");
  if (!(success_radius > 0.0)) throw ValidationError(where + ": success_radius must be positive");
  if (reference_path.empty()) throw ValidationError(where + ": reference_path must be nonempty");
  if (max_steps <= 0) throw ValidationError(where + ": max_steps must be positive");
  if (instruction.empty()) throw ValidationError(where + ": instruction must be nonempty");
}

void ControllerConfig::validate() const {
  if (!(d_max > 0.0 && step_size > 0.0 && turn_rate > 0.0 && agent_radius > 0.0)) {
    throw ValidationError("controller parameters must all be positive");
  }
}

RgbdFrame render_rgbd(const SceneSpec& scene, const AgentState& agent, double camera_yaw,
                      const SensorConfig& sensor, double timestamp) {
  const auto& k = sensor.intrinsics;
  RgbdFrame f;
  f.color = RgbImage(k.width, k.height);
  f.depth.assign(static_cast<std::size_t>(k.width) * k.height, 0.0f);
  f.timestamp = timestamp;
  f.camera_yaw = camera_yaw;
  f.agent_state = agent;
  f.body_pose = agent.body_pose(scene.floor_height);

  const Pose3 cam = f.camera_pose(sensor.rig);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const Ray ray(cam.translation(), cam.rotation() * dir_cam);
      const auto hit = scene.raycast_labeled(ray);
      if (!hit) continue;
      const double z = hit->first / dir_cam.norm();
      if (z < sensor.min_depth || z > sensor.max_depth) continue;
      f.depth[static_cast<std::size_t>(v) * k.width + u] = static_cast<float>(z);
      f.color.set(u, v, hit->second < 0 ? scene.floor_color : scene.boxes[hit->second].color);
    }
  }
  return f;
}

std::vector<RgbdFrame> capture_rotation_scan(const SceneSpec& scene, const AgentState& agent,
                                             const SensorConfig& sensor, double start_time) {
  std::vector<RgbdFrame> frames;
  const auto offsets = sensor.rig.yaw_offsets();
  frames.reserve(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    frames.push_back(render_rgbd(scene, agent, offsets[i], sensor, start_time + i * sensor.frame_interval));
  }
  return frames;
}

ExecutionResult execute_waypoint(const SceneSpec& scene, const AgentState& state, const Vec2& waypoint,
                                 const ControllerConfig& cfg, double start_time, double dt) {
  if (!waypoint.allFinite()) throw ValidationError("waypoint is not finite");
  const Vec2 start = state.position();
  const double dist = (waypoint - start).norm();
  if (dist > cfg.d_max + 1e-9) {
    throw HorizonExceededError("waypoint " + std::to_string(dist) + " m away exceeds d_max " +
                               std::to_string(cfg.d_max) + " m");
  }
  ExecutionResult out;
  out.state = state;
  double t = start_time;
  if (dist < 1e-12) {
    out.reached = true;
    return out;
  }

  const double bearing = std::atan2(waypoint.y() - start.y(), waypoint.x() - start.x());
  const double turn = normalize_angle(bearing - state.theta());
  const int turn_steps = static_cast<int>(std::ceil(std::abs(turn) / cfg.turn_rate - 1e-12));
  for (int n = 1; n <= turn_steps; ++n) {
    t += dt;
    const double theta = n == turn_steps ? bearing : state.theta() + turn * n / turn_steps;
    out.state = out.state.with_theta(theta);
    out.path.push_back({t, out.state});
  }

  const Vec2 dir = (waypoint - start) / dist;
  const int moves = static_cast<int>(std::ceil(dist / cfg.step_size - 1e-9));
  for (int n = 1; n <= moves; ++n) {
    const Vec2 candidate = n == moves ? waypoint : Vec2(start + dir * (n * cfg.step_size));
    if (scene.clearance(candidate) < cfg.agent_radius) break;
    t += dt;
    out.state = out.state.with_position(candidate);
    out.path.push_back({t, out.state});
  }
  out.reached = (waypoint - out.state.position()).norm() <= cfg.step_size + 1e-9;
  return out;
}

}  // namespace gta
