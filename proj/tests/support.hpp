#pragma once

#include "gta/geometry.hpp"
#include "gta/sim.hpp"
#include "gta/tsdf.hpp"

#include <random>
#include <string>

namespace testing {

inline std::string fixture(const std::string& rel) { return std::string(GTA_FIXTURES) + "/" + rel; }

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

inline gta::Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  q.normalize();
  return q.toRotationMatrix();
}

inline gta::Pose3 random_pose(Rng& rng) {
  return {random_rotation(rng), gta::Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5))};
}

/// Walls of thickness 0.1 around the interior [0, side]^2, height 2.5.
inline gta::SceneSpec square_room(double side) {
  gta::SceneSpec s;
  s.name = "room";
  s.floor_height = 0.0;
  s.bounds_min = gta::Vec2(-0.1, -0.1);
  s.bounds_max = gta::Vec2(side + 0.1, side + 0.1);
  const double t = 0.1, h = 2.5;
  s.boxes = {
      {"south", {{-t, -t, 0}, {side + t, 0, h}}, {200, 200, 200}},
      {"north", {{-t, side, 0}, {side + t, side + t, h}}, {200, 200, 200}},
      {"west", {{-t, 0, 0}, {0, side, h}}, {200, 200, 200}},
      {"east", {{side, 0, 0}, {side + t, side, h}}, {200, 200, 200}},
  };
  return s;
}

/// Scene holding only a floor and one wall spanning y in [-5, 5] whose face is at x = `x`.
inline gta::SceneSpec wall_scene(double x) {
  gta::SceneSpec s;
  s.name = "wall";
  s.bounds_min = gta::Vec2(-5, -5);
  s.bounds_max = gta::Vec2(x + 0.5, 5);
  s.boxes = {{"wall", {{x, -5, 0}, {x + 0.2, 5, 2.5}}, {180, 180, 180}}};
  return s;
}

/// Distance along `ray` to the first point inside `box`, found by marching at `step`.
inline std::optional<double> march_aabb(const gta::Ray& ray, const gta::Aabb& box, double max_t, double step) {
  for (double t = 0.0; t <= max_t; t += step) {
    if (box.contains(ray.at(t))) return t;
  }
  return std::nullopt;
}

}  // namespace testing

namespace testing {

/// Small camera used by the fusion algebra checks.
inline gta::CameraIntrinsics small_camera() { return gta::CameraIntrinsics::from_hfov(32, 24, gta::kPi / 2); }

/// Frame with per-pixel random depth in [0.3, 1.2] m (about 10% invalid) from a random
/// agent pose inside [0, 1]^2 looking along a random rig yaw.
inline gta::RgbdFrame random_frame(Rng& rng, const gta::CameraIntrinsics& k) {
  gta::RgbdFrame f;
  f.color = gta::RgbImage(k.width, k.height);
  f.depth.resize(static_cast<std::size_t>(k.width) * k.height);
  for (auto& d : f.depth) d = rng.uniform(0, 1) < 0.1 ? 0.0f : static_cast<float>(rng.uniform(0.3, 1.2));
  f.agent_state = gta::AgentState(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(-gta::kPi, gta::kPi));
  f.body_pose = f.agent_state.body_pose(0.0);
  f.camera_yaw = 0.0;
  return f;
}

/// Rig whose camera sits 0.6 m above the floor, inside the small algebra volume.
inline gta::CameraRig low_rig() {
  gta::CameraRig rig;
  rig.mount_height = 0.6;
  return rig;
}

/// Volume around the random frames above: [-1, 2]^2 x [0, 1.5] at 5 cm.
inline gta::TsdfVolume algebra_volume() {
  return gta::TsdfVolume::covering(gta::Vec3(-1, -1, 0), gta::Vec3(2, 2, 1.5), 0.05);
}

}  // namespace testing

#include <cstdlib>
#include <fstream>
#include <iterator>

namespace testing {

/// Compares `bytes` with fixtures/golden/<name>; GTA_UPDATE_GOLDEN=1 rewrites the file instead.
inline bool matches_golden(const std::string& name, const std::vector<std::uint8_t>& bytes) {
  const std::string path = fixture("golden/" + name);
  if (std::getenv("GTA_UPDATE_GOLDEN")) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return static_cast<bool>(out);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  const std::vector<std::uint8_t> stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return stored == bytes;
}

}  // namespace testing

#include "gta/action.hpp"
#include "gta/bev.hpp"
#include "gta/reasoning.hpp"

#include <array>

namespace testing {

// One rotation scan fused into a fresh volume, with the views and bev a prompt would use.
struct Scanned {
  gta::SceneSpec scene;
  gta::SensorConfig sensor;
  gta::TsdfVolume volume;
  std::vector<gta::RgbdFrame> frames;
  gta::AgentState agent;
  gta::BevImage bev;
  std::array<std::size_t, 4> selected{};
  gta::GroundingContext ctx;

  std::array<const gta::RgbdFrame*, 4> views() const {
    std::array<const gta::RgbdFrame*, 4> out{};
    for (int k = 0; k < 4; ++k) out[k] = &frames[selected[k]];
    return out;
  }
  std::array<gta::RgbImage, 4> ego_images() const {
    std::array<gta::RgbImage, 4> out;
    for (int k = 0; k < 4; ++k) out[k] = gta::annotate_grid(frames[selected[k]].color);
    return out;
  }
};

inline Scanned scan(const gta::SceneSpec& scene, const gta::AgentState& agent, const gta::Vec3& lo,
                    const gta::Vec3& hi) {
  Scanned s{scene, gta::SensorConfig{}, gta::TsdfVolume::covering(lo, hi, 0.05), {}, agent, {}, {}, {}};
  s.frames = gta::capture_rotation_scan(scene, agent, s.sensor);
  for (const auto& f : s.frames) s.volume.integrate(f, s.sensor.intrinsics, s.sensor.rig);
  s.selected = gta::select_orthogonal_views(s.frames, agent, gta::ViewSelectConfig{});
  s.bev = gta::render_bev(s.volume, scene.floor_height, agent, {}, {});
  s.ctx.intrinsics = s.sensor.intrinsics;
  s.ctx.rig = s.sensor.rig;
  s.ctx.agent = agent;
  return s;
}

// 4 m box room spanning [0,4]^2.
inline Scanned room_scan(const gta::AgentState& agent) {
  return scan(square_room(4.0), agent, gta::Vec3(-0.3, -0.3, -0.2), gta::Vec3(4.3, 4.3, 2.7));
}

}  // namespace testing
