#pragma once

#include "gta/geometry.hpp"
#include "gta/image.hpp"
#include "gta/tsdf.hpp"

#include <cstdint>
#include <vector>

namespace gta {

enum class BevCell : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

struct BevConfig {
  int size_px = 512;
  double padding = 1.0;     // meters added around the observed extent on every side
  double slab_low = 0.1;    // slab bounds above the floor used for occupancy
  double slab_high = 1.5;
};

/// Top-down orthographic map. Image +x is world +x, image +y (down) is world -y.
struct BevImage {
  RgbImage pixels;
  std::vector<BevCell> cells;  // per-pixel class before overlays
  double meters_per_pixel = 0.0;
  Vec2 world_origin = Vec2::Zero();  // world xy of the top-left image corner
  int grid_cells = 1000;

  double side_meters() const { return meters_per_pixel * pixels.width; }
  BevCell cell(int x, int y) const { return cells[static_cast<std::size_t>(y) * pixels.width + x]; }
};

namespace bev_colors {
inline constexpr Rgb kUnknown{110, 110, 110};
inline constexpr Rgb kFree{235, 235, 235};
inline constexpr Rgb kOccupied{30, 30, 30};
inline constexpr Rgb kTrail{255, 220, 0};
inline constexpr Rgb kWaypoint{230, 30, 30};
inline constexpr Rgb kAgent{0, 190, 60};
}  // namespace bev_colors

/// Renders the fused volume from above with grid, trail, waypoints, and agent arrow.
BevImage render_bev(const TsdfVolume& volume, double floor_height, const AgentState& agent,
                    const std::vector<Vec2>& trail, const std::vector<Vec2>& waypoints,
                    const BevConfig& config = {});

/// Normalized grid coordinate in [0, grid_cells]^2 to world xy. Throws BoundsError outside the range.
Vec2 bev_pixel_to_world(const BevImage& bev, const Vec2& normalized);
/// World xy to normalized grid coordinates (may fall outside [0, grid_cells]).
Vec2 world_to_bev(const BevImage& bev, const Vec2& world);
/// World xy to the image pixel containing it.
Eigen::Vector2i world_to_pixel(const BevImage& bev, const Vec2& world);
/// World xy of an image pixel's center.
Vec2 pixel_center_world(const BevImage& bev, int x, int y);

}  // namespace gta
