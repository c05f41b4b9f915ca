#include "gta/bev.hpp"

#include "gta/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gta {

namespace {

struct ColumnMap {
  int nx = 0, ny = 0;
  std::vector<BevCell> cells;
  bool any_observed = false;
  int i_lo = 0, i_hi = -1, j_lo = 0, j_hi = -1;
};

ColumnMap classify_columns(const TsdfVolume& vol, double floor_height, const BevConfig& cfg) {
  ColumnMap m;
  m.nx = vol.dims()[0];
  m.ny = vol.dims()[1];
  m.cells.assign(static_cast<std::size_t>(m.nx) * m.ny, BevCell::Unknown);
  m.i_lo = m.nx;
  m.j_lo = m.ny;
  const double z_lo = floor_height + cfg.slab_low, z_hi = floor_height + cfg.slab_high;
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      bool observed = false, occupied = false;
      for (int k = 0; k < vol.dims()[2]; ++k) {
        const double z = vol.voxel_center(i, j, k).z();
        if (z < z_lo || z > z_hi) continue;
        if (vol.weight(i, j, k) > 0.0) {
          observed = true;
          if (vol.sdf(i, j, k) < 0.0) occupied = true;
        }
      }
      if (!observed) continue;
      m.cells[static_cast<std::size_t>(j) * m.nx + i] = occupied ? BevCell::Occupied : BevCell::Free;
      m.any_observed = true;
      m.i_lo = std::min(m.i_lo, i);
      m.i_hi = std::max(m.i_hi, i);
      m.j_lo = std::min(m.j_lo, j);
      m.j_hi = std::max(m.j_hi, j);
    }
  }
  return m;
}

Rgb cell_color(BevCell c) {
  switch (c) {
    case BevCell::Free: return bev_colors::kFree;
    case BevCell::Occupied: return bev_colors::kOccupied;
    default: return bev_colors::kUnknown;
  }
}

}  // namespace

BevImage render_bev(const TsdfVolume& vol, double floor_height, const AgentState& agent,
                    const std::vector<Vec2>& trail, const std::vector<Vec2>& waypoints,
                    const BevConfig& cfg) {
  if (cfg.size_px <= 0) throw ValidationError("bev size must be positive");
  const ColumnMap cols = classify_columns(vol, floor_height, cfg);
  const double vs = vol.voxel_size();
  const Vec2 vol_lo = vol.origin().head<2>();

  Vec2 lo, hi;
  double pad = cfg.padding;
  if (cols.any_observed) {
    lo = vol_lo + vs * Vec2(cols.i_lo, cols.j_lo);
    hi = vol_lo + vs * Vec2(cols.i_hi + 1, cols.j_hi + 1);
  } else {
    lo = vol_lo;
    hi = vol_lo + vs * Vec2(cols.nx, cols.ny);
    pad = 0.0;
  }
  const Vec2 center = 0.5 * (lo + hi);
  const double side = (hi - lo).maxCoeff() + 2.0 * pad;

  BevImage bev;
  bev.meters_per_pixel = side / cfg.size_px;
  bev.world_origin = Vec2(center.x() - side / 2, center.y() + side / 2);
  bev.pixels = RgbImage(cfg.size_px, cfg.size_px);
  bev.cells.assign(static_cast<std::size_t>(cfg.size_px) * cfg.size_px, BevCell::Unknown);

  for (int y = 0; y < cfg.size_px; ++y) {
    for (int x = 0; x < cfg.size_px; ++x) {
      const Vec2 w = pixel_center_world(bev, x, y);
      const int i = static_cast<int>(std::floor((w.x() - vol_lo.x()) / vs));
      const int j = static_cast<int>(std::floor((w.y() - vol_lo.y()) / vs));
      BevCell c = BevCell::Unknown;
      if (i >= 0 && j >= 0 && i < cols.nx && j < cols.ny) c = cols.cells[static_cast<std::size_t>(j) * cols.nx + i];
      bev.cells[static_cast<std::size_t>(y) * cfg.size_px + x] = c;
      bev.pixels.set(x, y, cell_color(c));
    }
  }

  draw::normalized_grid(bev.pixels);
  for (std::size_t n = 1; n < trail.size(); ++n) {
    const auto a = world_to_pixel(bev, trail[n - 1]);
    const auto b = world_to_pixel(bev, trail[n]);
    draw::line(bev.pixels, a.x(), a.y(), b.x(), b.y(), bev_colors::kTrail);
  }
  if (trail.size() == 1) {
    const auto a = world_to_pixel(bev, trail[0]);
    bev.pixels.set(a.x(), a.y(), bev_colors::kTrail);
  }
  for (const auto& wp : waypoints) {
    const auto p = world_to_pixel(bev, wp);
    draw::disc(bev.pixels, p.x(), p.y(), 3, bev_colors::kWaypoint);
  }
  const auto a = world_to_pixel(bev, agent.position());
  const int len = std::max(6, cfg.size_px / 36);
  const int tip_x = a.x() + static_cast<int>(std::lround(len * std::cos(agent.theta())));
  const int tip_y = a.y() - static_cast<int>(std::lround(len * std::sin(agent.theta())));
  draw::disc(bev.pixels, a.x(), a.y(), 3, bev_colors::kAgent);
  draw::line(bev.pixels, a.x(), a.y(), tip_x, tip_y, bev_colors::kAgent);
  return bev;
}

Vec2 bev_pixel_to_world(const BevImage& bev, const Vec2& n) {
  const double g = bev.grid_cells;
  if (!(n.x() >= 0.0 && n.x() <= g && n.y() >= 0.0 && n.y() <= g)) {
    throw BoundsError("normalized bev coordinate outside [0, " + std::to_string(bev.grid_cells) + "]");
  }
  const double side = bev.side_meters();
  return {bev.world_origin.x() + n.x() / g * side, bev.world_origin.y() - n.y() / g * side};
}

Vec2 world_to_bev(const BevImage& bev, const Vec2& w) {
  const double side = bev.side_meters();
  const double g = bev.grid_cells;
  return {(w.x() - bev.world_origin.x()) / side * g, (bev.world_origin.y() - w.y()) / side * g};
}

Eigen::Vector2i world_to_pixel(const BevImage& bev, const Vec2& w) {
  const double mpp = bev.meters_per_pixel;
  return {static_cast<int>(std::floor((w.x() - bev.world_origin.x()) / mpp)),
          static_cast<int>(std::floor((bev.world_origin.y() - w.y()) / mpp))};
}

Vec2 pixel_center_world(const BevImage& bev, int x, int y) {
  const double mpp = bev.meters_per_pixel;
  return {bev.world_origin.x() + (x + 0.5) * mpp, bev.world_origin.y() - (y + 0.5) * mpp};
}

}  // namespace gta
