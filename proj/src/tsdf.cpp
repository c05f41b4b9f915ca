#include "gta/tsdf.hpp"

#include "gta/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace gta {

void RgbdFrame::check_shape(const CameraIntrinsics& k) const {
  if (color.width != k.width || color.height != k.height) {
    throw ShapeError("frame color is " + std::to_string(color.width) + "x" + std::to_string(color.height) +
                     ", intrinsics expect " + std::to_string(k.width) + "x" + std::to_string(k.height));
  }
  if (depth.size() != static_cast<std::size_t>(k.width) * k.height) {
    throw ShapeError("frame depth size does not match color dimensions");
  }
}

TsdfVolume::TsdfVolume(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
                       double truncation, double weight_cap)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims),
      truncation_(truncation > 0.0 ? truncation : 4.0 * voxel_size), weight_cap_(weight_cap) {
  if (!(voxel_size > 0.0)) throw ValidationError("voxel_size must be positive");
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw ValidationError("volume dims must be positive");
  if (!(weight_cap > 0.0)) throw ValidationError("weight cap must be positive");
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  sdf_.assign(n, 0.0);
  weight_.assign(n, 0.0);
}

TsdfVolume TsdfVolume::covering(const Vec3& lo, const Vec3& hi, double voxel_size) {
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    dims[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / voxel_size - 1e-9)));
  }
  return TsdfVolume(lo, voxel_size, dims);
}

Aabb TsdfVolume::bounds() const {
  return {origin_, origin_ + voxel_size_ * Vec3(dims_[0], dims_[1], dims_[2])};
}

Vec3 TsdfVolume::voxel_center(int i, int j, int k) const {
  return origin_ + voxel_size_ * Vec3(i + 0.5, j + 0.5, k + 0.5);
}

void TsdfVolume::set_voxel(int i, int j, int k, double sdf, double weight) {
  const auto idx = index(i, j, k);
  sdf_[idx] = std::clamp(sdf, -truncation_, truncation_);
  weight_[idx] = std::max(0.0, weight);
}

void TsdfVolume::fuse_voxel(std::size_t idx, double sdf, double w) {
  const double w_old = weight_[idx];
  const double s = (w_old * sdf_[idx] + w * sdf) / (w_old + w);
  sdf_[idx] = std::clamp(s, -truncation_, truncation_);
  weight_[idx] = std::min(w_old + w, weight_cap_);
}

namespace {

// Minimum trilinear weight carried by observed corners for a sample to count as known.
constexpr double kMinObservedShare = 0.25;

// Depth at a continuous pixel location. Inverse depth is interpolated bilinearly
// (exact for planes) when the 2x2 neighborhood is valid and continuous; otherwise
// the nearest pixel is used.
double sample_depth(const RgbdFrame& f, double u, double v) {
  const int w = f.width(), h = f.height();
  const int u0 = static_cast<int>(std::floor(u)), v0 = static_cast<int>(std::floor(v));
  if (u0 >= 0 && v0 >= 0 && u0 + 1 < w && v0 + 1 < h) {
    const double d00 = f.depth_at(u0, v0), d10 = f.depth_at(u0 + 1, v0);
    const double d01 = f.depth_at(u0, v0 + 1), d11 = f.depth_at(u0 + 1, v0 + 1);
    const double lo = std::min({d00, d10, d01, d11});
    const double hi = std::max({d00, d10, d01, d11});
    if (lo > 0.0 && hi <= 1.2 * lo) {
      const double a = u - u0, b = v - v0;
      const double inv = (1 - a) * (1 - b) / d00 + a * (1 - b) / d10 + (1 - a) * b / d01 + a * b / d11;
      return 1.0 / inv;
    }
  }
  const int un = static_cast<int>(std::lround(u)), vn = static_cast<int>(std::lround(v));
  if (un < 0 || vn < 0 || un >= w || vn >= h) return 0.0;
  return f.depth_at(un, vn);
}

}  // namespace

void TsdfVolume::integrate(const RgbdFrame& frame, const CameraIntrinsics& k, const CameraRig& rig,
                           double frame_weight) {
  frame.check_shape(k);
  if (!(frame_weight > 0.0)) throw ValidationError("frame weight must be positive");
  float max_depth = 0.0f;
  for (float d : frame.depth) max_depth = std::max(max_depth, d);
  if (max_depth <= 0.0f) return;

  const Pose3 cam_from_world = frame.camera_pose(rig).inverse();
  const Vec3 cam_pos = frame.camera_pose(rig).translation();
  // Nothing beyond the farthest valid depth plus the band can be touched.
  const double reach = max_depth * std::hypot(std::max(k.cx, k.width - k.cx) / k.fx,
                                              std::max(k.cy, k.height - k.cy) / k.fy, 1.0) +
                       truncation_;
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((cam_pos[a] - reach - origin_[a]) / voxel_size_)));
    hi[a] = std::min(dims_[a] - 1, static_cast<int>(std::floor((cam_pos[a] + reach - origin_[a]) / voxel_size_)));
  }

  const Mat3& rot = cam_from_world.rotation();
  const Vec3& trans = cam_from_world.translation();
  for (int kz = lo[2]; kz <= hi[2]; ++kz) {
    for (int jy = lo[1]; jy <= hi[1]; ++jy) {
      for (int ix = lo[0]; ix <= hi[0]; ++ix) {
        const Vec3 p = rot * voxel_center(ix, jy, kz) + trans;
        if (p.z() <= 1e-6) continue;
        const double u = k.fx * p.x() / p.z() + k.cx;
        const double v = k.fy * p.y() / p.z() + k.cy;
        if (u < -0.5 || v < -0.5 || u >= k.width - 0.5 || v >= k.height - 0.5) continue;
        const double d = sample_depth(frame, u, v);
        if (d <= 0.0) continue;
        const double sdf = d - p.z();
        if (sdf < -truncation_) continue;
        fuse_voxel(index(ix, jy, kz), std::min(sdf, truncation_), frame_weight);
      }
    }
  }
}

SdfSample TsdfVolume::query(const Vec3& point) const {
  if (!bounds().contains(point)) throw BoundsError("query point outside the volume");
  const Vec3 g = (point - origin_) / voxel_size_ - Vec3::Constant(0.5);
  std::array<int, 3> i0{};
  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    const double c = std::clamp(g[a], 0.0, static_cast<double>(dims_[a] - 1));
    i0[a] = std::min(static_cast<int>(std::floor(c)), std::max(0, dims_[a] - 2));
    f[a] = dims_[a] == 1 ? 0.0 : c - i0[a];
  }
  SdfSample out;
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
    const double wt = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
    if (wt == 0.0) continue;
    const auto idx = index(std::min(i0[0] + dx, dims_[0] - 1), std::min(i0[1] + dy, dims_[1] - 1),
                           std::min(i0[2] + dz, dims_[2] - 1));
    out.sdf += wt * sdf_[idx];
    out.weight += wt * weight_[idx];
  }
  return out;
}

std::optional<double> TsdfVolume::sample_observed(const Vec3& point) const {
  const Vec3 g = (point - origin_) / voxel_size_ - Vec3::Constant(0.5);
  std::array<int, 3> i0{};
  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    i0[a] = static_cast<int>(std::floor(g[a]));
    if (i0[a] < 0 || i0[a] + 1 >= dims_[a]) return std::nullopt;
    f[a] = g[a] - i0[a];
  }
  // Trilinear blend over the observed corners only, renormalized by their share.
  double s = 0.0, share = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
    const auto idx = index(i0[0] + dx, i0[1] + dy, i0[2] + dz);
    if (weight_[idx] <= 0.0) continue;
    const double wt = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
    s += wt * sdf_[idx];
    share += wt;
  }
  if (share < kMinObservedShare) return std::nullopt;
  return s / share;
}

std::optional<Vec3> TsdfVolume::raycast(const Ray& ray, double max_range) const {
  const Aabb box = bounds();
  double t_begin = 0.0;
  double t_end = max_range;
  if (!box.contains(ray.origin())) {
    const auto entry = ray_aabb_intersect(ray, box);
    if (!entry) return std::nullopt;
    t_begin = *entry;
  }
  const Ray inside(ray.at(t_begin), ray.direction());
  if (const auto exit = ray_aabb_intersect(inside, box)) t_end = std::min(t_end, t_begin + *exit);

  const double step = 0.5 * voxel_size_;
  // Observed samples on either side of a crossing may be separated by a short unobserved run.
  const double max_gap = 2.0 * voxel_size_ + 1e-9;
  std::optional<double> prev_sdf;
  double prev_t = t_begin;
  for (int n = 0;; ++n) {
    const double t = t_begin + n * step;
    if (t > t_end) break;
    if (prev_sdf && t - prev_t > max_gap) prev_sdf.reset();
    const auto s = sample_observed(ray.at(t));
    if (!s) continue;
    if (prev_sdf && *prev_sdf > 0.0 && *s <= 0.0) {
      const double t_hit = prev_t + (t - prev_t) * (*prev_sdf / (*prev_sdf - *s));
      return ray.at(t_hit);
    }
    prev_sdf = s;
    prev_t = t;
  }
  return std::nullopt;
}

bool TsdfVolume::column_observed(double x, double y, double z_lo, double z_hi) const {
  const int i = static_cast<int>(std::floor((x - origin_.x()) / voxel_size_));
  const int j = static_cast<int>(std::floor((y - origin_.y()) / voxel_size_));
  if (i < 0 || j < 0 || i >= dims_[0] || j >= dims_[1]) return false;
  for (int k = 0; k < dims_[2]; ++k) {
    const double z = origin_.z() + (k + 0.5) * voxel_size_;
    if (z < z_lo || z > z_hi) continue;
    if (weight_[index(i, j, k)] > 0.0) return true;
  }
  return false;
}

namespace {

constexpr char kMagic[8] = {'G', 'T', 'A', 'T', 'S', 'D', 'F', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f32(std::vector<std::uint8_t>& out, double value) {
  const float f = static_cast<float>(value);
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw ParseError("tsdf snapshot truncated at byte " + std::to_string(pos));
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[pos + b]) << (8 * b);
  pos += 4;
  return v;
}

float get_f32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  const std::uint32_t bits = get_u32(in, pos);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

std::vector<std::uint8_t> TsdfVolume::serialize() const {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  for (int d : dims_) put_u32(out, static_cast<std::uint32_t>(d));
  put_f32(out, voxel_size_);
  for (int a = 0; a < 3; ++a) put_f32(out, origin_[a]);
  put_f32(out, truncation_);
  for (double s : sdf_) put_f32(out, s);
  for (double w : weight_) put_f32(out, w);
  return out;
}

TsdfVolume TsdfVolume::deserialize(const std::vector<std::uint8_t>& in) {
  if (in.size() < 8 || !std::equal(std::begin(kMagic), std::end(kMagic), in.begin())) {
    throw ParseError("tsdf snapshot: bad magic");
  }
  std::size_t pos = 8;
  std::array<int, 3> dims{};
  for (int& d : dims) d = static_cast<int>(get_u32(in, pos));
  const double vs = get_f32(in, pos);
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = get_f32(in, pos);
  const double trunc = get_f32(in, pos);
  TsdfVolume vol(origin, vs, dims, trunc);
  const std::size_t n = vol.voxel_count();
  if (in.size() != pos + 8 * n) throw ParseError("tsdf snapshot: payload size mismatch");
  for (std::size_t i = 0; i < n; ++i) vol.sdf_[i] = get_f32(in, pos);
  for (std::size_t i = 0; i < n; ++i) vol.weight_[i] = get_f32(in, pos);
  return vol;
}

void TsdfVolume::save(const std::string& path) const {
  const auto bytes = serialize();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TsdfVolume TsdfVolume::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace gta
