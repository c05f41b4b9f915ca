#pragma once

#include "gta/frame.hpp"
#include "gta/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gta {

struct SdfSample {
  double sdf = 0.0;
  double weight = 0.0;  // 0 = unknown
};

/// Dense truncated signed distance volume fused by weighted running average.
///
/// Voxel (i, j, k) spans [origin + (i,j,k) * voxel_size, origin + (i+1,j+1,k+1) * voxel_size)
/// and its value lives at the voxel center. Storage is x-fastest.
class TsdfVolume {
public:
  static constexpr double kDefaultVoxelSize = 0.05;
  static constexpr double kDefaultWeightCap = 100.0;

  /// Truncation defaults to 4 voxels when `truncation` <= 0.
  TsdfVolume(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
             double truncation = 0.0, double weight_cap = kDefaultWeightCap);

  /// Smallest volume covering the axis-aligned box [lo, hi].
  static TsdfVolume covering(const Vec3& lo, const Vec3& hi, double voxel_size = kDefaultVoxelSize);

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  const std::array<int, 3>& dims() const { return dims_; }
  double truncation() const { return truncation_; }
  double weight_cap() const { return weight_cap_; }
  Aabb bounds() const;
  std::size_t voxel_count() const { return sdf_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  Vec3 voxel_center(int i, int j, int k) const;
  double sdf(int i, int j, int k) const { return sdf_[index(i, j, k)]; }
  double weight(int i, int j, int k) const { return weight_[index(i, j, k)]; }
  /// Direct write, for fixtures and snapshot loading. |sdf| is clamped to truncation.
  void set_voxel(int i, int j, int k, double sdf, double weight);

  /// Fuses one frame using the projective signed distance. Voxels farther than
  /// the truncation band behind the observed surface are left untouched.
  void integrate(const RgbdFrame& frame, const CameraIntrinsics& intrinsics, const CameraRig& rig,
                 double frame_weight = 1.0);

  /// Running-average update of a single voxel; exposed so the update rule can be checked in isolation.
  void fuse_voxel(std::size_t idx, double sdf, double frame_weight);

  /// Trilinear read over the 8 enclosing voxel centers. Throws BoundsError outside bounds().
  SdfSample query(const Vec3& point) const;

  /// Trilinear sdf over the observed enclosing voxels, renormalized by their share of the
  /// interpolation weight; nullopt when that share is below a quarter.
  std::optional<double> sample_observed(const Vec3& point) const;

  /// Marches the ray at half-voxel steps and returns the first front-facing zero
  /// crossing, refined by linear interpolation between the bracketing samples. Unobserved
  /// samples are skipped as long as the observed ones stay within two voxels of each other.
  std::optional<Vec3> raycast(const Ray& ray, double max_range) const;

  /// True if any voxel of the column containing (x, y) within [z_lo, z_hi] has been observed.
  bool column_observed(double x, double y, double z_lo, double z_hi) const;

  /// Little-endian snapshot: see docs/formats.md.
  std::vector<std::uint8_t> serialize() const;
  static TsdfVolume deserialize(const std::vector<std::uint8_t>& bytes);
  void save(const std::string& path) const;
  static TsdfVolume load(const std::string& path);

private:
  Vec3 origin_;
  double voxel_size_;
  std::array<int, 3> dims_;
  double truncation_;
  double weight_cap_;
  std::vector<double> sdf_;
  std::vector<double> weight_;
};

}  // namespace gta
