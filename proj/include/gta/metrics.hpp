#pragma once

#include "gta/geometry.hpp"

#include <string>
#include <vector>

namespace gta {

double navigation_error(const Vec2& final_position, const Vec2& goal);
/// Inclusive: a stop exactly on the radius counts.
bool success(const Vec2& final_position, const Vec2& goal, double radius);
bool oracle_success(const std::vector<Vec2>& trajectory, const Vec2& goal, double radius);
/// success * shortest / max(shortest, actual). Throws ValidationError if shortest <= 0.
double spl(bool succeeded, double shortest, double actual);
double path_length(const std::vector<Vec2>& path);
/// Dynamic time warping cost under Euclidean point distance.
double dtw(const std::vector<Vec2>& a, const std::vector<Vec2>& b);
/// exp(-DTW / (|reference| * radius)), |reference| = number of reference points.
double ndtw(const std::vector<Vec2>& trajectory, const std::vector<Vec2>& reference, double radius);

/// Points every `spacing` meters along the polyline, always including both ends.
std::vector<Vec2> resample_path(const std::vector<Vec2>& path, double spacing);

struct EpisodeMetrics {
  bool success = false;
  bool oracle_success = false;
  double ne = 0.0;
  double tl = 0.0;
  double spl = 0.0;
  double ndtw = 0.0;
};

/// Episode-level metrics from the dense trajectory. Paths are resampled at
/// `ndtw_spacing` before alignment so the score does not depend on controller step size.
EpisodeMetrics score_trajectory(const std::vector<Vec2>& trajectory, const Vec2& goal, double success_radius,
                                double shortest_path_length, const std::vector<Vec2>& reference_path,
                                double ndtw_spacing = 0.5);

}  // namespace gta
