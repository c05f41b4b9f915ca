#include "gta/metrics.hpp"

#include "gta/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gta {

double navigation_error(const Vec2& final_position, const Vec2& goal) { return (final_position - goal).norm(); }

bool success(const Vec2& final_position, const Vec2& goal, double radius) {
  return navigation_error(final_position, goal) <= radius;
}

bool oracle_success(const std::vector<Vec2>& trajectory, const Vec2& goal, double radius) {
  return std::any_of(trajectory.begin(), trajectory.end(), [&](const Vec2& p) { return (p - goal).norm() <= radius; });
}

double spl(bool succeeded, double shortest, double actual) {
  if (!(shortest > 0.0)) throw ValidationError("spl: shortest path length must be positive");
  if (actual < 0.0) throw ValidationError("spl: actual path length must be nonnegative");
  if (!succeeded) return 0.0;
  return shortest / std::max(shortest, actual);
}

double path_length(const std::vector<Vec2>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

double dtw(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) throw ValidationError("dtw: paths must be nonempty");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = (a[i - 1] - b[j - 1]).norm() + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double ndtw(const std::vector<Vec2>& trajectory, const std::vector<Vec2>& reference, double radius) {
  if (!(radius > 0.0)) throw ValidationError("ndtw: radius must be positive");
  return std::exp(-dtw(trajectory, reference) / (static_cast<double>(reference.size()) * radius));
}

std::vector<Vec2> resample_path(const std::vector<Vec2>& path, double spacing) {
  if (path.empty()) return {};
  if (!(spacing > 0.0)) throw ValidationError("resample_path: spacing must be positive");
  std::vector<Vec2> out{path.front()};
  double carry = 0.0;  // distance walked since the last emitted point
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec2 a = path[i - 1], b = path[i];
    const double seg = (b - a).norm();
    double s = spacing - carry;
    while (s <= seg) {
      out.push_back(a + (b - a) * (s / seg));
      s += spacing;
    }
    carry = seg - (s - spacing);
  }
  if ((out.back() - path.back()).norm() > 1e-9) out.push_back(path.back());
  return out;
}

EpisodeMetrics score_trajectory(const std::vector<Vec2>& trajectory, const Vec2& goal, double success_radius,
                                double shortest_path_length, const std::vector<Vec2>& reference_path,
                                double ndtw_spacing) {
  if (trajectory.empty()) throw ValidationError("score: empty trajectory");
  EpisodeMetrics m;
  m.ne = navigation_error(trajectory.back(), goal);
  m.success = m.ne <= success_radius;
  m.oracle_success = oracle_success(trajectory, goal, success_radius);
  m.tl = path_length(trajectory);
  m.spl = spl(m.success, shortest_path_length, m.tl);
  m.ndtw = ndtw(resample_path(trajectory, ndtw_spacing), resample_path(reference_path, ndtw_spacing), success_radius);
  return m;
}

}  // namespace gta
