#pragma once

#include "gta/bev.hpp"
#include "gta/frame.hpp"
#include "gta/image.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gta {

struct ViewSelectConfig {
  double delta_s = 0.5;  // meters
  void validate() const;
};

/// Cardinal directions of the four egocentric views, measured clockwise from the
/// agent heading: ego_0 front, ego_1 right, ego_2 back, ego_3 left.
inline constexpr std::array<double, 4> kCardinalAngles{0.0, kPi / 2, kPi, 3 * kPi / 2};
inline constexpr std::array<const char*, 4> kEgoNames{"front", "right", "back", "left"};

/// World yaw targeted by ego view k for an agent heading `theta`.
double ego_view_yaw(double theta, int k);

/// For each cardinal direction, the index of the frame captured within delta_s of
/// the agent whose optical axis is angularly closest to it; ties go to the newest
/// frame. Throws CoverageError when no frame is close enough.
std::array<std::size_t, 4> select_orthogonal_views(const std::vector<RgbdFrame>& frames, const AgentState& now,
                                                   const ViewSelectConfig& config);

/// Copy of `image` with the normalized [0,1000]^2 grid drawn on top.
RgbImage annotate_grid(const RgbImage& image);

struct PlanItem {
  std::string text;
  bool done = false;
  bool operator==(const PlanItem&) const = default;
};

/// Ordered checklist. Items are never removed and done flags never revert.
struct TaskPlan {
  std::vector<PlanItem> items;

  /// Applies a planner's revised checklist: matching items (by text) take the OR of
  /// their done flags, items missing from `update` are kept, new items are appended.
  TaskPlan merged_with(const TaskPlan& update) const;
  bool operator==(const TaskPlan&) const = default;
};

struct HistoryEntry {
  int step = 0;
  std::string thought;
  std::string view;    // "bev", "ego_0".., or "-" when no view was used
  std::string action;  // compact action description
  bool success = true;
};

struct HistoryLog {
  std::vector<HistoryEntry> entries;
  std::size_t window = 5;

  void push(HistoryEntry e) { entries.push_back(std::move(e)); }
  /// The most recent `window` entries, oldest first.
  std::vector<HistoryEntry> recent() const;
};

struct PromptBundle {
  std::string episode_id;
  int step = 0;
  BevImage bev;
  std::array<RgbImage, 4> ego;  // grid-annotated, ego_0..ego_3
  std::string task_block;
  std::string state_block;
  std::string history_block;
  std::string instruction_block;

  /// Full prompt text in the documented layout (docs/formats.md).
  std::string text() const;
};

/// Safety alert texts injected into the state block.
namespace alerts {
inline constexpr const char* kActionFailed = "WARNING: Previous action failed (collision before reaching the waypoint)";
inline constexpr const char* kHorizonExceeded = "WARNING: Waypoint exceeded the planning horizon and was clamped to d_max";
inline constexpr const char* kParseFailed = "WARNING: Previous response could not be parsed; reply with one JSON object in the documented schema";
inline constexpr const char* kInvalidAction = "WARNING: Previous response had an invalid action (view id or coordinates out of range)";
inline constexpr const char* kGroundingFailed = "WARNING: Selected point lies in unknown space; choose a visible surface";
}  // namespace alerts

/// Escapes backslashes and line breaks so every text field stays on one line.
std::string escape_line(const std::string& s);

std::string render_plan(const TaskPlan& plan);
std::string render_history(const HistoryLog& history);

PromptBundle assemble_prompt(const std::string& episode_id, int step, BevImage bev,
                             const std::array<RgbImage, 4>& ego_views, const TaskPlan& plan,
                             const std::string& topo_summary, const HistoryLog& history,
                             const std::string& instruction, const std::vector<std::string>& alerts);

/// Text of the instruction-decomposition request sent on step 0.
std::string decomposition_prompt(const std::string& episode_id, const std::string& instruction);

}  // namespace gta
