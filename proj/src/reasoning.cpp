#include "gta/reasoning.hpp"

#include "gta/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gta {

void ViewSelectConfig::validate() const {
  if (!(delta_s > 0.0)) throw ValidationError("delta_s must be positive");
}

double ego_view_yaw(double theta, int k) { return normalize_angle(theta - kCardinalAngles.at(k)); }

std::array<std::size_t, 4> select_orthogonal_views(const std::vector<RgbdFrame>& frames, const AgentState& now,
                                                   const ViewSelectConfig& config) {
  constexpr double kTieTolerance = 1e-9;
  std::array<std::size_t, 4> out{};
  for (int k = 0; k < 4; ++k) {
    const double target = ego_view_yaw(now.theta(), k);
    std::optional<std::size_t> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      if ((f.agent_state.position() - now.position()).norm() >= config.delta_s) continue;
      const double err = angular_distance(f.world_yaw(), target);
      const bool take = !best || err < best_err - kTieTolerance ||
                        (std::abs(err - best_err) <= kTieTolerance && f.timestamp > frames[*best].timestamp);
      if (take) {
        best = i;
        best_err = err;
      }
    }
    if (!best) {
      throw CoverageError(std::string("no frame within delta_s for the ") + kEgoNames[k] + " view");
    }
    out[k] = *best;
  }
  return out;
}

RgbImage annotate_grid(const RgbImage& image) {
  if (image.empty()) throw ShapeError("annotate_grid: empty image");
  RgbImage out = image;
  draw::normalized_grid(out);
  return out;
}

TaskPlan TaskPlan::merged_with(const TaskPlan& update) const {
  TaskPlan out = *this;
  for (const auto& item : update.items) {
    bool matched = false;
    for (auto& existing : out.items) {
      if (existing.text == item.text) {
        existing.done = existing.done || item.done;
        matched = true;
        break;
      }
    }
    if (!matched) out.items.push_back(item);
  }
  return out;
}

std::vector<HistoryEntry> HistoryLog::recent() const {
  const std::size_t n = std::min(window, entries.size());
  return {entries.end() - static_cast<std::ptrdiff_t>(n), entries.end()};
}

std::string escape_line(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_plan(const TaskPlan& plan) {
  if (plan.items.empty()) return "(empty plan)\n";
  std::ostringstream out;
  for (std::size_t i = 0; i < plan.items.size(); ++i) {
    out << i + 1 << ". [" << (plan.items[i].done ? 'x' : ' ') << "] " << escape_line(plan.items[i].text) << '\n';
  }
  return out.str();
}

std::string render_history(const HistoryLog& history) {
  const auto recent = history.recent();
  if (recent.empty()) return "(no history)\n";
  std::ostringstream out;
  for (const auto& e : recent) {
    out << "step " << e.step << " | view " << escape_line(e.view) << " | action " << escape_line(e.action)
        << " | outcome " << (e.success ? "ok" : "failed") << " | thought: " << escape_line(e.thought) << '\n';
  }
  return out.str();
}

namespace {

constexpr const char* kResponseFormat =
    "Reply with exactly one JSON object:\n"
    "{\"thought\": string, \"todo\": [{\"text\": string, \"done\": bool}], "
    "\"action\": {\"type\": \"waypoint\" | \"stop\", \"view\": \"bev\" | \"ego_0\" | \"ego_1\" | \"ego_2\" | "
    "\"ego_3\", \"u\": 0-1000, \"v\": 0-1000}}\n";

}  // namespace

PromptBundle assemble_prompt(const std::string& episode_id, int step, BevImage bev,
                             const std::array<RgbImage, 4>& ego_views, const TaskPlan& plan,
                             const std::string& topo_summary, const HistoryLog& history,
                             const std::string& instruction, const std::vector<std::string>& alerts) {
  PromptBundle b;
  b.episode_id = episode_id;
  b.step = step;
  b.bev = std::move(bev);
  for (int k = 0; k < 4; ++k) b.ego[k] = annotate_grid(ego_views[k]);
  b.task_block = render_plan(plan);

  std::ostringstream state;
  state << topo_summary;
  if (!topo_summary.empty() && topo_summary.back() != '\n') state << '\n';
  state << "alerts:";
  for (const auto& a : alerts) state << "\n! " << escape_line(a);
  state << '\n';
  b.state_block = state.str();

  b.history_block = render_history(history);
  b.instruction_block = escape_line(instruction) + "\n";
  return b;
}

std::string PromptBundle::text() const {
  std::ostringstream out;
  out << "GTA-PROMPT 1\n";
  out << "episode: " << escape_line(episode_id) << '\n';
  out << "step: " << step << '\n';
  out << "images: bev " << bev.pixels.width << 'x' << bev.pixels.height;
  for (int k = 0; k < 4; ++k) out << ", ego_" << k << ' ' << ego[k].width << 'x' << ego[k].height;
  out << '\n';
  out << "views: ego_0=front, ego_1=right, ego_2=back, ego_3=left; every image carries a normalized "
         "0-1000 grid (u to the right, v downward)\n";
  out << "[TASK PLAN]\n" << task_block;
  out << "[STATE]\n" << state_block;
  out << "[HISTORY]\n" << history_block;
  out << "[INSTRUCTION]\n" << instruction_block;
  out << "[RESPONSE FORMAT]\n" << kResponseFormat;
  return out.str();
}

std::string decomposition_prompt(const std::string& episode_id, const std::string& instruction) {
  std::ostringstream out;
  out << "GTA-DECOMPOSE 1\n";
  out << "episode: " << escape_line(episode_id) << '\n';
  out << "[INSTRUCTION]\n" << escape_line(instruction) << '\n';
  out << "[REQUEST]\nBreak the instruction into an ordered checklist of navigation sub-goals. "
         "Put the checklist in \"todo\" and use action type \"stop\".\n";
  out << "[RESPONSE FORMAT]\n" << kResponseFormat;
  return out.str();
}

}  // namespace gta
