#include "gta/planner.hpp"

#include "gta/action.hpp"
#include "gta/bev.hpp"
#include "gta/error.hpp"
#include "gta/json_util.hpp"
#include "gta/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gta {

using json_util::json;
namespace ju = json_util;

const std::string& ScriptedPolicy::response_for(int step) const {
  if (step >= 0 && static_cast<std::size_t>(step) < responses.size()) return responses[step];
  if (terminal == Terminal::RepeatLast && !responses.empty()) return responses.back();
  return stop_response;
}

ScriptedPolicy ScriptedPolicy::parse(const std::string& text, const std::string& source) {
  const json doc = ju::parse_document(text, source);
  try {
    ju::check_header(doc, "gta-script", 1, source);
    ScriptedPolicy p;
    if (doc.contains("plan")) {
      const auto& plan = doc["plan"];
      if (!plan.is_array()) throw ParseError("field 'plan': expected an array");
      for (std::size_t i = 0; i < plan.size(); ++i) {
        const std::string path = "plan[" + std::to_string(i) + "]";
        PlanItem item;
        item.text = ju::get_string(plan[i], "text", path);
        if (plan[i].contains("done")) {
          if (!plan[i]["done"].is_boolean()) throw ParseError("field '" + path + ".done': expected a boolean");
          item.done = plan[i]["done"].get<bool>();
        }
        p.plan.items.push_back(item);
      }
    }
    const auto& steps = ju::require(doc, "steps", "");
    if (!steps.is_array()) throw ParseError("field 'steps': expected an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string path = "steps[" + std::to_string(i) + "]";
      const int step = ju::get_int(steps[i], "step", path);
      if (step != static_cast<int>(i)) {
        throw ValidationError("field '" + path + ".step': expected " + std::to_string(i) +
                              " (scripts must cover every step in order)");
      }
      const auto& r = ju::require(steps[i], "response", path);
      p.responses.push_back(r.is_string() ? r.get<std::string>() : r.dump());
    }
    const std::string terminal = ju::get_string_or(doc, "terminal", "stop", "");
    if (terminal == "stop") p.terminal = Terminal::Stop;
    else if (terminal == "repeat-last") p.terminal = Terminal::RepeatLast;
    else throw ParseError("field 'terminal': expected \"stop\" or \"repeat-last\"");
    if (doc.contains("stop_response")) {
      const auto& r = doc["stop_response"];
      p.stop_response = r.is_string() ? r.get<std::string>() : r.dump();
    }
    return p;
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

ScriptedPolicy ScriptedPolicy::load(const std::string& path) { return parse(read_text_file(path), path); }

std::string ScriptedPolicy::serialize() const {
  json doc;
  doc["format"] = "gta-script";
  doc["version"] = 1;
  json plan_json = json::array();
  for (const auto& item : plan.items) plan_json.push_back({{"text", item.text}, {"done", item.done}});
  doc["plan"] = plan_json;
  json steps = json::array();
  for (std::size_t i = 0; i < responses.size(); ++i) steps.push_back({{"step", i}, {"response", responses[i]}});
  doc["steps"] = steps;
  doc["terminal"] = terminal == Terminal::Stop ? "stop" : "repeat-last";
  doc["stop_response"] = stop_response;
  return doc.dump(2) + "\n";
}

PlannerResponse ScriptedBackend::decide(const PlannerRequest& request) {
  return {policy_.response_for(request.step), 0.0, id()};
}

TaskPlan ScriptedBackend::decompose_instruction(const std::string&, const std::string& instruction) {
  if (instruction.empty()) throw ValidationError("cannot decompose an empty instruction");
  return policy_.plan;
}

namespace {

// Pixels closer than `radius_px` to an occupied pixel.
std::vector<std::uint8_t> dilate_occupied(const BevImage& bev, int radius_px) {
  const int w = bev.pixels.width, h = bev.pixels.height;
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius_px; dy <= radius_px; ++dy)
    for (int dx = -radius_px; dx <= radius_px; ++dx)
      if (dx * dx + dy * dy <= radius_px * radius_px) offsets.emplace_back(dx, dy);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (bev.cell(x, y) != BevCell::Occupied) continue;
      for (const auto& [dx, dy] : offsets) {
        const int xx = x + dx, yy = y + dy;
        if (xx >= 0 && yy >= 0 && xx < w && yy < h) blocked[static_cast<std::size_t>(yy) * w + xx] = 1;
      }
    }
  }
  return blocked;
}

}  // namespace

PlannerResponse GreedyBackend::decide(const PlannerRequest& request) {
  const BevImage& bev = request.prompt.bev;
  const Vec2 agent = request.privileged_agent.position();
  const double here = (agent - goal_).norm();
  PlannerResponse response{"", 0.0, id()};
  TaskPlan plan;
  plan.items.push_back({"reach goal", false});

  if (here <= config_.stop_radius) {
    plan.items[0].done = true;
    auto a = SpatialAction::stop("within stop radius of the goal");
    a.updated_plan = plan;
    response.text = to_response_json(a);
    return response;
  }

  const double mpp = bev.meters_per_pixel;
  const int w = bev.pixels.width, h = bev.pixels.height;
  const auto blocked = dilate_occupied(bev, static_cast<int>(std::ceil((config_.agent_radius + config_.margin) / mpp)));
  auto is_blocked = [&](const Vec2& p) {
    const auto px = world_to_pixel(bev, p);
    if (px.x() < 0 || px.y() < 0 || px.x() >= w || px.y() >= h) return true;
    return blocked[static_cast<std::size_t>(px.y()) * w + px.x()] != 0;
  };

  struct Candidate {
    double goal_dist;
    int x, y;
  };
  std::vector<Candidate> candidates;
  const double reach = config_.d_max - 0.05;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (bev.cell(x, y) != BevCell::Free || blocked[static_cast<std::size_t>(y) * w + x]) continue;
      const Vec2 c = pixel_center_world(bev, x, y);
      if ((c - agent).norm() > reach) continue;
      candidates.push_back({(c - goal_).norm(), x, y});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.goal_dist != b.goal_dist) return a.goal_dist < b.goal_dist;
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });

  const double skip_near_agent = config_.agent_radius + 0.15;
  for (const auto& c : candidates) {
    if (c.goal_dist > here - config_.min_progress) break;
    const Vec2 target = pixel_center_world(bev, c.x, c.y);
    const double len = (target - agent).norm();
    bool clear = true;
    for (double s = skip_near_agent; s < len && clear; s += 0.5 * mpp) {
      clear = !is_blocked(agent + (target - agent) * (s / len));
    }
    if (!clear) continue;
    const Vec2 n = world_to_bev(bev, target);
    auto a = SpatialAction::waypoint(ViewId::Bev, static_cast<int>(std::lround(std::clamp(n.x(), 0.0, 1000.0))),
                                     static_cast<int>(std::lround(std::clamp(n.y(), 0.0, 1000.0))),
                                     "move to the free cell closest to the goal");
    a.updated_plan = plan;
    response.text = to_response_json(a);
    return response;
  }
  auto a = SpatialAction::stop("no reachable cell brings the goal closer");
  a.updated_plan = plan;
  response.text = to_response_json(a);
  return response;
}

TaskPlan GreedyBackend::decompose_instruction(const std::string&, const std::string& instruction) {
  if (instruction.empty()) throw ValidationError("cannot decompose an empty instruction");
  TaskPlan plan;
  plan.items.push_back({"reach goal", false});
  return plan;
}

}  // namespace gta
