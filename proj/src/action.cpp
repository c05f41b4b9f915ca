#include "gta/action.hpp"

#include "gta/error.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace gta {

using nlohmann::json;

const char* to_string(ViewId v) {
  switch (v) {
    case ViewId::Bev: return "bev";
    case ViewId::Ego0: return "ego_0";
    case ViewId::Ego1: return "ego_1";
    case ViewId::Ego2: return "ego_2";
    case ViewId::Ego3: return "ego_3";
  }
  return "?";
}

std::optional<ViewId> parse_view_id(const std::string& s) {
  for (ViewId v : {ViewId::Bev, ViewId::Ego0, ViewId::Ego1, ViewId::Ego2, ViewId::Ego3}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

int ego_index(ViewId v) {
  switch (v) {
    case ViewId::Ego0: return 0;
    case ViewId::Ego1: return 1;
    case ViewId::Ego2: return 2;
    case ViewId::Ego3: return 3;
    default: return -1;
  }
}

SpatialAction SpatialAction::waypoint(ViewId view, int u, int v, std::string thought) {
  SpatialAction a;
  a.kind = Kind::Waypoint;
  a.view = view;
  a.u = u;
  a.v = v;
  a.thought = std::move(thought);
  return a;
}

SpatialAction SpatialAction::stop(std::string thought) {
  SpatialAction a;
  a.thought = std::move(thought);
  return a;
}

std::string SpatialAction::describe() const {
  if (kind == Kind::Stop) return "stop";
  std::ostringstream out;
  out << "waypoint(" << to_string(view) << ", " << u << ", " << v << ")";
  return out.str();
}

std::string to_response_json(const SpatialAction& a) {
  json doc;
  doc["thought"] = a.thought;
  json todo = json::array();
  if (a.updated_plan) {
    for (const auto& item : a.updated_plan->items) todo.push_back({{"text", item.text}, {"done", item.done}});
  }
  doc["todo"] = todo;
  if (a.kind == SpatialAction::Kind::Stop) {
    doc["action"] = {{"type", "stop"}};
  } else {
    doc["action"] = {{"type", "waypoint"}, {"view", to_string(a.view)}, {"u", a.u}, {"v", a.v}};
  }
  return doc.dump();
}

namespace {

constexpr std::size_t kMaxResponseBytes = 1 << 20;
constexpr int kMaxObjectStarts = 64;  // bounds the scan cost on brace-heavy input

// End index (inclusive) of the balanced object opening at `open`, honoring JSON strings.
std::optional<std::size_t> matching_brace(const std::string& s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::nullopt;
}

json extract_object(const std::string& text) {
  if (text.size() > kMaxResponseBytes) throw ParseError("response exceeds " + std::to_string(kMaxResponseBytes) + " bytes");
  int starts = 0;
  for (std::size_t pos = text.find('{'); pos != std::string::npos && starts < kMaxObjectStarts;
       pos = text.find('{', pos + 1), ++starts) {
    const auto end = matching_brace(text, pos);
    if (!end) continue;
    json doc = json::parse(text.begin() + static_cast<std::ptrdiff_t>(pos),
                           text.begin() + static_cast<std::ptrdiff_t>(*end) + 1, nullptr, false);
    if (doc.is_object()) return doc;
  }
  throw ParseError("no JSON object found in response");
}

TaskPlan parse_todo(const json& todo) {
  if (!todo.is_array()) throw ValidationError("'todo' must be an array");
  TaskPlan plan;
  for (const auto& item : todo) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string()) {
      throw ValidationError("'todo' items need a string 'text'");
    }
    PlanItem p;
    p.text = item["text"].get<std::string>();
    if (item.contains("done")) {
      if (!item["done"].is_boolean()) throw ValidationError("'todo[].done' must be a boolean");
      p.done = item["done"].get<bool>();
    }
    plan.items.push_back(std::move(p));
  }
  return plan;
}

int coordinate(const json& action, const char* key) {
  if (!action.contains(key) || !action[key].is_number()) {
    throw ValidationError(std::string("waypoint action needs numeric '") + key + "'");
  }
  const double value = action[key].get<double>();
  if (!std::isfinite(value) || value < 0.0 || value > 1000.0) {
    throw ValidationError(std::string("'") + key + "' outside [0, 1000]");
  }
  return static_cast<int>(std::lround(value));
}

}  // namespace

SpatialAction parse_action(const std::string& response) {
  const json doc = extract_object(response);
  SpatialAction out;
  if (doc.contains("thought")) {
    if (!doc["thought"].is_string()) throw ValidationError("'thought' must be a string");
    out.thought = doc["thought"].get<std::string>();
  }
  if (doc.contains("todo")) out.updated_plan = parse_todo(doc["todo"]);
  if (!doc.contains("action") || !doc["action"].is_object()) throw ValidationError("missing 'action' object");
  const json& action = doc["action"];
  if (!action.contains("type") || !action["type"].is_string()) throw ValidationError("'action.type' must be a string");
  const std::string type = action["type"].get<std::string>();
  if (type == "stop") {
    out.kind = SpatialAction::Kind::Stop;
    return out;
  }
  if (type != "waypoint") throw ValidationError("unknown action type '" + type + "'");
  out.kind = SpatialAction::Kind::Waypoint;
  if (!action.contains("view") || !action["view"].is_string()) throw ValidationError("'action.view' must be a string");
  const auto view = parse_view_id(action["view"].get<std::string>());
  if (!view) throw ValidationError("unknown view id '" + action["view"].get<std::string>() + "'");
  out.view = *view;
  out.u = coordinate(action, "u");
  out.v = coordinate(action, "v");
  return out;
}

TaskPlan parse_plan_response(const std::string& response) {
  const json doc = extract_object(response);
  if (!doc.contains("todo")) throw ValidationError("decomposition response has no 'todo'");
  return parse_todo(doc["todo"]);
}

GroundedWaypoint ground_action(const SpatialAction& action, const std::array<const RgbdFrame*, 4>& views,
                               const BevImage& bev, const TsdfVolume& volume, const GroundingContext& ctx) {
  if (action.kind != SpatialAction::Kind::Waypoint) throw ValidationError("only waypoint actions can be grounded");
  GroundedWaypoint g;
  Vec2 target;
  if (action.view == ViewId::Bev) {
    target = bev_pixel_to_world(bev, Vec2(action.u, action.v));
    g.surface_hit = Vec3(target.x(), target.y(), ctx.floor_height);
    g.floor_point = target;
  } else {
    const RgbdFrame* frame = views.at(static_cast<std::size_t>(ego_index(action.view)));
    if (frame == nullptr) throw GroundingError(std::string("view ") + to_string(action.view) + " is not available");
    const auto& k = ctx.intrinsics;
    const Vec2 pixel(action.u / 1000.0 * (k.width - 1), action.v / 1000.0 * (k.height - 1));
    const Pose3 cam = frame->camera_pose(ctx.rig);
    const Ray ray(cam.translation(), cam.rotation() * back_project(pixel, 1.0, k));
    const auto hit = volume.raycast(ray, ctx.max_range);
    if (!hit) throw GroundingError(std::string("no mapped surface along ") + action.describe());
    g.surface_hit = *hit;
    g.floor_point = hit->head<2>();
    target = g.floor_point;
    const Vec2 horizontal = ray.direction().head<2>();
    if (horizontal.norm() > 1e-9) {
      const double reach = (g.floor_point - cam.translation().head<2>()).norm();
      const double pull = std::min(ctx.clearance_factor * ctx.agent_radius, reach);
      target -= horizontal.normalized() * pull;
    }
  }

  const Vec2 agent = ctx.agent.position();
  const double dist = (target - agent).norm();
  if (dist > ctx.d_max) {
    target = agent + (target - agent) * (ctx.d_max / dist);
    g.clamped = true;
  }
  if (!volume.column_observed(target.x(), target.y(), ctx.floor_height - 1.0, ctx.floor_height + 1.5)) {
    throw GroundingError("grounded waypoint lies in unobserved space");
  }
  g.waypoint = Vec3(target.x(), target.y(), ctx.floor_height);
  return g;
}

}  // namespace gta
