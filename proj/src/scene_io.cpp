#include "gta/scene_io.hpp"

#include "gta/json_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace gta {

using json_util::json;
namespace ju = json_util;

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
}

namespace {

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json rgb_json(const Rgb& c) { return json::array({c[0], c[1], c[2]}); }

// Prefixes a ParseError message with the source name.
template <typename F>
auto with_source(const std::string& source, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(source, 0) == 0) throw;
    throw ParseError(source + ": " + msg);
  }
}

}  // namespace

SceneSpec parse_scene(const std::string& text, const std::string& source) {
  const json doc = ju::parse_document(text, source);
  SceneSpec scene = with_source(source, [&] {
    ju::check_header(doc, "gta-scene", 1, source);
    SceneSpec s;
    s.name = ju::get_string(doc, "name", "");
    s.floor_height = ju::get_number_or(doc, "floor_height", 0.0, "");
    const auto& bounds = ju::require(doc, "bounds", "");
    s.bounds_min = ju::as_vec2(ju::require(bounds, "min", "bounds"), "bounds.min");
    s.bounds_max = ju::as_vec2(ju::require(bounds, "max", "bounds"), "bounds.max");
    if (doc.contains("floor_color")) s.floor_color = ju::as_rgb(doc["floor_color"], "floor_color");
    const auto& boxes = ju::require(doc, "boxes", "");
    if (!boxes.is_array()) throw ParseError("field 'boxes': expected an array");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const std::string path = "boxes[" + std::to_string(i) + "]";
      SceneBox b;
      b.label = ju::get_string(boxes[i], "label", path);
      b.box.min = ju::as_vec3(ju::require(boxes[i], "min", path), path + ".min");
      b.box.max = ju::as_vec3(ju::require(boxes[i], "max", path), path + ".max");
      if (boxes[i].contains("color")) b.color = ju::as_rgb(boxes[i]["color"], path + ".color");
      s.boxes.push_back(std::move(b));
    }
    return s;
  });
  try {
    scene.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return scene;
}

std::string serialize_scene(const SceneSpec& s) {
  json doc;
  doc["format"] = "gta-scene";
  doc["version"] = 1;
  doc["name"] = s.name;
  doc["floor_height"] = s.floor_height;
  doc["floor_color"] = rgb_json(s.floor_color);
  doc["bounds"] = {{"min", vec_json(s.bounds_min)}, {"max", vec_json(s.bounds_max)}};
  json boxes = json::array();
  for (const auto& b : s.boxes) {
    boxes.push_back({{"label", b.label}, {"min", vec_json(b.box.min)}, {"max", vec_json(b.box.max)},
                     {"color", rgb_json(b.color)}});
  }
  doc["boxes"] = boxes;
  return doc.dump(2) + "\n";
}

SceneSpec load_scene(const std::string& path) { return parse_scene(read_text_file(path), path); }

void save_scene(const SceneSpec& scene, const std::string& path) { write_text_file(path, serialize_scene(scene)); }

EpisodeSpec parse_episode(const std::string& text, const std::string& base_dir, double agent_radius,
                          const std::string& source, const std::string& scene_dir) {
  const json doc = ju::parse_document(text, source);
  EpisodeSpec ep = with_source(source, [&] {
    ju::check_header(doc, "gta-episode", 1, source);
    EpisodeSpec e;
    e.id = ju::get_string(doc, "id", "");
    e.scene_path = ju::get_string(doc, "scene", "");
    const auto& start = ju::require(doc, "start", "");
    e.start = AgentState(ju::get_number(start, "x", "start"), ju::get_number(start, "y", "start"),
                         ju::get_number_or(start, "theta", 0.0, "start"));
    e.goal = ju::as_vec2(ju::require(doc, "goal", ""), "goal");
    e.instruction = ju::get_string(doc, "instruction", "");
    e.success_radius = ju::get_number_or(doc, "success_radius", 3.0, "");
    e.shortest_path_length = ju::get_number(doc, "shortest_path_length", "");
    const auto& ref = ju::require(doc, "reference_path", "");
    if (!ref.is_array()) throw ParseError("field 'reference_path': expected an array");
    for (std::size_t i = 0; i < ref.size(); ++i) {
      e.reference_path.push_back(ju::as_vec2(ref[i], "reference_path[" + std::to_string(i) + "]"));
    }
    e.max_steps = ju::get_int_or(doc, "max_steps", 20, "");
    return e;
  });
  const auto scene_file = scene_dir.empty()
                              ? std::filesystem::path(base_dir) / ep.scene_path
                              : std::filesystem::path(scene_dir) / std::filesystem::path(ep.scene_path).filename();
  ep.scene = std::make_shared<const SceneSpec>(load_scene(scene_file.string()));
  try {
    ep.validate(agent_radius);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return ep;
}

std::string serialize_episode(const EpisodeSpec& e) {
  json doc;
  doc["format"] = "gta-episode";
  doc["version"] = 1;
  doc["id"] = e.id;
  doc["scene"] = e.scene_path;
  doc["start"] = {{"x", e.start.x()}, {"y", e.start.y()}, {"theta", e.start.theta()}};
  doc["goal"] = vec_json(e.goal);
  doc["instruction"] = e.instruction;
  doc["success_radius"] = e.success_radius;
  doc["shortest_path_length"] = e.shortest_path_length;
  json ref = json::array();
  for (const auto& p : e.reference_path) ref.push_back(vec_json(p));
  doc["reference_path"] = ref;
  doc["max_steps"] = e.max_steps;
  return doc.dump(2) + "\n";
}

EpisodeSpec load_episode(const std::string& path, double agent_radius) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_episode(read_text_file(path), dir, agent_radius, path);
}

void save_episode(const EpisodeSpec& episode, const std::string& path) {
  write_text_file(path, serialize_episode(episode));
}

}  // namespace gta
