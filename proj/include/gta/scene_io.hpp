#pragma once

#include "gta/sim.hpp"

#include <string>

namespace gta {

/// Scene and episode files are versioned JSON documents; see docs/formats.md.
/// Syntax problems raise ParseError with line/column; schema problems raise
/// ParseError naming the field; invariant breaches raise ValidationError.
SceneSpec parse_scene(const std::string& text, const std::string& source = "<scene>");
std::string serialize_scene(const SceneSpec& scene);
SceneSpec load_scene(const std::string& path);
void save_scene(const SceneSpec& scene, const std::string& path);

/// The scene path is resolved relative to `base_dir`, or, when `scene_dir` is given,
/// its file name is looked up in `scene_dir`.
EpisodeSpec parse_episode(const std::string& text, const std::string& base_dir,
                          double agent_radius, const std::string& source = "<episode>",
                          const std::string& scene_dir = "");
std::string serialize_episode(const EpisodeSpec& episode);
EpisodeSpec load_episode(const std::string& path, double agent_radius = ControllerConfig{}.agent_radius);
void save_episode(const EpisodeSpec& episode, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gta
