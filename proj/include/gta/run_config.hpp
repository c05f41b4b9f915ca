#pragma once

#include "gta/remote.hpp"
#include "gta/runner.hpp"

#include <string>
#include <vector>

namespace gta {

/// Contents of a "gta-run" configuration file. Relative directories are resolved
/// against the directory holding the file.
struct RunConfig {
  std::string source_dir;
  std::string scene_dir;  // empty: scenes resolve relative to each episode file
  std::string episode_dir;
  std::string script_dir;
  std::vector<std::string> episodes;  // episode file stems inside episode_dir
  std::string backend = "scripted";   // scripted | greedy | remote
  double delta_merge = 0.8;
  int tau_loop = 3;
  double delta_s = 0.5;
  double d_max = 3.0;
  int max_steps = 0;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  RemoteConfig remote;

  /// Navigation parameters with the configured thresholds applied.
  NavigationConfig navigation() const;
  std::string episode_path(const std::string& stem) const;
  std::string script_path(const std::string& episode_id) const;
  /// SHA-256 of the canonical JSON form, excluding the output directory.
  std::string digest() const;
  std::string canonical_json(bool include_output) const;
};

/// Unknown keys and ill-typed values raise ParseError naming the key.
RunConfig parse_run_config(const std::string& text, const std::string& source_dir,
                           const std::string& source = "<run-config>");
RunConfig load_run_config(const std::string& path);

}  // namespace gta
