#include "gta/run_config.hpp"

#include "gta/error.hpp"
#include "gta/json_util.hpp"
#include "gta/replay.hpp"
#include "gta/scene_io.hpp"

#include <filesystem>
#include <set>

namespace gta {

namespace fs = std::filesystem;
using json_util::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ParseError("unknown key '" + json_util::key_path(path, key) + "'");
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source_dir, const std::string& source) {
  using namespace json_util;
  const json doc = parse_document(text, source);
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  reject_unknown(doc,
                 {"format", "version", "scene_dir", "episode_dir", "script_dir", "episodes", "backend", "thresholds",
                  "max_steps", "seed", "output_dir", "remote"},
                 "");
  check_header(doc, "gta-run", 1, source);

  RunConfig c;
  c.source_dir = source_dir;
  c.scene_dir = resolve(source_dir, get_string_or(doc, "scene_dir", "", ""));
  c.episode_dir = resolve(source_dir, get_string_or(doc, "episode_dir", ".", ""));
  c.script_dir = resolve(source_dir, get_string_or(doc, "script_dir", ".", ""));
  c.output_dir = resolve(source_dir, get_string_or(doc, "output_dir", "out", ""));
  c.backend = get_string_or(doc, "backend", "scripted", "");
  if (c.backend != "scripted" && c.backend != "greedy" && c.backend != "remote") {
    throw ParseError("field 'backend': expected scripted, greedy or remote, got '" + c.backend + "'");
  }

  const json& eps = require(doc, "episodes", "");
  if (!eps.is_array() || eps.empty()) throw ParseError("field 'episodes': expected a nonempty array of names");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!eps[i].is_string() || eps[i].get<std::string>().empty()) {
      throw ParseError("field 'episodes[" + std::to_string(i) + "]': expected a nonempty string");
    }
    c.episodes.push_back(eps[i].get<std::string>());
  }

  if (doc.contains("thresholds")) {
    const json& t = doc["thresholds"];
    if (!t.is_object()) throw ParseError("field 'thresholds': expected an object");
    reject_unknown(t, {"delta_merge", "tau_loop", "delta_s", "d_max"}, "thresholds");
    c.delta_merge = get_number_or(t, "delta_merge", c.delta_merge, "thresholds");
    c.tau_loop = get_int_or(t, "tau_loop", c.tau_loop, "thresholds");
    c.delta_s = get_number_or(t, "delta_s", c.delta_s, "thresholds");
    c.d_max = get_number_or(t, "d_max", c.d_max, "thresholds");
  }
  c.max_steps = get_int_or(doc, "max_steps", 0, "");
  if (c.max_steps < 0) throw ParseError("field 'max_steps': must be >= 0");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ParseError("field 'seed': expected a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("remote")) {
    const json& r = doc["remote"];
    if (!r.is_object()) throw ParseError("field 'remote': expected an object");
    reject_unknown(r, {"endpoint", "auth_token", "timeout", "max_retries", "backoff_base"}, "remote");
    c.remote.endpoint = get_string_or(r, "endpoint", "", "remote");
    c.remote.auth_token = get_string_or(r, "auth_token", "", "remote");
    c.remote.timeout = get_number_or(r, "timeout", c.remote.timeout, "remote");
    c.remote.max_retries = get_int_or(r, "max_retries", c.remote.max_retries, "remote");
    c.remote.backoff_base = get_number_or(r, "backoff_base", c.remote.backoff_base, "remote");
  }

  try {
    c.navigation().validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("field 'thresholds': ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const std::string dir = fs::path(path).parent_path().string();
  return parse_run_config(read_text_file(path), dir.empty() ? "." : dir, path);
}

NavigationConfig RunConfig::navigation() const {
  NavigationConfig n;
  n.memory.delta_merge = delta_merge;
  n.memory.tau_loop = tau_loop;
  n.views.delta_s = delta_s;
  n.controller.d_max = d_max;
  n.max_steps = max_steps;
  return n;
}

std::string RunConfig::episode_path(const std::string& stem) const {
  return (fs::path(episode_dir) / (stem + ".episode")).string();
}

std::string RunConfig::script_path(const std::string& episode_id) const {
  return (fs::path(script_dir) / (episode_id + ".script")).string();
}

std::string RunConfig::canonical_json(bool include_output) const {
  json doc;
  doc["format"] = "gta-run";
  doc["version"] = 1;
  doc["backend"] = backend;
  doc["episodes"] = episodes;
  doc["thresholds"] = {{"delta_merge", delta_merge}, {"tau_loop", tau_loop}, {"delta_s", delta_s}, {"d_max", d_max}};
  doc["max_steps"] = max_steps;
  doc["seed"] = seed;
  if (backend == "remote") doc["remote"] = {{"endpoint", remote.endpoint}};
  if (include_output) doc["output_dir"] = output_dir;
  return doc.dump();
}

std::string RunConfig::digest() const { return sha256_hex(canonical_json(false)); }

}  // namespace gta
