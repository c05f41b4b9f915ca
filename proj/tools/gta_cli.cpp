// Command-line front end: run, replay, render-map, score, validate-scene.

#include "gta/error.hpp"
#include "gta/metrics.hpp"
#include "gta/planner.hpp"
#include "gta/remote.hpp"
#include "gta/replay.hpp"
#include "gta/run_config.hpp"
#include "gta/runner.hpp"
#include "gta/scene_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kInvalidInput = 3,
  kBackend = 4,
  kIo = 5,
  kReplayMismatch = 6,
};

struct ConfigError : gta::Error {
  using gta::Error::Error;
};

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw gta::IoError("cannot write " + path.string());
}

gta::RunConfig load_config(const std::string& path) {
  try {
    return gta::load_run_config(path);
  } catch (const gta::ParseError& e) {
    throw ConfigError(e.what());
  } catch (const gta::IoError& e) {
    throw ConfigError(e.what());
  }
}

gta::EpisodeSpec load_configured_episode(const gta::RunConfig& cfg, const std::string& stem) {
  const std::string path = cfg.episode_path(stem);
  const double radius = cfg.navigation().controller.agent_radius;
  const std::string base = fs::path(path).parent_path().string();
  return gta::parse_episode(gta::read_text_file(path), base.empty() ? "." : base, radius, path, cfg.scene_dir);
}

std::unique_ptr<gta::PlannerBackend> make_backend(const gta::RunConfig& cfg, const gta::EpisodeSpec& episode) {
  if (cfg.backend == "scripted") {
    return std::make_unique<gta::ScriptedBackend>(gta::ScriptedPolicy::load(cfg.script_path(episode.id)));
  }
  if (cfg.backend == "greedy") {
    gta::GreedyBackend::Config g;
    g.d_max = cfg.d_max;
    g.agent_radius = cfg.navigation().controller.agent_radius;
    return std::make_unique<gta::GreedyBackend>(episode.goal, g);
  }
  gta::RemoteConfig r = cfg.remote;
  r.apply_env_overrides();
  return std::make_unique<gta::RemoteBackend>(r);
}

std::string step_dir_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%03d", step);
  return buf;
}

void write_episode_artifacts(const fs::path& dir, const gta::EpisodeSpec& episode, const gta::EpisodeRun& run,
                             const gta::ReplayLog* log, const std::string& backend_id,
                             const std::string& digest) {
  fs::create_directories(dir / "steps");
  gta::write_text_file((dir / "trajectory.log").string(), gta::serialize_trajectory(episode.id, run.trace.trajectory));
  if (log) log->save((dir / "replay.log").string());
  gta::write_text_file((dir / "result.json").string(),
                       gta::make_report(backend_id, digest, {run.result}).to_json());
  for (const auto& st : run.trace.steps) {
    const fs::path sd = dir / "steps" / step_dir_name(st.step);
    fs::create_directories(sd);
    for (std::size_t k = 0; k < st.prompts.size(); ++k) {
      gta::write_text_file((sd / ("prompt_" + std::to_string(k) + ".txt")).string(), st.prompts[k]);
    }
    for (std::size_t k = 0; k < st.responses.size(); ++k) {
      gta::write_text_file((sd / ("response_" + std::to_string(k) + ".txt")).string(), st.responses[k]);
    }
    if (!st.bev_png.empty()) write_bytes(sd / "bev.png", st.bev_png);
  }
}

int finish_report(const gta::RunConfig& cfg, const fs::path& out, const std::string& backend_id,
                  std::vector<gta::EpisodeResult> results) {
  const auto report = gta::make_report(backend_id, cfg.digest(), std::move(results));
  fs::create_directories(out);
  gta::write_text_file((out / "report.json").string(), report.to_json());
  const std::string table = report.summary_table();
  gta::write_text_file((out / "summary.txt").string(), table);
  std::cout << table;
  for (const auto& e : report.episodes) {
    if (e.failure_code == gta::FailureCode::BackendError) return kBackend;
  }
  return kOk;
}

int cmd_run(const std::string& config_path, const std::string& backend_override, const std::string& out_override) {
  gta::RunConfig cfg = load_config(config_path);
  if (!backend_override.empty()) {
    if (backend_override != "scripted" && backend_override != "greedy" && backend_override != "remote") {
      throw ConfigError("option '--backend': expected scripted, greedy or remote");
    }
    cfg.backend = backend_override;
  }
  const fs::path out = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
  gta::NavigationConfig nav = cfg.navigation();
  nav.keep_images = true;

  std::vector<gta::EpisodeResult> results;
  std::string backend_id = cfg.backend;
  for (const auto& stem : cfg.episodes) {
    const gta::EpisodeSpec episode = load_configured_episode(cfg, stem);
    auto backend = make_backend(cfg, episode);
    gta::ReplayLog log;
    gta::RecordingBackend recorder(*backend, log);
    backend_id = recorder.id();
    const auto run = gta::run_episode(episode, recorder, nav);
    write_episode_artifacts(out / episode.id, episode, run, &log, backend_id, cfg.digest());
    results.push_back(run.result);
  }
  return finish_report(cfg, out, backend_id, std::move(results));
}

int cmd_replay(const std::string& config_path, const std::string& from, const std::string& out_override) {
  const gta::RunConfig cfg = load_config(config_path);
  const fs::path out = out_override.empty() ? fs::path(from) / "replay" : fs::path(out_override);
  gta::NavigationConfig nav = cfg.navigation();
  nav.keep_images = true;

  std::vector<gta::EpisodeResult> results;
  std::string backend_id = cfg.backend;
  bool identical = true;
  for (const auto& stem : cfg.episodes) {
    const gta::EpisodeSpec episode = load_configured_episode(cfg, stem);
    const fs::path recorded = fs::path(from) / episode.id;
    gta::ReplayLog log = gta::ReplayLog::load((recorded / "replay.log").string());
    backend_id = log.backend_id;
    gta::ReplayBackend backend(std::move(log));
    const auto run = gta::run_episode(episode, backend, nav);
    write_episode_artifacts(out / episode.id, episode, run, nullptr, backend_id, cfg.digest());
    const std::string original = gta::read_text_file((recorded / "trajectory.log").string());
    const std::string again = gta::serialize_trajectory(episode.id, run.trace.trajectory);
    if (original != again) {
      std::cerr << "replay: trajectory of " << episode.id << " differs from the recording\n";
      identical = false;
    }
    results.push_back(run.result);
  }
  const int code = finish_report(cfg, out, backend_id, std::move(results));
  if (!identical) return kReplayMismatch;
  return code;
}

int cmd_render_map(const std::string& config_path, const std::string& episode_stem, const std::string& out_dir) {
  gta::RunConfig cfg = load_config(config_path);
  if (cfg.backend == "remote") cfg.backend = "scripted";
  gta::NavigationConfig nav = cfg.navigation();
  nav.keep_images = true;
  const gta::EpisodeSpec episode = load_configured_episode(cfg, episode_stem);
  auto backend = make_backend(cfg, episode);
  const auto run = gta::run_episode(episode, *backend, nav);
  fs::create_directories(out_dir);
  for (const auto& st : run.trace.steps) {
    write_bytes(fs::path(out_dir) / (step_dir_name(st.step) + "_bev.png"), st.bev_png);
  }
  std::cout << "wrote " << run.trace.steps.size() << " map(s) to " << out_dir << '\n';
  return kOk;
}

int cmd_score(const std::string& trajectory_path, const std::string& episode_path) {
  const gta::EpisodeSpec episode = gta::load_episode(episode_path);
  const auto traj = gta::parse_trajectory(gta::read_text_file(trajectory_path));
  std::vector<gta::Vec2> pts;
  for (const auto& p : traj) pts.push_back(p.state.position());
  const auto m = gta::score_trajectory(pts, episode.goal, episode.success_radius, episode.shortest_path_length,
                                       episode.reference_path);
  nlohmann::json doc = {{"episode", episode.id}, {"success", m.success}, {"oracle_success", m.oracle_success},
                        {"ne", m.ne},            {"tl", m.tl},           {"spl", m.spl},
                        {"ndtw", m.ndtw}};
  std::cout << doc.dump(2) << '\n';
  return kOk;
}

int cmd_validate_scene(const std::vector<std::string>& paths) {
  int code = kOk;
  for (const auto& p : paths) {
    try {
      const auto scene = gta::load_scene(p);
      std::cout << p << ": ok (" << scene.name << ", " << scene.boxes.size() << " boxes)\n";
    } catch (const gta::IoError& e) {
      std::cerr << p << ": " << e.what() << '\n';
      code = kIo;
    } catch (const gta::Error& e) {
      std::cerr << p << ": " << e.what() << '\n';
      if (code == kOk) code = kInvalidInput;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gta: vision-and-language navigation with a TSDF map and a spatial-reasoning planner"};
  app.require_subcommand(1);

  std::string config, backend, out, from, episode, trajectory;
  std::vector<std::string> scenes;

  auto* run = app.add_subcommand("run", "Run the episodes listed in a configuration file");
  run->add_option("-c,--config,--episodes", config, "Run configuration (gta-run JSON)")->required();
  run->add_option("-b,--backend", backend, "Override the configured backend");
  run->add_option("-o,--out", out, "Override the output directory");

  auto* replay = app.add_subcommand("replay", "Re-run recorded episodes from their replay logs");
  replay->add_option("-c,--config", config, "Run configuration used for the recording")->required();
  replay->add_option("--from", from, "Output directory of the recorded run")->required();
  replay->add_option("-o,--out", out, "Where to write the replayed artifacts");

  auto* render = app.add_subcommand("render-map", "Export the bev map of every step of one episode");
  render->add_option("-c,--config", config, "Run configuration")->required();
  render->add_option("-e,--episode", episode, "Episode name from the configuration")->required();
  render->add_option("-o,--out", out, "Output directory")->required();

  auto* score = app.add_subcommand("score", "Recompute metrics from a trajectory log");
  score->add_option("-t,--trajectory", trajectory, "trajectory.log")->required();
  score->add_option("-e,--episode", episode, "Episode file")->required();

  auto* validate = app.add_subcommand("validate-scene", "Check scene files");
  validate->add_option("scenes", scenes, "Scene files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config, backend, out);
    if (*replay) return cmd_replay(config, from, out);
    if (*render) return cmd_render_map(config, episode, out);
    if (*score) return cmd_score(trajectory, episode);
    if (*validate) return cmd_validate_scene(scenes);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const gta::BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const gta::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const gta::ParseError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const gta::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
