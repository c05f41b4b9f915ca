#include "gta/runner.hpp"

#include "gta/action.hpp"
#include "gta/error.hpp"
#include "gta/tsdf.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace gta {

void NavigationConfig::validate() const {
  memory.validate();
  views.validate();
  controller.validate();
  sensor.intrinsics.validate();
  sensor.rig.validate();
  if (!(voxel_size > 0.0)) throw ValidationError("voxel_size must be positive");
  if (!(volume_height > 0.0)) throw ValidationError("volume_height must be positive");
  if (max_steps < 0) throw ValidationError("max_steps must be >= 0");
  if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
  if (!(fallback_probe > 0.0) || fallback_probe > controller.d_max) {
    throw ValidationError("fallback_probe must be in (0, d_max]");
  }
}

const char* to_string(FailureCode code) {
  switch (code) {
    case FailureCode::None: return "none";
    case FailureCode::MaxSteps: return "max-steps";
    case FailureCode::BackendError: return "backend-error";
    case FailureCode::Stuck: return "stuck";
  }
  return "?";
}

namespace {

std::vector<Vec2> positions(const std::vector<PathPoint>& path) {
  std::vector<Vec2> out;
  out.reserve(path.size());
  for (const auto& p : path) out.push_back(p.state.position());
  return out;
}

}  // namespace

EpisodeRun run_episode(const EpisodeSpec& episode, PlannerBackend& backend, const NavigationConfig& cfg) {
  cfg.validate();
  if (!episode.scene) throw ValidationError("episode has no scene");
  const SceneSpec& scene = *episode.scene;
  const double floor = scene.floor_height;
  const int max_steps = cfg.max_steps > 0 ? cfg.max_steps : episode.max_steps;

  TsdfVolume volume = TsdfVolume::covering(
      Vec3(scene.bounds_min.x() - 0.2, scene.bounds_min.y() - 0.2, floor - 0.2),
      Vec3(scene.bounds_max.x() + 0.2, scene.bounds_max.y() + 0.2, floor + cfg.volume_height), cfg.voxel_size);

  EpisodeRun run;
  EpisodeResult& result = run.result;
  EpisodeTrace& trace = run.trace;
  result.episode_id = episode.id;

  AgentState agent = episode.start;
  double clock = 0.0;
  trace.trajectory.push_back({clock, agent});
  std::vector<RgbdFrame> frames;
  std::vector<Vec2> trail{agent.position()};
  std::vector<Vec2> past_waypoints;
  HistoryLog history;
  std::vector<std::string> pending_alerts;
  int stuck_count = 0;

  TaskPlan plan;
  try {
    plan = backend.decompose_instruction(episode.id, episode.instruction);
  } catch (const BackendError& e) {
    result.failure_code = FailureCode::BackendError;
    result.failure_detail = e.what();
  } catch (const ParseError&) {
    plan.items.push_back({episode.instruction, false});
  } catch (const ValidationError&) {
    plan.items.push_back({episode.instruction, false});
  }

  GroundingContext ground;
  ground.intrinsics = cfg.sensor.intrinsics;
  ground.rig = cfg.sensor.rig;
  ground.floor_height = floor;
  ground.d_max = cfg.controller.d_max;
  ground.agent_radius = cfg.controller.agent_radius;
  ground.max_range = cfg.sensor.max_depth;

  int step = 0;
  while (result.failure_code == FailureCode::None) {
    if ((agent.position() - episode.goal).norm() <= cfg.arrival_epsilon) break;
    if (step >= max_steps) {
      result.failure_code = FailureCode::MaxSteps;
      break;
    }

    // Perception: rotation scan fused into the map.
    auto scan = capture_rotation_scan(scene, agent, cfg.sensor, clock);
    clock += scan.size() * cfg.sensor.frame_interval;
    for (auto& f : scan) {
      volume.integrate(f, cfg.sensor.intrinsics, cfg.sensor.rig);
      frames.push_back(std::move(f));
    }

    // Memory.
    trace.graph.observe_pose(Vec3(agent.x(), agent.y(), floor), cfg.memory);
    const std::string summary = state_summary(trace.graph, cfg.memory);

    // Prompt.
    const auto selected = select_orthogonal_views(frames, agent, cfg.views);
    std::array<const RgbdFrame*, 4> views{};
    std::array<RgbImage, 4> ego;
    for (int k = 0; k < 4; ++k) {
      views[k] = &frames[selected[k]];
      ego[k] = views[k]->color;
    }
    const BevImage bev = render_bev(volume, floor, agent, trail, past_waypoints, cfg.bev);
    ground.agent = agent;

    StepTrace st;
    st.step = step;
    st.alerts = pending_alerts;
    std::vector<std::string> alerts = pending_alerts;
    std::optional<SpatialAction> action;
    std::optional<GroundedWaypoint> target;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      PlannerRequest request;
      request.episode_id = episode.id;
      request.step = step;
      request.attempt = attempt;
      request.prompt = assemble_prompt(episode.id, step, bev, ego, plan, summary, history, episode.instruction, alerts);
      request.privileged_agent = agent;
      if (cfg.keep_images && attempt == 0) {
        st.bev_png = encode_png(request.prompt.bev.pixels);
        for (int k = 0; k < 4; ++k) st.ego_png[k] = encode_png(request.prompt.ego[k]);
      }
      st.prompts.push_back(request.prompt.text());
      PlannerResponse response;
      try {
        response = backend.decide(request);
      } catch (const BackendError& e) {
        result.failure_code = FailureCode::BackendError;
        result.failure_detail = e.what();
        break;
      }
      st.responses.push_back(response.text);

      alerts = pending_alerts;
      try {
        SpatialAction parsed = parse_action(response.text);
        if (parsed.kind == SpatialAction::Kind::Waypoint) target = ground_action(parsed, views, bev, volume, ground);
        action = std::move(parsed);
        break;
      } catch (const ParseError&) {
        alerts.push_back(alerts::kParseFailed);
      } catch (const ValidationError&) {
        alerts.push_back(alerts::kInvalidAction);
      } catch (const BoundsError&) {
        alerts.push_back(alerts::kInvalidAction);
      } catch (const GroundingError&) {
        alerts.push_back(alerts::kGroundingFailed);
      }
    }
    if (result.failure_code == FailureCode::BackendError) {
      trace.steps.push_back(std::move(st));
      ++step;
      break;
    }

    if (action && action->updated_plan) plan = plan.merged_with(*action->updated_plan);

    HistoryEntry entry;
    entry.step = step;
    if (action && action->kind == SpatialAction::Kind::Stop) {
      entry.thought = action->thought;
      entry.view = "-";
      entry.action = "stop";
      history.push(entry);
      st.action = "stop";
      trace.steps.push_back(std::move(st));
      ++step;
      break;
    }

    Vec2 waypoint;
    pending_alerts.clear();
    if (action) {
      waypoint = target->waypoint.head<2>();
      entry.thought = action->thought;
      entry.view = to_string(action->view);
      entry.action = action->describe();
      if (target->clamped) pending_alerts.push_back(alerts::kHorizonExceeded);
    } else {
      waypoint = agent.position() + cfg.fallback_probe * Vec2(std::cos(agent.theta()), std::sin(agent.theta()));
      entry.thought = "(no valid response; forward probe)";
      entry.view = "-";
      entry.action = "fallback-forward";
      st.fallback = true;
    }
    st.action = entry.action;

    const Vec2 before = agent.position();
    const auto exec = execute_waypoint(scene, agent, waypoint, cfg.controller, clock);
    for (const auto& p : exec.path) trace.trajectory.push_back(p);
    if (!exec.path.empty()) clock = exec.path.back().t;
    agent = exec.state;
    trail.push_back(agent.position());
    past_waypoints.push_back(waypoint);
    entry.success = exec.reached;
    if (!exec.reached) pending_alerts.push_back(alerts::kActionFailed);
    history.push(entry);
    trace.steps.push_back(std::move(st));
    ++step;

    if ((agent.position() - before).norm() < cfg.stuck_distance) {
      if (++stuck_count >= cfg.stuck_steps) result.failure_code = FailureCode::Stuck;
    } else {
      stuck_count = 0;
    }
  }

  trace.final_plan = plan;
  result.steps = step;
  const auto m = score_trajectory(positions(trace.trajectory), episode.goal, episode.success_radius,
                                  episode.shortest_path_length, episode.reference_path);
  result.success = m.success;
  result.oracle_success = m.oracle_success;
  result.ne = m.ne;
  result.tl = m.tl;
  result.spl = m.spl;
  result.ndtw = m.ndtw;
  return run;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_trajectory(const std::string& episode_id, const std::vector<PathPoint>& trajectory) {
  std::ostringstream out;
  out << "# gta-trajectory 1\n";
  out << "# episode " << episode_id << '\n';
  for (const auto& p : trajectory) {
    out << fmt17(p.t) << ' ' << fmt17(p.state.x()) << ' ' << fmt17(p.state.y()) << ' ' << fmt17(p.state.theta())
        << '\n';
  }
  return out.str();
}

std::vector<PathPoint> parse_trajectory(const std::string& text) {
  std::vector<PathPoint> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line_no == 1) header = line == "# gta-trajectory 1";
      continue;
    }
    std::istringstream ls(line);
    double t = 0, x = 0, y = 0, theta = 0;
    std::string extra;
    if (!(ls >> t >> x >> y >> theta) || (ls >> extra)) {
      throw ParseError("trajectory line " + std::to_string(line_no) + ": expected 't x y theta'");
    }
    out.push_back({t, AgentState(x, y, theta)});
  }
  if (!header) throw ParseError("trajectory: missing '# gta-trajectory 1' header");
  if (out.empty()) throw ParseError("trajectory: no samples");
  return out;
}

RunReport::Means RunReport::means() const {
  Means m;
  if (episodes.empty()) return m;
  for (const auto& e : episodes) {
    m.sr += e.success;
    m.osr += e.oracle_success;
    m.spl += e.spl;
    m.ne += e.ne;
    m.tl += e.tl;
    m.ndtw += e.ndtw;
    m.steps += e.steps;
  }
  const double n = static_cast<double>(episodes.size());
  m.sr /= n;
  m.osr /= n;
  m.spl /= n;
  m.ne /= n;
  m.tl /= n;
  m.ndtw /= n;
  m.steps /= n;
  return m;
}

RunReport make_report(std::string backend_id, std::string config_digest, std::vector<EpisodeResult> results) {
  std::sort(results.begin(), results.end(),
            [](const EpisodeResult& a, const EpisodeResult& b) { return a.episode_id < b.episode_id; });
  return {std::move(backend_id), std::move(config_digest), std::move(results)};
}

std::string RunReport::to_json() const {
  using nlohmann::json;
  json doc;
  doc["format"] = "gta-report";
  doc["version"] = 1;
  doc["backend"] = backend_id;
  doc["config_digest"] = config_digest;
  json eps = json::array();
  for (const auto& e : episodes) {
    eps.push_back({{"id", e.episode_id},
                   {"success", e.success},
                   {"oracle_success", e.oracle_success},
                   {"ne", e.ne},
                   {"tl", e.tl},
                   {"spl", e.spl},
                   {"ndtw", e.ndtw},
                   {"steps", e.steps},
                   {"failure_code", to_string(e.failure_code)},
                   {"failure_detail", e.failure_detail}});
  }
  doc["episodes"] = eps;
  const auto m = means();
  doc["aggregate"] = {{"episodes", episodes.size()}, {"sr", m.sr},   {"osr", m.osr},   {"spl", m.spl},
                      {"ne", m.ne},                  {"tl", m.tl},   {"ndtw", m.ndtw}, {"steps", m.steps}};
  return doc.dump(2) + "\n";
}

std::string RunReport::summary_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(20) << "episode" << std::right << std::setw(5) << "SR" << std::setw(5) << "OSR"
      << std::setw(8) << "NE" << std::setw(8) << "TL" << std::setw(7) << "SPL" << std::setw(7) << "nDTW"
      << std::setw(7) << "steps" << "  failure\n";
  for (const auto& e : episodes) {
    out << std::left << std::setw(20) << e.episode_id << std::right << std::setw(5) << e.success << std::setw(5)
        << e.oracle_success << std::setw(8) << e.ne << std::setw(8) << e.tl << std::setw(7) << e.spl << std::setw(7)
        << e.ndtw << std::setw(7) << e.steps << "  " << to_string(e.failure_code) << '\n';
  }
  const auto m = means();
  out << std::left << std::setw(20) << "mean" << std::right << std::setw(5) << std::setprecision(2) << m.sr
      << std::setw(5) << m.osr << std::setprecision(3) << std::setw(8) << m.ne << std::setw(8) << m.tl
      << std::setw(7) << m.spl << std::setw(7) << m.ndtw << std::setw(7) << m.steps << '\n';
  out << "backend: " << backend_id << "  config: " << config_digest.substr(0, 12) << '\n';
  return out.str();
}

}  // namespace gta
