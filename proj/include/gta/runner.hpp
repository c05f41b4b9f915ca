#pragma once

#include "gta/bev.hpp"
#include "gta/metrics.hpp"
#include "gta/planner.hpp"
#include "gta/reasoning.hpp"
#include "gta/sim.hpp"
#include "gta/topo.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gta {

struct NavigationConfig {
  MemoryConfig memory;
  ViewSelectConfig views;
  ControllerConfig controller;
  SensorConfig sensor;
  BevConfig bev;
  double voxel_size = 0.05;
  double volume_height = 2.5;     // meters above the floor covered by the map
  double arrival_epsilon = 0.25;  // loop ends once the agent is this close to the goal
  int max_steps = 0;              // 0 = use the episode's own cap
  int max_retries = 2;            // re-prompts after a malformed or ungroundable response
  double fallback_probe = 0.5;    // forward probe once retries are exhausted
  int stuck_steps = 3;
  double stuck_distance = 0.1;
  bool keep_images = false;       // store PNGs of every prompt in the trace

  void validate() const;
};

enum class FailureCode { None, MaxSteps, BackendError, Stuck };
const char* to_string(FailureCode code);

struct EpisodeResult {
  std::string episode_id;
  bool success = false;
  bool oracle_success = false;
  double ne = 0.0;
  double tl = 0.0;
  double spl = 0.0;
  double ndtw = 0.0;
  int steps = 0;
  FailureCode failure_code = FailureCode::None;
  std::string failure_detail;

  bool operator==(const EpisodeResult&) const = default;
};

struct StepTrace {
  int step = 0;
  std::vector<std::string> prompts;    // one per attempt
  std::vector<std::string> responses;  // one per attempt
  std::vector<std::string> alerts;     // alerts shown on the first attempt
  std::string action;                  // what was executed
  bool fallback = false;
  std::vector<std::uint8_t> bev_png;                 // when keep_images
  std::array<std::vector<std::uint8_t>, 4> ego_png;  // when keep_images
};

struct EpisodeTrace {
  std::vector<PathPoint> trajectory;  // start pose plus every controller micro-step
  std::vector<StepTrace> steps;
  TaskPlan final_plan;
  TopoGraph graph;
};

struct EpisodeRun {
  EpisodeResult result;
  EpisodeTrace trace;
};

/// Runs the perceive / remember / prompt / decide / ground / execute loop until the
/// planner stops, the agent arrives, the step cap is hit, or the agent is stuck.
EpisodeRun run_episode(const EpisodeSpec& episode, PlannerBackend& backend, const NavigationConfig& config);

/// Trajectory log: "# gta-trajectory 1" header, then "t x y theta" per line.
std::string serialize_trajectory(const std::string& episode_id, const std::vector<PathPoint>& trajectory);
std::vector<PathPoint> parse_trajectory(const std::string& text);

struct RunReport {
  std::string backend_id;
  std::string config_digest;
  std::vector<EpisodeResult> episodes;  // sorted by episode id

  struct Means {
    double sr = 0, osr = 0, spl = 0, ne = 0, tl = 0, ndtw = 0, steps = 0;
  };
  Means means() const;
  std::string to_json() const;
  std::string summary_table() const;
};

RunReport make_report(std::string backend_id, std::string config_digest, std::vector<EpisodeResult> results);

}  // namespace gta
