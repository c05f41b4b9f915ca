#pragma once

#include "gta/geometry.hpp"
#include "gta/reasoning.hpp"
#include "gta/sim.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gta {

struct PlannerRequest {
  std::string episode_id;
  int step = 0;
  int attempt = 0;  // retries within one step after a malformed response
  PromptBundle prompt;
  // Simulator ground truth for the test-only greedy baseline. Never transmitted or digested.
  AgentState privileged_agent;
};

struct PlannerResponse {
  std::string text;
  double latency = 0.0;  // seconds
  std::string backend_id;
};

/// The decision-making brain behind the reasoning interface.
class PlannerBackend {
public:
  virtual ~PlannerBackend() = default;
  virtual std::string id() const = 0;
  virtual PlannerResponse decide(const PlannerRequest& request) = 0;
  /// Initial checklist for the instruction. Throws ValidationError on an empty instruction.
  virtual TaskPlan decompose_instruction(const std::string& episode_id, const std::string& instruction) = 0;
};

/// Fixed per-step responses, used as a deterministic stand-in for a language model.
struct ScriptedPolicy {
  enum class Terminal { Stop, RepeatLast };

  TaskPlan plan;
  std::vector<std::string> responses;  // responses[i] answers step i
  Terminal terminal = Terminal::Stop;
  std::string stop_response = R"({"thought":"script complete","todo":[],"action":{"type":"stop"}})";

  const std::string& response_for(int step) const;

  static ScriptedPolicy parse(const std::string& text, const std::string& source = "<script>");
  static ScriptedPolicy load(const std::string& path);
  std::string serialize() const;
};

class ScriptedBackend final : public PlannerBackend {
public:
  explicit ScriptedBackend(ScriptedPolicy policy) : policy_(std::move(policy)) {}
  std::string id() const override { return "scripted"; }
  PlannerResponse decide(const PlannerRequest& request) override;
  TaskPlan decompose_instruction(const std::string& episode_id, const std::string& instruction) override;

private:
  ScriptedPolicy policy_;
};

/// Test-only baseline that reads the goal from the episode: it heads for the observed
/// free bev pixel closest to the goal that is reachable in a straight line within d_max.
class GreedyBackend final : public PlannerBackend {
public:
  struct Config {
    double d_max = 3.0;
    double agent_radius = 0.18;
    double margin = 0.05;       // extra clearance around occupied pixels
    double stop_radius = 0.5;   // stop once this close to the goal
    double min_progress = 0.1;  // stop when no candidate improves the goal distance by this much
  };

  GreedyBackend(Vec2 goal, Config config) : goal_(std::move(goal)), config_(config) {}
  std::string id() const override { return "greedy"; }
  PlannerResponse decide(const PlannerRequest& request) override;
  TaskPlan decompose_instruction(const std::string& episode_id, const std::string& instruction) override;

private:
  Vec2 goal_;
  Config config_;
};

}  // namespace gta
