#pragma once

#include "gta/planner.hpp"

#include <string>

namespace gta {

struct RemoteConfig {
  std::string endpoint;     // e.g. http://127.0.0.1:8080/v1/decide
  std::string auth_token;   // sent as "Authorization: Bearer <token>" when nonempty
  double timeout = 60.0;    // seconds per request
  int max_retries = 2;
  double backoff_base = 0.5;  // seconds; doubles after every failed attempt

  /// Reads GTA_REMOTE_ENDPOINT, GTA_REMOTE_TOKEN, GTA_REMOTE_TIMEOUT over the current values.
  void apply_env_overrides();
  void validate() const;
};

/// JSON body sent for one request; see docs/formats.md.
std::string remote_request_body(const PlannerRequest& request);
std::string remote_decompose_body(const std::string& episode_id, const std::string& instruction);

/// Client for a planner served over HTTP. One POST per decision, raw text back.
class RemoteBackend final : public PlannerBackend {
public:
  explicit RemoteBackend(RemoteConfig config);
  std::string id() const override { return "remote"; }
  PlannerResponse decide(const PlannerRequest& request) override;
  TaskPlan decompose_instruction(const std::string& episode_id, const std::string& instruction) override;

private:
  std::string post(const std::string& body);

  RemoteConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace gta
