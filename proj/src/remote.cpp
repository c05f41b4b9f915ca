#include "gta/remote.hpp"

#include "gta/action.hpp"
#include "gta/error.hpp"
#include "gta/replay.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace gta {

using nlohmann::json;

void RemoteConfig::apply_env_overrides() {
  if (const char* v = std::getenv("GTA_REMOTE_ENDPOINT")) endpoint = v;
  if (const char* v = std::getenv("GTA_REMOTE_TOKEN")) auth_token = v;
  if (const char* v = std::getenv("GTA_REMOTE_TIMEOUT")) {
    char* end = nullptr;
    const double t = std::strtod(v, &end);
    if (end == v || *end != '\0') throw ValidationError("GTA_REMOTE_TIMEOUT: not a number");
    timeout = t;
  }
}

void RemoteConfig::validate() const {
  if (endpoint.rfind("http://", 0) != 0 || endpoint.size() <= 7) {
    throw ValidationError("remote.endpoint must be an http:// URL");
  }
  if (!(timeout > 0.0)) throw ValidationError("remote.timeout must be positive");
  if (max_retries < 0) throw ValidationError("remote.max_retries must be >= 0");
  if (backoff_base < 0.0) throw ValidationError("remote.backoff_base must be >= 0");
}

std::string remote_request_body(const PlannerRequest& r) {
  json images = json::array();
  images.push_back({{"id", "bev"}, {"mime", "image/png"}, {"data", base64_encode(encode_png(r.prompt.bev.pixels))}});
  for (int k = 0; k < 4; ++k) {
    images.push_back({{"id", "ego_" + std::to_string(k)},
                      {"mime", "image/png"},
                      {"data", base64_encode(encode_png(r.prompt.ego[k]))}});
  }
  json doc = {{"protocol", "gta-remote/1"}, {"kind", "decide"},   {"episode_id", r.episode_id},
              {"step", r.step},             {"attempt", r.attempt}, {"prompt", r.prompt.text()},
              {"images", images}};
  return doc.dump();
}

std::string remote_decompose_body(const std::string& episode_id, const std::string& instruction) {
  json doc = {{"protocol", "gta-remote/1"},
              {"kind", "decompose"},
              {"episode_id", episode_id},
              {"step", 0},
              {"attempt", 0},
              {"prompt", decomposition_prompt(episode_id, instruction)},
              {"images", json::array()}};
  return doc.dump();
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto scheme_end = config_.endpoint.find("://") + 3;
  const auto path_start = config_.endpoint.find('/', scheme_end);
  scheme_host_port_ = config_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

std::string RemoteBackend::post(const std::string& body) {
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double wait = config_.backoff_base * (1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);
    const auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    if (res->body.empty()) {
      last_error = "empty response body";
      continue;
    }
    return res->body;
  }
  throw BackendError("remote planner failed after " + std::to_string(config_.max_retries + 1) +
                     " attempts: " + last_error);
}

PlannerResponse RemoteBackend::decide(const PlannerRequest& request) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string text = post(remote_request_body(request));
  const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(text), latency, id()};
}

TaskPlan RemoteBackend::decompose_instruction(const std::string& episode_id, const std::string& instruction) {
  if (instruction.empty()) throw ValidationError("cannot decompose an empty instruction");
  return parse_plan_response(post(remote_decompose_body(episode_id, instruction)));
}

}  // namespace gta
