#pragma once

#include "gta/planner.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gta {

std::string sha256_hex(const std::string& bytes);
std::string base64_encode(const std::vector<std::uint8_t>& bytes);

/// Content digest of what a backend would see for this request.
std::string request_digest(const PlannerRequest& request);
std::string decomposition_digest(const std::string& episode_id, const std::string& instruction);

/// Ordered (request digest, response text) records of one episode's planner traffic.
struct ReplayLog {
  struct Record {
    std::string kind;  // "decompose" or "decide"
    std::string digest;
    std::string response;
    bool operator==(const Record&) const = default;
  };
  std::string backend_id;
  std::vector<Record> records;

  std::string serialize() const;
  static ReplayLog parse(const std::string& bytes);
  void save(const std::string& path) const;
  static ReplayLog load(const std::string& path);
};

/// Forwards to `inner` and appends every exchange to `log`.
class RecordingBackend final : public PlannerBackend {
public:
  RecordingBackend(PlannerBackend& inner, ReplayLog& log) : inner_(inner), log_(log) {
    log_.backend_id = inner.id();
  }
  std::string id() const override { return inner_.id(); }
  PlannerResponse decide(const PlannerRequest& request) override;
  TaskPlan decompose_instruction(const std::string& episode_id, const std::string& instruction) override;

private:
  PlannerBackend& inner_;
  ReplayLog& log_;
};

/// Serves recorded responses in order. A request whose digest differs from the
/// recording raises BackendError, since the episode has diverged.
class ReplayBackend final : public PlannerBackend {
public:
  explicit ReplayBackend(ReplayLog log) : log_(std::move(log)) {}
  std::string id() const override { return "replay:" + log_.backend_id; }
  PlannerResponse decide(const PlannerRequest& request) override;
  TaskPlan decompose_instruction(const std::string& episode_id, const std::string& instruction) override;
  std::size_t consumed() const { return next_; }

private:
  const ReplayLog::Record& next(const std::string& kind, const std::string& digest);

  ReplayLog log_;
  std::size_t next_ = 0;
};

}  // namespace gta
