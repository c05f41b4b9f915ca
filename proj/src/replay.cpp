#include "gta/replay.hpp"

#include "gta/action.hpp"
#include "gta/error.hpp"
#include "gta/scene_io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <sstream>

namespace gta {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

namespace {

void append_field(std::string& acc, const std::string& field) {
  acc += std::to_string(field.size());
  acc += ':';
  acc += field;
}

void append_image(std::string& acc, const RgbImage& img) {
  append_field(acc, std::to_string(img.width) + "x" + std::to_string(img.height));
  acc.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
}

}  // namespace

std::string request_digest(const PlannerRequest& r) {
  std::string acc = "gta-request-1";
  append_field(acc, "decide");
  append_field(acc, r.episode_id);
  append_field(acc, std::to_string(r.step));
  append_field(acc, std::to_string(r.attempt));
  append_field(acc, r.prompt.text());
  append_image(acc, r.prompt.bev.pixels);
  for (const auto& img : r.prompt.ego) append_image(acc, img);
  return sha256_hex(acc);
}

std::string decomposition_digest(const std::string& episode_id, const std::string& instruction) {
  std::string acc = "gta-request-1";
  append_field(acc, "decompose");
  append_field(acc, episode_id);
  append_field(acc, instruction);
  return sha256_hex(acc);
}

std::string ReplayLog::serialize() const {
  std::ostringstream out;
  out << "GTA-REPLAY 1\n";
  out << "backend " << backend_id << '\n';
  for (const auto& r : records) {
    out << "record " << r.kind << ' ' << r.digest << ' ' << r.response.size() << '\n' << r.response << '\n';
  }
  return out.str();
}

ReplayLog ReplayLog::parse(const std::string& bytes) {
  ReplayLog log;
  std::size_t pos = 0;
  auto read_line = [&]() -> std::string {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw ParseError("replay log: unterminated line at byte " + std::to_string(pos));
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  if (read_line() != "GTA-REPLAY 1") throw ParseError("replay log: bad header");
  const std::string backend = read_line();
  if (backend.rfind("backend ", 0) != 0) throw ParseError("replay log: missing backend line");
  log.backend_id = backend.substr(8);
  while (pos < bytes.size()) {
    std::istringstream header(read_line());
    std::string tag;
    Record r;
    std::size_t len = 0;
    if (!(header >> tag >> r.kind >> r.digest >> len) || tag != "record") {
      throw ParseError("replay log: malformed record header (record " + std::to_string(log.records.size()) + ")");
    }
    if (pos + len + 1 > bytes.size() || bytes[pos + len] != '\n') {
      throw ParseError("replay log: truncated record " + std::to_string(log.records.size()));
    }
    r.response = bytes.substr(pos, len);
    pos += len + 1;
    log.records.push_back(std::move(r));
  }
  return log;
}

void ReplayLog::save(const std::string& path) const { write_text_file(path, serialize()); }

ReplayLog ReplayLog::load(const std::string& path) { return parse(read_text_file(path)); }

PlannerResponse RecordingBackend::decide(const PlannerRequest& request) {
  auto response = inner_.decide(request);
  log_.records.push_back({"decide", request_digest(request), response.text});
  return response;
}

TaskPlan RecordingBackend::decompose_instruction(const std::string& episode_id, const std::string& instruction) {
  if (instruction.empty()) throw ValidationError("cannot decompose an empty instruction");
  const auto plan = inner_.decompose_instruction(episode_id, instruction);
  SpatialAction carrier = SpatialAction::stop("decomposition");
  carrier.updated_plan = plan;
  log_.records.push_back({"decompose", decomposition_digest(episode_id, instruction), to_response_json(carrier)});
  return plan;
}

const ReplayLog::Record& ReplayBackend::next(const std::string& kind, const std::string& digest) {
  if (next_ >= log_.records.size()) {
    throw BackendError("replay exhausted after " + std::to_string(next_) + " records");
  }
  const auto& r = log_.records[next_];
  if (r.kind != kind || r.digest != digest) {
    throw BackendError("replay diverged at record " + std::to_string(next_));
  }
  ++next_;
  return r;
}

PlannerResponse ReplayBackend::decide(const PlannerRequest& request) {
  return {next("decide", request_digest(request)).response, 0.0, id()};
}

TaskPlan ReplayBackend::decompose_instruction(const std::string& episode_id, const std::string& instruction) {
  if (instruction.empty()) throw ValidationError("cannot decompose an empty instruction");
  return parse_plan_response(next("decompose", decomposition_digest(episode_id, instruction)).response);
}

}  // namespace gta
