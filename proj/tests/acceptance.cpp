// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is the number of failures.

#include "gta/action.hpp"
#include "gta/error.hpp"
#include "gta/metrics.hpp"
#include "gta/planner.hpp"
#include "gta/remote.hpp"
#include "gta/replay.hpp"
#include "gta/runner.hpp"
#include "gta/scene_io.hpp"
#include "gta/topo.hpp"

#include "support.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <thread>

using namespace gta;
using testing::Rng;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 -------------------------------------------------------------------------------------------

Outcome tsdf_fidelity() {
  const auto t0 = Clock::now();
  const SceneSpec room = load_scene(testing::fixture("scenes/box_room.scene"));
  const SensorConfig sensor;
  TsdfVolume vol = TsdfVolume::covering(Vec3(-0.3, -0.3, -0.2), Vec3(4.3, 4.3, 2.7), 0.05);
  const AgentState agent(2.0, 2.0, 0.0);
  for (const auto& f : capture_rotation_scan(room, agent, sensor)) vol.integrate(f, sensor.intrinsics, sensor.rig);
  Rng rng(1001);
  const Vec3 eye(2.0, 2.0, room.floor_height + sensor.rig.mount_height);
  int good = 0;
  const int total = 1000;
  for (int n = 0; n < total; ++n) {
    const double az = rng.uniform(-kPi, kPi), el = rng.uniform(-0.6, 0.3);
    const Ray ray(eye, Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)));
    const auto hit = vol.raycast(ray, 10.0);
    if (hit && room.distance_to_surface(*hit) <= 0.05) ++good;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {good >= 950 && secs < 10.0, fmt("%d/%d rays within 0.05 m, %.2f s", good, total, secs)};
}

// 2 -------------------------------------------------------------------------------------------

double max_sdf_difference(const TsdfVolume& a, const TsdfVolume& b, bool& weights_equal) {
  double worst = 0.0;
  const auto& d = a.dims();
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        worst = std::max(worst, std::abs(a.sdf(x, y, z) - b.sdf(x, y, z)));
        if (std::abs(a.weight(x, y, z) - b.weight(x, y, z)) > 1e-9) weights_equal = false;
      }
  return worst;
}

Outcome fusion_algebra() {
  Rng rng(1002);
  const auto k = testing::small_camera();
  const auto rig = testing::low_rig();
  double worst_double = 0.0, worst_perm = 0.0;
  bool weights = true;
  for (int seq = 0; seq < 100; ++seq) {
    std::vector<RgbdFrame> frames;
    const int len = rng.integer(2, 6);
    for (int n = 0; n < len; ++n) frames.push_back(testing::random_frame(rng, k));

    TsdfVolume a = testing::algebra_volume(), b = testing::algebra_volume();
    for (std::size_t n = 0; n + 1 < frames.size(); ++n) {
      a.integrate(frames[n], k, rig);
      b.integrate(frames[n], k, rig);
    }
    const double w = rng.uniform(0.5, 2.0);
    a.integrate(frames.back(), k, rig, w);
    a.integrate(frames.back(), k, rig, w);
    b.integrate(frames.back(), k, rig, 2 * w);
    worst_double = std::max(worst_double, max_sdf_difference(a, b, weights));

    TsdfVolume c = testing::algebra_volume(), d = testing::algebra_volume();
    for (const auto& f : frames) c.integrate(f, k, rig);
    std::shuffle(frames.begin(), frames.end(), rng.engine);
    for (const auto& f : frames) d.integrate(f, k, rig);
    worst_perm = std::max(worst_perm, max_sdf_difference(c, d, weights));
  }
  return {worst_double <= 1e-7 && worst_perm <= 1e-7 && weights,
          fmt("max deviation: double weight %.2e, permutation %.2e", worst_double, worst_perm)};
}

// 3 -------------------------------------------------------------------------------------------

Outcome grounding_accuracy() {
  Rng rng(1003);
  const SceneSpec room = load_scene(testing::fixture("scenes/box_room.scene"));
  int cases = 0, accurate = 0, exact_offset = 0, errors = 0;
  double worst = 0.0, worst_offset = 0.0;
  while (cases < 100) {
    const AgentState agent(rng.uniform(0.6, 3.4), rng.uniform(0.6, 3.4), rng.uniform(-kPi, kPi));
    const auto s = testing::scan(room, agent, Vec3(-0.3, -0.3, -0.2), Vec3(4.3, 4.3, 2.7));
    for (int tries = 0; tries < 20 && cases < 100; ++tries) {
      const auto view = static_cast<ViewId>(rng.integer(1, 4));
      const int u = rng.integer(0, 1000), v = rng.integer(0, 1000);
      // Analytic intersection of the selected pixel ray with the scene.
      const RgbdFrame& f = *s.views()[ego_index(view)];
      const auto& k = s.sensor.intrinsics;
      const double px = u / 1000.0 * (k.width - 1), py = v / 1000.0 * (k.height - 1);
      const Pose3 cam = f.camera_pose(s.sensor.rig);
      const Ray ray(cam.translation(), cam.rotation() * Vec3((px - k.cx) / k.fx, (py - k.cy) / k.fy, 1.0));
      const auto t = room.raycast(ray);
      if (!t) continue;
      const Vec2 truth = ray.at(*t).head<2>();
      if ((truth - agent.position()).norm() > s.ctx.d_max - 0.3) continue;  // keep clear of clamping
      ++cases;
      try {
        const auto g = ground_action(SpatialAction::waypoint(view, u, v), s.views(), s.bev, s.volume, s.ctx);
        const double err = (g.floor_point - truth).norm();
        worst = std::max(worst, err);
        accurate += err < 0.1;
        const double offset = (g.floor_point - g.waypoint.head<2>()).norm();
        const double off_err = std::abs(offset - 1.5 * s.ctx.agent_radius);
        worst_offset = std::max(worst_offset, off_err);
        exact_offset += off_err < 1e-9;
      } catch (const GroundingError&) {
        ++errors;
      }
    }
  }
  return {accurate == 100 && exact_offset == 100,
          fmt("%d/100 within 0.1 m (worst %.3f m), offset exact in %d/100 (worst %.1e), %d ungrounded", accurate,
              worst, exact_offset, worst_offset, errors)};
}

// 4 -------------------------------------------------------------------------------------------

std::string waypoint_response(ViewId view, int u, int v) {
  return to_response_json(SpatialAction::waypoint(view, u, v, "scripted"));
}

EpisodeSpec constructed_episode(const std::string& id, const SceneSpec& scene, const AgentState& start,
                                const Vec2& goal, int max_steps) {
  EpisodeSpec e;
  e.id = id;
  e.scene = std::make_shared<const SceneSpec>(scene);
  e.start = start;
  e.goal = goal;
  e.instruction = "Constructed episode.";
  e.shortest_path_length = (goal - start.position()).norm();
  e.reference_path = {start.position(), goal};
  e.max_steps = max_steps;
  return e;
}

Outcome topo_thresholds() {
  // Walk along x; nodes appear at 0, 0.81, 1.7 and 2.5 (0.8 from the previous node is not a merge).
  TopoGraph g;
  const MemoryConfig mem;
  for (double x : {0.0, 0.5, 0.79, 0.81, 1.2, 1.7, 2.5}) g.observe_pose(Vec3(x, 0, 0), mem);
  const bool count_ok = g.nodes().size() == 4;

  // Closed-loop oscillation: ego_2 always points back to the previous spot.
  ScriptedPolicy p;
  p.responses = {waypoint_response(ViewId::Ego2, 500, 850)};
  p.terminal = ScriptedPolicy::Terminal::RepeatLast;
  ScriptedBackend backend(p);
  const auto e =
      constructed_episode("oscillate", testing::square_room(6.0), AgentState(3.0, 3.9, -kPi / 2), Vec2(0.8, 0.8), 8);
  const auto run = run_episode(e, backend, NavigationConfig{});
  int first_alert = -1;
  for (const auto& st : run.trace.steps) {
    if (st.prompts.front().find(kLoopAlert) != std::string::npos) {
      first_alert = st.step;
      break;
    }
  }
  const int fourth_visit = 6;  // visits to the start node happen on steps 0, 2, 4, 6
  return {count_ok && first_alert == fourth_visit && run.trace.graph.node(0).visit_count >= 4,
          fmt("walk produced %zu nodes (expected 4); alert first in prompt of step %d (expected %d)",
              g.nodes().size(), first_alert, fourth_visit)};
}

// 5 -------------------------------------------------------------------------------------------

double dtw_oracle(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::map<std::pair<int, int>, double> memo;
  std::function<double(int, int)> rec = [&](int i, int j) -> double {
    const double d = (a[i] - b[j]).norm();
    if (i == 0 && j == 0) return d;
    if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
    double best = INFINITY;
    if (i > 0) best = std::min(best, rec(i - 1, j));
    if (j > 0) best = std::min(best, rec(i, j - 1));
    if (i > 0 && j > 0) best = std::min(best, rec(i - 1, j - 1));
    return memo[{i, j}] = d + best;
  };
  return rec(static_cast<int>(a.size()) - 1, static_cast<int>(b.size()) - 1);
}

Outcome metric_oracles() {
  Rng rng(1005);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    std::vector<Vec2> a(static_cast<std::size_t>(rng.integer(1, 20))), b(static_cast<std::size_t>(rng.integer(1, 20)));
    for (auto& q : a) q = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
    for (auto& q : b) q = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double expected = std::exp(-dtw_oracle(a, b) / (b.size() * 3.0));
    worst = std::max(worst, std::abs(ndtw(a, b, 3.0) - expected));
  }
  struct Log {
    std::vector<Vec2> traj;
    Vec2 goal;
    double shortest;
    bool sr, osr;
    double ne, spl;
  };
  const std::vector<Log> logs{
      {{{0, 0}, {2, 0}}, {2, 0}, 2.0, true, true, 0.0, 1.0},
      {{{0, 0}, {4, 0}}, {2, 0}, 2.0, true, true, 2.0, 0.5},
      {{{0, 0}, {5, 0}}, {2, 0}, 2.0, true, true, 3.0, 0.4},
      {{{0, 0}, {5.01, 0}}, {2, 0}, 2.0, false, true, 3.01, 0.0},
      {{{0, 0}, {0, 10}}, {10, 0}, 10.0, false, false, std::sqrt(200.0), 0.0},
      {{{0, 0}, {3, 0}, {3, 4}}, {3, 4}, 5.0, true, true, 0.0, 5.0 / 7.0},
      {{{0, 0}, {10, 0}, {0, 0}}, {10, 0}, 10.0, false, true, 10.0, 0.0},
      {{{1, 1}}, {1, 1}, 1.0, true, true, 0.0, 1.0},
      {{{0, 0}, {0, 3}}, {4, 3}, 5.0, false, false, 4.0, 0.0},
      {{{0, 0}, {6, 8}}, {6, 8}, 6.0, true, true, 0.0, 0.6},
  };
  int logs_ok = 0;
  for (const auto& l : logs) {
    const auto m = score_trajectory(l.traj, l.goal, 3.0, l.shortest, {l.traj.front(), l.goal});
    logs_ok += m.success == l.sr && m.oracle_success == l.osr && std::abs(m.ne - l.ne) < 1e-12 &&
               std::abs(m.spl - l.spl) < 1e-12;
  }
  return {worst <= 1e-9 && logs_ok == 10,
          fmt("nDTW max deviation %.1e over 200 pairs; %d/10 constructed logs match", worst, logs_ok)};
}

// 6, 7 ----------------------------------------------------------------------------------------

int cli(const std::string& args) {
  const int rc = std::system((std::string(GTA_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gta_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

Outcome scripted_suite() {
  const fs::path a = scratch("suite_a"), b = scratch("suite_b");
  const std::string config = testing::fixture("suite.json");
  if (cli("run -c " + config + " -o " + a.string()) != 0 || cli("run -c " + config + " -o " + b.string()) != 0) {
    return {false, "gta run failed"};
  }
  const std::string ra = read_text_file((a / "report.json").string());
  const std::string rb = read_text_file((b / "report.json").string());
  const auto doc = nlohmann::json::parse(ra);
  const double sr = doc["aggregate"]["sr"], ne = doc["aggregate"]["ne"];
  const std::size_t n = doc["episodes"].size();
  fs::remove_all(a);
  fs::remove_all(b);
  return {n == 12 && sr == 1.0 && ne < 0.5 && ra == rb,
          fmt("%zu episodes, SR %.2f, mean NE %.3f m, reports %s", n, sr, ne, ra == rb ? "identical" : "differ")};
}

Outcome greedy_suite() {
  const fs::path out = scratch("greedy");
  if (cli("run -c " + testing::fixture("suite_greedy.json") + " -o " + out.string()) != 0) {
    return {false, "gta run failed"};
  }
  const auto doc = nlohmann::json::parse(read_text_file((out / "report.json").string()));
  const double sr = doc["aggregate"]["sr"];
  fs::remove_all(out);
  return {sr >= 0.8, fmt("SR %.2f over %zu episodes", sr, doc["episodes"].size())};
}

// 8 -------------------------------------------------------------------------------------------

class FailingBackend final : public PlannerBackend {
public:
  explicit FailingBackend(int fail_at) : fail_at_(fail_at) {}
  std::string id() const override { return "failing"; }
  PlannerResponse decide(const PlannerRequest& r) override {
    if (r.step >= fail_at_) throw BackendError("injected outage");
    return {waypoint_response(ViewId::Ego0, 500, 900), 0.0, id()};
  }
  TaskPlan decompose_instruction(const std::string&, const std::string&) override { return TaskPlan{{{"go", false}}}; }

private:
  int fail_at_;
};

Outcome robustness() {
  Rng rng(1008);
  int survived = 0;
  for (int n = 0; n < 10000; ++n) {
    std::string s;
    const int len = rng.integer(0, 300);
    if (n % 2 == 0) {
      for (int i = 0; i < len; ++i) s += static_cast<char>(rng.integer(0, 255));
    } else {
      s = R"({"thought":"x","todo":[{"text":"a","done":false}],"action":{"type":"waypoint","view":"ego_0","u":500,"v":700}})";
      for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.size()) - 1))] =
          "{}[]\",:0a"[rng.integer(0, 8)];
    }
    try {
      parse_action(s);
    } catch (const ParseError&) {
    } catch (const ValidationError&) {
    }
    ++survived;
  }

  const SceneSpec room = testing::square_room(6.0);
  const std::string stop = to_response_json(SpatialAction::stop("done"));
  struct Injected {
    const char* name;
    std::vector<std::string> responses;
    bool repeat;
    AgentState start;
    int max_steps;
    FailureCode expected;
  };
  const std::vector<Injected> cases{
      {"garbage forever", {"no json here"}, true, AgentState(0.5, 3.0, 0.0), 4, FailureCode::MaxSteps},
      {"garbage then stop", {"{{{{", stop}, false, AgentState(0.5, 3.0, 0.0), 10, FailureCode::None},
      {"mixed malformed then stop",
       {"", R"({"action":{"type":"waypoint","view":"ego_0","u":1500,"v":1}})",
        R"({"action":{"type":"waypoint","view":"ego_9","u":1,"v":1}})", "{\"action\": {\"type\": \"wayp",
        waypoint_response(ViewId::Ego0, 500, 0), stop},
       false, AgentState(0.5, 3.0, 0.0), 10, FailureCode::None},
      {"garbage facing a wall", {"???"}, true, AgentState(3.0, 5.75, kPi / 2), 10, FailureCode::Stuck},
  };
  int ok = 0, total = 0;
  std::string bad;
  for (const auto& c : cases) {
    ++total;
    ScriptedPolicy p;
    p.responses = c.responses;
    p.terminal = c.repeat ? ScriptedPolicy::Terminal::RepeatLast : ScriptedPolicy::Terminal::Stop;
    ScriptedBackend backend(p);
    try {
      const auto run = run_episode(constructed_episode(c.name, room, c.start, Vec2(5.5, 0.5), c.max_steps), backend,
                                   NavigationConfig{});
      if (run.result.failure_code == c.expected) ++ok;
      else bad += std::string(" ") + c.name + "=" + to_string(run.result.failure_code);
    } catch (const std::exception& e) {
      bad += std::string(" ") + c.name + " threw";
    }
  }
  {
    ++total;
    FailingBackend backend(1);
    const auto run = run_episode(constructed_episode("outage", room, AgentState(0.5, 3.0, 0.0), Vec2(5.5, 0.5), 10),
                                 backend, NavigationConfig{});
    if (run.result.failure_code == FailureCode::BackendError) ++ok;
    else bad += " outage=" + std::string(to_string(run.result.failure_code));
  }
  return {survived == 10000 && ok == total,
          fmt("%d/10000 fuzzed inputs handled; %d/%d injected episodes completed with the expected code%s", survived,
              ok, total, bad.c_str())};
}

// 9 -------------------------------------------------------------------------------------------

// Loopback planner service answering from a script, standing in for a hosted model.
class ScriptService {
public:
  explicit ScriptService(ScriptedPolicy policy) : policy_(std::move(policy)) {
    server_.Post("/v1/decide", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      if (body["kind"] == "decompose") {
        auto a = SpatialAction::stop("plan");
        a.updated_plan = policy_.plan;
        res.set_content(to_response_json(a), "text/plain");
      } else {
        res.set_content(policy_.response_for(body["step"].get<int>()), "text/plain");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ScriptService() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/decide"; }

private:
  ScriptedPolicy policy_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

Outcome remote_replay() {
  int exact = 0, total = 0;
  for (const char* name : {"corridor_run", "l_turn", "doorway"}) {
    ++total;
    const auto episode = load_episode(testing::fixture(std::string("episodes/") + name + ".episode"));
    ScriptService service(ScriptedPolicy::load(testing::fixture(std::string("scripts/") + name + ".script")));
    RemoteConfig rc;
    rc.endpoint = service.endpoint();
    rc.timeout = 10.0;
    RemoteBackend remote(rc);
    ReplayLog log;
    RecordingBackend recorder(remote, log);
    const auto live = run_episode(episode, recorder, NavigationConfig{});

    ReplayBackend replay(ReplayLog::parse(log.serialize()));
    const auto again = run_episode(episode, replay, NavigationConfig{});
    const bool same = serialize_trajectory(name, live.trace.trajectory) ==
                          serialize_trajectory(name, again.trace.trajectory) &&
                      live.result == again.result && replay.consumed() == log.records.size();
    exact += same;
  }
  return {exact == total, fmt("%d/%d remote episodes replayed bit-exactly", exact, total)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"TSDF fidelity", tsdf_fidelity},
      {"fusion algebra", fusion_algebra},
      {"grounding accuracy", grounding_accuracy},
      {"topological thresholds", topo_thresholds},
      {"metric oracles", metric_oracles},
      {"scripted suite", scripted_suite},
      {"greedy baseline", greedy_suite},
      {"robustness", robustness},
      {"remote replay", remote_replay},
  };
  int failures = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
