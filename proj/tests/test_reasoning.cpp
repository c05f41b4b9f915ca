#include "gta/error.hpp"
#include "gta/reasoning.hpp"
#include "gta/sim.hpp"
#include "gta/topo.hpp"

#include "support.hpp"

#include <doctest.h>

#include <map>

using namespace gta;
using testing::Rng;

namespace {

std::vector<RgbdFrame> yaw_frames(const AgentState& at, const std::vector<double>& yaws, double t0) {
  std::vector<RgbdFrame> frames;
  for (std::size_t i = 0; i < yaws.size(); ++i) {
    RgbdFrame f;
    f.agent_state = at;
    f.camera_yaw = yaws[i];
    f.timestamp = t0 + static_cast<double>(i);
    frames.push_back(f);
  }
  return frames;
}

double deg(double d) { return d * kPi / 180.0; }

BevImage blank_bev() {
  BevImage b;
  b.pixels = RgbImage(16, 16);
  b.cells.assign(256, BevCell::Unknown);
  b.meters_per_pixel = 0.25;
  return b;
}

std::array<RgbImage, 4> blank_ego() {
  return {RgbImage(32, 24), RgbImage(32, 24), RgbImage(32, 24), RgbImage(32, 24)};
}

}  // namespace

TEST_CASE("fresh scan at heading 0 picks the exact cardinal yaws") {
  const AgentState now(1, 1, 0);
  std::vector<double> yaws;
  for (int i = 0; i < 8; ++i) yaws.push_back(deg(45.0 * i));
  const auto frames = yaw_frames(now, yaws, 0);
  const auto sel = select_orthogonal_views(frames, now, ViewSelectConfig{});
  // Front, right, back, left.
  CHECK(frames[sel[0]].camera_yaw == doctest::Approx(0.0));
  CHECK(frames[sel[1]].camera_yaw == doctest::Approx(deg(270)));
  CHECK(frames[sel[2]].camera_yaw == doctest::Approx(deg(180)));
  CHECK(frames[sel[3]].camera_yaw == doctest::Approx(deg(90)));
}

TEST_CASE("heading 30 degrees picks the 45 degree frame for the front") {
  const AgentState now(0, 0, deg(30));
  std::vector<double> world;
  for (int i = 0; i < 8; ++i) world.push_back(deg(45.0 * i));
  // Frames captured at heading 0 from the same spot, so world yaw = rig yaw.
  const auto frames = yaw_frames(AgentState(0, 0, 0), world, 0);
  const auto sel = select_orthogonal_views(frames, now, ViewSelectConfig{});
  // Targets: 30, -60, -150, 120. Errors by hand: 45 (15), 315 (15), 180 or 225 (30 / 15 -> 225), 135 (15).
  CHECK(frames[sel[0]].world_yaw() == doctest::Approx(deg(45)));
  CHECK(normalize_angle(frames[sel[1]].world_yaw()) == doctest::Approx(deg(-45)));
  CHECK(normalize_angle(frames[sel[2]].world_yaw()) == doctest::Approx(deg(-135)));
  CHECK(frames[sel[3]].world_yaw() == doctest::Approx(deg(135)));
}

TEST_CASE("ties go to the newest frame") {
  const AgentState now(0, 0, 0);
  auto frames = yaw_frames(now, {0.0, deg(90), deg(180), deg(270)}, 0);
  auto later = yaw_frames(AgentState(0.1, 0, 0), {0.0, deg(90), deg(180), deg(270)}, 10);
  frames.insert(frames.end(), later.begin(), later.end());
  const auto sel = select_orthogonal_views(frames, now, ViewSelectConfig{});
  for (int k = 0; k < 4; ++k) CHECK(frames[sel[k]].timestamp >= 10);
}

TEST_CASE("frames outside delta_s give a coverage error") {
  const AgentState now(0, 0, 0);
  const auto frames = yaw_frames(AgentState(1.0, 0, 0), {0.0, deg(90), deg(180), deg(270)}, 0);
  CHECK_THROWS_AS(select_orthogonal_views(frames, now, ViewSelectConfig{}), CoverageError);
  CHECK_THROWS_AS(select_orthogonal_views({}, now, ViewSelectConfig{}), CoverageError);
}

TEST_CASE("distance filter comes before the angle") {
  const AgentState now(0, 0, 0);
  auto frames = yaw_frames(AgentState(2.0, 0, 0), {0.0}, 100);                   // perfect yaw, too far
  auto near = yaw_frames(AgentState(0.2, 0, 0), {deg(40), deg(90), deg(180), deg(270)}, 0);
  frames.insert(frames.end(), near.begin(), near.end());
  const auto sel = select_orthogonal_views(frames, now, ViewSelectConfig{});
  CHECK(sel[0] == 1);
}

TEST_CASE("selected views stay within half a rig step of their targets") {
  Rng rng(61);
  const CameraRig rig;
  for (int n = 0; n < 200; ++n) {
    const AgentState scan_pose(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(-kPi, kPi));
    std::vector<double> yaws = rig.yaw_offsets();
    auto frames = yaw_frames(scan_pose, yaws, 0);
    const AgentState now(scan_pose.x(), scan_pose.y(), rng.uniform(-kPi, kPi));
    const auto sel = select_orthogonal_views(frames, now, ViewSelectConfig{});
    for (int k = 0; k < 4; ++k) {
      CHECK(angular_distance(frames[sel[k]].world_yaw(), ego_view_yaw(now.theta(), k)) <= rig.angular_step() / 2 + 1e-9);
    }
  }
}

TEST_CASE("plan merge keeps items and never clears a done flag") {
  TaskPlan plan{{{"Exit the room", false}, {"Turn left", false}}};
  const TaskPlan a = plan.merged_with(TaskPlan{{{"Exit the room", true}}});
  CHECK(a.items == std::vector<PlanItem>{{"Exit the room", true}, {"Turn left", false}});
  const TaskPlan b = a.merged_with(TaskPlan{{{"Exit the room", false}, {"Find the door", false}}});
  CHECK(b.items == std::vector<PlanItem>{{"Exit the room", true}, {"Turn left", false}, {"Find the door", false}});

  Rng rng(62);
  const std::vector<std::string> texts{"a", "b", "c", "d", "e"};
  TaskPlan cur;
  for (int n = 0; n < 500; ++n) {
    TaskPlan upd;
    for (int i = 0; i < rng.integer(0, 4); ++i) upd.items.push_back({texts[rng.integer(0, 4)], rng.integer(0, 1) == 1});
    const TaskPlan next = cur.merged_with(upd);
    REQUIRE(next.items.size() >= cur.items.size());
    for (std::size_t i = 0; i < cur.items.size(); ++i) {
      REQUIRE(next.items[i].text == cur.items[i].text);
      if (cur.items[i].done) REQUIRE(next.items[i].done);
    }
    cur = next;
  }
}

TEST_CASE("first prompt has an empty alert line and no history") {
  const PromptBundle p = assemble_prompt("ep", 0, blank_bev(), blank_ego(), TaskPlan{}, "current_node: 0\n",
                                         HistoryLog{}, "Go to the door.", {});
  CHECK(p.state_block == "current_node: 0\nalerts:\n");
  CHECK(p.history_block == "(no history)\n");
  CHECK(p.task_block == "(empty plan)\n");
  const std::string text = p.text();
  CHECK(text.rfind("GTA-PROMPT 1\n", 0) == 0);
  CHECK(text.find("[INSTRUCTION]\nGo to the door.\n") != std::string::npos);
  CHECK(text.find("images: bev 16x16, ego_0 32x24") != std::string::npos);
}

TEST_CASE("history shows the five most recent entries") {
  HistoryLog h;
  for (int i = 0; i < 7; ++i) h.push({i, "t" + std::to_string(i), "ego_0", "waypoint", i % 2 == 0});
  const std::string s = render_history(h);
  CHECK(s.find("step 0 ") == std::string::npos);
  CHECK(s.find("step 1 ") == std::string::npos);
  for (int i = 2; i < 7; ++i) CHECK(s.find("step " + std::to_string(i) + " ") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
  CHECK(s.find("step 6 | view ego_0 | action waypoint | outcome ok | thought: t6\n") != std::string::npos);
  CHECK(s.find("step 5 | view ego_0 | action waypoint | outcome failed | thought: t5\n") != std::string::npos);
}

TEST_CASE("alerts are listed in the state block") {
  const PromptBundle p = assemble_prompt("ep", 3, blank_bev(), blank_ego(), TaskPlan{}, "x\n", HistoryLog{}, "go",
                                         {kLoopAlert, alerts::kActionFailed});
  CHECK(p.state_block == std::string("x\nalerts:\n! CRITICAL: Potential Loop Detected\n! ") + alerts::kActionFailed + "\n");
}

TEST_CASE("prompt text is deterministic") {
  HistoryLog h;
  h.push({0, "look around", "bev", "waypoint(bev, 10, 20)", true});
  auto make = [&] {
    return assemble_prompt("ep", 1, blank_bev(), blank_ego(), TaskPlan{{{"a", true}, {"b", false}}}, "s\n", h, "go",
                           {alerts::kParseFailed})
        .text();
  };
  CHECK(make() == make());
}

TEST_CASE("prompt text is injective over its inputs") {
  Rng rng(63);
  const std::vector<std::string> pieces{"", "a", "b", "\n", "\\", "\\n", "|", " | ", "[STATE]", "1. [ ] a", "! x",
                                        "alerts:", "(no history)", "(empty plan)"};
  auto pick = [&] {
    std::string s;
    for (int i = 0, n = rng.integer(0, 3); i < n; ++i) s += pieces[rng.integer(0, static_cast<int>(pieces.size()) - 1)];
    return s;
  };
  std::map<std::string, std::string> seen;  // prompt text -> canonical input description
  for (int n = 0; n < 4000; ++n) {
    TaskPlan plan;
    for (int i = 0, m = rng.integer(0, 2); i < m; ++i) plan.items.push_back({pick(), rng.integer(0, 1) == 1});
    HistoryLog h;
    for (int i = 0, m = rng.integer(0, 2); i < m; ++i) h.push({i, pick(), "ego_1", "stop", rng.integer(0, 1) == 1});
    std::vector<std::string> alerts;
    for (int i = 0, m = rng.integer(0, 2); i < m; ++i) alerts.push_back(pick());
    const std::string summary = rng.integer(0, 1) ? "current_node: 0\n" : "current_node: 1\n";
    const std::string instruction = pick();

    std::string key = summary + "\x1f" + instruction + "\x1f";
    for (const auto& it : plan.items) key += it.text + "\x1e" + (it.done ? "1" : "0") + "\x1d";
    key += "\x1f";
    for (const auto& e : h.entries) key += e.thought + "\x1e" + (e.success ? "1" : "0") + "\x1d";
    key += "\x1f";
    for (const auto& a : alerts) key += a + "\x1d";

    const std::string text =
        assemble_prompt("ep", 0, blank_bev(), blank_ego(), plan, summary, h, instruction, alerts).text();
    auto [it, inserted] = seen.emplace(text, key);
    if (!inserted) REQUIRE(it->second == key);
  }
}

TEST_CASE("decomposition prompt") {
  const std::string p = decomposition_prompt("ep1", "Exit the room and turn left");
  CHECK(p.rfind("GTA-DECOMPOSE 1\n", 0) == 0);
  CHECK(p.find("[INSTRUCTION]\nExit the room and turn left\n") != std::string::npos);
}
