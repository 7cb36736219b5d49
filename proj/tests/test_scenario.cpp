#include <gtest/gtest.h>

#include <string>

#include "dpdrive/scenario.hpp"

using namespace dpdrive;

namespace {

const char* kMinimal =
    "[vehicle]\n"
    "role = host\n";

std::vector<ValidationError> errors_of(const std::string& text, const std::vector<Override>& ov = {}) {
  try {
    load_scenario(text, ov);
  } catch (const ScenarioError& e) {
    return e.errors();
  }
  return {};
}

}  // namespace

TEST(LoadScenario, MinimalGetsDefaults) {
  const ScenarioSpec s = load_scenario(kMinimal);
  ASSERT_EQ(s.vehicles.size(), 1u);
  EXPECT_EQ(s.vehicles[0].role, Role::kHost);
  EXPECT_EQ(s.vehicles[0].lane, 2);
  EXPECT_EQ(s.track.lane_count, 3);
  EXPECT_EQ(s.noise_preset, "none");
  EXPECT_EQ(s.noise.mae_to_middle, 0.0);
  EXPECT_EQ(s.controller.steer_lock, 0.366);
  EXPECT_EQ(s.seed, 0u);
  EXPECT_FALSE(s.disable_agent_state);
}

TEST(LoadScenario, TwoHostsNameBothLines) {
  const auto errs = errors_of("[vehicle]\nrole = host\n\n[vehicle]\nrole = host\ns = 50\n");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].line, 4);
  EXPECT_NE(errs[0].reason.find("lines 1 4"), std::string::npos) << errs[0].reason;
  EXPECT_NE(format_errors(errs).find("line 4"), std::string::npos);
}

TEST(LoadScenario, NoHost) {
  const auto errs = errors_of("[vehicle]\nrole = agent\n");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs[0].reason.find("found none"), std::string::npos);
}

TEST(LoadScenario, GoogleNetPlusPreset) {
  const ScenarioSpec s = load_scenario(std::string(kMinimal) + "[noise]\npreset = googlenet+\n");
  EXPECT_EQ(s.noise.mae_to_middle, 0.347);
  EXPECT_EQ(s.noise.mae_angle, 0.029);
  EXPECT_EQ(s.noise.mae_d1, 6.055);
  EXPECT_EQ(s.noise.mae_d2, 3.155);
  EXPECT_EQ(s.noise.mae_d3, 5.450);
  EXPECT_EQ(s.noise.perception_period, 2);
}

TEST(LoadScenario, PresetThenFieldOverride) {
  const ScenarioSpec s =
      load_scenario(std::string(kMinimal) + "[noise]\nmae_d1 = 1.5\npreset = dynamic\nperception_period = 4\n");
  EXPECT_EQ(s.noise.mae_d1, 1.5);
  EXPECT_EQ(s.noise.mae_to_middle, 0.397);
  EXPECT_EQ(s.noise.perception_period, 4);
}

TEST(LoadScenario, UnknownKeyAndSection) {
  auto errs = errors_of(std::string(kMinimal) + "[controller]\nofset_step = 0.1\n");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].line, 4);
  EXPECT_EQ(errs[0].field, "controller.ofset_step");
  errs = errors_of(std::string(kMinimal) + "[weather]\nrain = 1\n");
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].reason, "unknown section");
}

TEST(LoadScenario, MalformedValues) {
  auto errs = errors_of("[vehicle]\nrole = host\ns = fast\n");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].line, 3);
  errs = errors_of("[vehicle]\nrole = pilot\n");
  ASSERT_FALSE(errs.empty());
  errs = errors_of("role = host\n");
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].reason, "key outside of any section");
  errs = errors_of(std::string(kMinimal) + "[run]\nduration = 1\n[run]\nseed = 2\n");
  ASSERT_FALSE(errs.empty());
  EXPECT_NE(errs[0].reason.find("repeated"), std::string::npos);
}

TEST(LoadScenario, CommentsAndWhitespace) {
  const ScenarioSpec s = load_scenario("# header\n  [vehicle]  \n role=host   # inline\n\n[run]\nseed = 18446744073709551615\n");
  EXPECT_EQ(s.seed, 18446744073709551615ull);
}

TEST(LoadScenario, OverlappingSpawn) {
  const auto errs = errors_of("[vehicle]\nrole = host\ns = 10\n[vehicle]\ns = 12\n");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].line, 4);
  EXPECT_NE(errs[0].reason.find("line 1"), std::string::npos);
  EXPECT_TRUE(errors_of("[vehicle]\nrole = host\ns = 10\n[vehicle]\ns = 12\nlane = 1\n").empty());
}

TEST(LoadScenario, TooManyAgents) {
  const auto errs = errors_of(std::string(kMinimal) + "[vehicle]\ns = 100\n[run]\nspawn_agents = 20\n");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs[0].reason.find("at most 20"), std::string::npos);
}

TEST(LoadScenario, TrackSegments) {
  const ScenarioSpec s = load_scenario(
      "[track]\nclosed = false\nsegment = straight 500\nsegment = arc 200 90\n" + std::string(kMinimal));
  ASSERT_EQ(s.track.segments.size(), 2u);
  EXPECT_EQ(s.track.segments[1].kind, Segment::Kind::kArc);
  EXPECT_NEAR(s.track.segments[1].arc_angle, kPi / 2, 1e-12);
  EXPECT_FALSE(errors_of("[track]\nsegment = straight 500\n" + std::string(kMinimal)).empty());
}

TEST(LoadScenario, TrackMismatchWithController) {
  const auto errs = errors_of("[track]\nlane_width = 3.5\n" + std::string(kMinimal));
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs.back().field, "controller");
}

TEST(Overrides, ApplyAfterText) {
  const ScenarioSpec s = load_scenario(std::string(kMinimal) + "[controller]\noffset_step = 0.1\n",
                                       {parse_override("controller.offset_step=0.2"),
                                        parse_override("run.seed=9"), parse_override("noise.preset=dynamic")});
  EXPECT_EQ(s.controller.offset_step, 0.2);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.noise.mae_to_middle, 0.397);
}

TEST(Overrides, Errors) {
  EXPECT_THROW(parse_override("offset_step=0.2"), std::invalid_argument);
  EXPECT_THROW(parse_override("controller.offset_step"), std::invalid_argument);
  EXPECT_FALSE(errors_of(kMinimal, {parse_override("controller.bogus=1")}).empty());
  EXPECT_FALSE(errors_of(kMinimal, {parse_override("vehicle.s=3")}).empty());
}

TEST(SetControllerField, Basic) {
  ControllerParams p;
  EXPECT_EQ(set_controller_field(p, "steer_lock", "0.4"), "");
  EXPECT_EQ(p.steer_lock, 0.4);
  EXPECT_FALSE(set_controller_field(p, "steer_lock", "x").empty());
  EXPECT_FALSE(set_controller_field(p, "nope", "1").empty());
}

TEST(LoadScenarioFile, MissingFileNamesPath) {
  try {
    load_scenario_file("/nonexistent/dir/x.scn");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(format_errors(e.errors()).find("/nonexistent/dir/x.scn"), std::string::npos);
  }
}

TEST(LoadScenarioFile, ShippedScenariosLoad) {
  for (const char* name : {"highway_traffic.scn", "empty_track.scn", "lane_keeping.scn", "slow_agent.scn"}) {
    EXPECT_NO_THROW(load_scenario_file(std::string(DPDRIVE_SCENARIO_DIR) + "/" + name)) << name;
  }
}
