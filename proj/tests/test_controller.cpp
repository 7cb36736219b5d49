#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpdrive/controller.hpp"
#include "dpdrive/reference/pseudocode.hpp"
#include "dpdrive/rng.hpp"

using namespace dpdrive;

namespace {

OpponentReading reading(double d, bool same_lane, double to_middle = 0.0, double speed = 10.0,
                        double yaw = 0.0) {
  OpponentReading r;
  r.id = 1;
  r.d_exact = d;
  r.same_lane = same_lane;
  r.to_middle = to_middle;
  r.speed = speed;
  r.yaw = yaw;
  return r;
}

AgentState state_with(AgentStateKind k, const OpponentReading& focus) { return {k, focus}; }

VehicleState moving(double speed) {
  VehicleState v;
  v.speed = speed;
  v.driven_wheel_speed = speed;
  v.wheel_avg_speed = speed;
  v.role = Role::kHost;
  return v;
}

}  // namespace

TEST(AgentStateTest, EmptyIsState0) {
  const AgentState a = agent_state({}, moving(20.0), ControllerParams{});
  EXPECT_EQ(a.value, AgentStateKind::kState0);
  EXPECT_FALSE(a.focus.has_value());
}

TEST(AgentStateTest, LeaderInOtherLaneIsState1) {
  const std::vector<OpponentReading> r = {reading(30.0, false)};
  const AgentState a = agent_state(r, moving(20.0), ControllerParams{});
  EXPECT_EQ(a.value, AgentStateKind::kState1);
  EXPECT_EQ(a.focus->d_exact, 30.0);
}

TEST(AgentStateTest, ClosingOnSameLaneLeaderIsState2) {
  ControllerParams p;
  p.brake_decel = 6.0;
  p.reaction_margin = 5.0;
  EXPECT_NEAR(needed_brake_distance(20.0, 5.0, p), 375.0 / 12.0 + 5.0, 1e-12);
  EXPECT_GT(needed_brake_distance(20.0, 5.0, p), 30.0);
  const std::vector<OpponentReading> r = {reading(30.0, true, 0.0, 5.0)};
  EXPECT_EQ(agent_state(r, moving(20.0), p).value, AgentStateKind::kState2);
  // A faster leader never needs braking beyond the margin.
  const std::vector<OpponentReading> fast = {reading(30.0, true, 0.0, 25.0)};
  EXPECT_EQ(agent_state(fast, moving(20.0), p).value, AgentStateKind::kState1);
}

TEST(AgentStateTest, AlongsideIsState3) {
  const std::vector<OpponentReading> r = {reading(3.0, false)};
  EXPECT_EQ(agent_state(r, moving(20.0), ControllerParams{}).value, AgentStateKind::kState3);
  const std::vector<OpponentReading> behind = {reading(-3.0, false)};
  EXPECT_EQ(agent_state(behind, moving(20.0), ControllerParams{}).value, AgentStateKind::kState3);
}

TEST(AgentStateTest, RearBand) {
  ControllerParams p;
  const std::vector<OpponentReading> r = {reading(-10.0, false)};
  EXPECT_EQ(agent_state(r, moving(20.0), p).value, AgentStateKind::kState3);
  p.rear_band = p.near_threshold;
  EXPECT_EQ(agent_state(r, moving(20.0), p).value, AgentStateKind::kState0);
  const std::vector<OpponentReading> far = {reading(-30.0, false)};
  EXPECT_EQ(agent_state(far, moving(20.0), ControllerParams{}).value, AgentStateKind::kState0);
}

TEST(AgentStateTest, BrakingOutranksAlongside) {
  const std::vector<OpponentReading> r = {reading(2.0, false), reading(12.0, true, 0.0, 0.0)};
  const AgentState a = agent_state(r, moving(20.0), ControllerParams{});
  EXPECT_EQ(a.value, AgentStateKind::kState2);
  EXPECT_EQ(a.focus->d_exact, 12.0);
  const std::vector<OpponentReading> r2 = {reading(2.0, false), reading(40.0, false)};
  EXPECT_EQ(agent_state(r2, moving(20.0), ControllerParams{}).value, AgentStateKind::kState3);
}

TEST(GetOffset, Examples) {
  ControllerParams p;
  p.offset_step = 0.1;
  ControllerState st = make_controller_state(p, 20.0);
  st.offset = 0.5;
  EXPECT_NEAR(get_offset(st, {}, 60, 60, 60), 0.4, 1e-12);

  st.offset = 0.0;
  EXPECT_NEAR(get_offset(st, state_with(AgentStateKind::kState1, reading(30, false, 2.0)), 60, 60, 60), -0.1,
              1e-12);
  st.offset = 0.0;
  EXPECT_NEAR(get_offset(st, state_with(AgentStateKind::kState1, reading(30, true, 0.0)), 20, 8, 60), 0.1,
              1e-12);
  st.offset = 0.0;
  EXPECT_NEAR(get_offset(st, state_with(AgentStateKind::kState1, reading(30, true, 0.0)), 8, 8, 20), -0.1,
              1e-12);
  st.offset = 0.0;
  EXPECT_NEAR(get_offset(st, state_with(AgentStateKind::kState1, reading(30, false, -2.0)), 60, 60, 60), 0.1,
              1e-12);
}

TEST(GetOffset, DecayNeverOvershoots) {
  ControllerParams p;
  ControllerState st = make_controller_state(p, 20.0);
  st.offset = 0.05;
  EXPECT_EQ(get_offset(st, {}, 60, 60, 60), 0.0);
  st.offset = -0.05;
  EXPECT_EQ(get_offset(st, {}, 60, 60, 60), 0.0);
}

TEST(GetOffset, HoldsWhileBrakingOrAlongside) {
  ControllerState st = make_controller_state(ControllerParams{}, 20.0);
  st.offset = 2.0;
  EXPECT_EQ(get_offset(st, state_with(AgentStateKind::kState2, reading(20, true)), 60, 20, 60), 2.0);
  EXPECT_EQ(get_offset(st, state_with(AgentStateKind::kState3, reading(2, false)), 60, 60, 60), 2.0);
}

TEST(GetOffset, LeftLaneLeaderDrivesOffsetToClamp) {
  ControllerParams p;
  ControllerState st = make_controller_state(p, 20.0);
  const AgentState a = state_with(AgentStateKind::kState1, reading(30, false, 4.0));
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double o = get_offset(st, a, 60, 60, 60);
    EXPECT_LE(o, prev);
    prev = o;
  }
  EXPECT_EQ(prev, -p.offset_limit);
  EXPECT_EQ(get_offset(st, a, 60, 60, 60), -p.offset_limit);
}

TEST(GetOffset, AlwaysWithinLimitAndStepBounded) {
  Rng rng(3);
  ControllerParams p;
  ControllerState st = make_controller_state(p, 20.0);
  for (int i = 0; i < 20000; ++i) {
    const auto kind = static_cast<AgentStateKind>(static_cast<int>(rng.uniform() * 4.0));
    const AgentState a = kind == AgentStateKind::kState0
                             ? AgentState{}
                             : state_with(kind, reading(10, false, rng.uniform(-6, 6)));
    const double before = st.offset;
    const double after = get_offset(st, a, rng.uniform(0, 60), rng.uniform(0, 60), rng.uniform(0, 60));
    EXPECT_LE(std::abs(after), p.offset_limit);
    EXPECT_LE(std::abs(after - before), p.offset_step + 1e-12);
  }
}

TEST(Steer, Examples) {
  const ControllerParams p;
  EXPECT_EQ(steer_command(0, 0, 0, p), 0.0);
  EXPECT_NEAR(steer_raw(0, 0.5, 0, p), (-0.5 / 13 - 0.5 / 13) / 0.366, 1e-12);
  EXPECT_NEAR(steer_command(0, 0.5, 0, p), -0.21017, 1e-5);
  EXPECT_NEAR(steer_raw(0, 5, 0, p), -1.2611, 1e-4);
  EXPECT_EQ(steer_command(0, 5, 0, p), -1.0);
  EXPECT_NEAR(steer_raw(0, -5, 0, p), 1.2611, 1e-4);
}

TEST(Steer, MiddleBandSlope) {
  const ControllerParams p;
  const double slope = -2.0 / (13.0 * 0.366);
  for (double tm = -3.9; tm < 3.9; tm += 0.3) {
    EXPECT_NEAR(steer_raw(0, tm + 0.1, 0, p) - steer_raw(0, tm, 0, p), 0.1 * slope, 1e-12);
  }
  // The offset enters with half the weight of to_middle.
  EXPECT_NEAR(steer_raw(0, 0, 1.0, p), 1.0 / (13.0 * 0.366), 1e-12);
  EXPECT_NEAR(steer_raw(0.1, 0, 0, p), 0.1 / 0.366, 1e-12);
}

TEST(FilterSteer, Examples) {
  ControllerParams p;
  EXPECT_EQ(filter_steer(0.2, {}, 0.0, p), 0.2);
  p.filter_mix_own = 0.5;
  p.filter_mix_agent = 0.5;
  const AgentState a = state_with(AgentStateKind::kState3, reading(2.0, false, 4.0, 20.0, 0.0366));
  EXPECT_NEAR(filter_steer(0.2, a, 0.0, p), 0.15, 1e-12);
  const AgentState aligned = state_with(AgentStateKind::kState3, reading(2.0, false, 4.0, 20.0, 0.0));
  EXPECT_EQ(filter_steer(0.0, aligned, 0.0, p), 0.0);
  // Outside the overlap band the filter is bypassed.
  const AgentState behind = state_with(AgentStateKind::kState3, reading(-8.0, false, 4.0, 20.0, 0.3));
  EXPECT_EQ(filter_steer(0.2, behind, 0.0, p), 0.2);
}

TEST(AllowedSpeed, Examples) {
  const ControllerParams p;
  const double vmax = p.v_max_host;
  EXPECT_NEAR(vmax, 20.56, 0.01);
  EXPECT_EQ(allowed_speed(0.0, vmax, p), vmax);
  EXPECT_EQ(allowed_speed(0.02, vmax, p), vmax);
  EXPECT_NEAR(std::sqrt(9.81 / 0.02), 22.15, 0.01);
  EXPECT_NEAR(allowed_speed(0.05, vmax, p), 14.01, 0.01);
  EXPECT_NEAR(allowed_speed(-0.05, vmax, p), 14.01, 0.01);
}

TEST(Accel, Examples) {
  const ControllerParams p;
  EXPECT_EQ(accel_command(10, 20, 10, p), 1.0);
  EXPECT_NEAR(traction_control(1.0, 20, 27, p), 0.5, 1e-12);
  EXPECT_NEAR(accel_command(20, 25, 27, p), 0.5, 1e-12);
  EXPECT_EQ(traction_control(0.3, 20, 32, p), 0.0);
  EXPECT_NEAR(accel_command(22, 20, 22, p), 20.0 / 22.0, 1e-12);
  EXPECT_EQ(accel_command(1, 0.5, 0, p), 0.0);
}

TEST(Brake, Examples) {
  const ControllerParams p;
  EXPECT_EQ(brake_command(10, 20, {}, 10, p), 0.0);
  EXPECT_EQ(brake_command(21, 20, {}, 21, p), 1.0);
  EXPECT_NEAR(anti_lock_brake(1.0, 20, 15.5, p), 0.5, 1e-12);
  EXPECT_EQ(anti_lock_brake(0.4, 2.5, 0.0, p), 0.4);
  const AgentState blocked = state_with(AgentStateKind::kState2, reading(20, true, 0, 0));
  EXPECT_EQ(brake_command(10, 20, blocked, 10, p), 1.0);
}

TEST(SlipControl, MonotoneInSlip) {
  const ControllerParams p;
  for (double base : {0.1, 0.5, 1.0}) {
    double prev = 2.0;
    for (double slip = 2.0; slip <= 40.0; slip += 0.01) {
      const double out = traction_control(base, 15.0, 15.0 + slip, p);
      EXPECT_LE(out, prev);
      EXPECT_GE(out, 0.0);
      prev = out;
    }
    prev = 2.0;
    for (double slip = 2.0; slip <= 30.0; slip += 0.01) {
      const double out = anti_lock_brake(base, 30.0, 30.0 - slip, p);
      EXPECT_LE(out, prev);
      EXPECT_GE(out, 0.0);
      prev = out;
    }
  }
}

TEST(ControlStep, EmptyRoadCruise) {
  ControllerState st = make_controller_state(ControllerParams{}, 20.0);
  const ControlCommand c = control_step(Indicators{}, {}, moving(10.0), 0.0, st);
  EXPECT_EQ(c.steer, 0.0);
  EXPECT_EQ(c.accel, 1.0);
  EXPECT_EQ(c.brake, 0.0);
}

TEST(ControlStep, BlockedLeaderForcesFullBrake) {
  ControllerState st = make_controller_state(ControllerParams{}, 20.0);
  VehicleState self = moving(15.0);
  const std::vector<OpponentReading> r = {reading(15.0, true, 0.0, 0.0)};
  const ControlCommand c = control_step(Indicators{}, r, self, 0.0, st);
  EXPECT_EQ(st.last_state.value, AgentStateKind::kState2);
  EXPECT_EQ(c.brake, 1.0);
}

TEST(ControlStep, AblationIgnoresNeighbors) {
  ControllerState st = make_controller_state(ControllerParams{}, 20.0);
  st.disable_agent_state = true;
  const std::vector<OpponentReading> r = {reading(15.0, true, 0.0, 0.0)};
  const ControlCommand c = control_step(Indicators{}, r, moving(15.0), 0.0, st);
  EXPECT_EQ(st.last_state.value, AgentStateKind::kState0);
  EXPECT_EQ(c.brake, 0.0);
}

TEST(ControlStep, FuzzActuatorRanges) {
  Rng rng(42);
  for (int i = 0; i < 100000; ++i) {
    ControllerState st = make_controller_state(ControllerParams{}, rng.uniform(1, 25));
    st.offset = rng.uniform(-6, 6);
    const Indicators ind{rng.uniform(-3.2, 3.2), rng.uniform(-10, 10), rng.uniform(0, 60), rng.uniform(0, 60),
                         rng.uniform(0, 60)};
    VehicleState self;
    self.speed = rng.uniform(0, 40);
    self.driven_wheel_speed = rng.uniform(0, 60);
    self.wheel_avg_speed = rng.uniform(0, 60);
    std::vector<OpponentReading> r;
    const int n = static_cast<int>(rng.uniform() * 4.0);
    for (int k = 0; k < n; ++k) {
      r.push_back(reading(rng.uniform(-60, 60), rng.uniform() < 0.5, rng.uniform(-6, 6), rng.uniform(0, 25),
                          rng.uniform(-3.2, 3.2)));
    }
    std::sort(r.begin(), r.end(),
              [](const auto& a, const auto& b) { return std::abs(a.d_exact) < std::abs(b.d_exact); });
    const ControlCommand c = control_step(ind, r, self, rng.uniform(-3.2, 3.2), st);
    ASSERT_GE(c.steer, -1.0);
    ASSERT_LE(c.steer, 1.0);
    ASSERT_GE(c.accel, 0.0);
    ASSERT_LE(c.accel, 1.0);
    ASSERT_GE(c.brake, 0.0);
    ASSERT_LE(c.brake, 1.0);
  }
}

TEST(Curvature, ArcEstimate) {
  CurvatureEstimator est;
  const double radius = 200.0;
  double k = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double s = 0.4 * i;
    k = est.update(std::remainder(s / radius, 2.0 * kPi), s, 10.0);
  }
  EXPECT_NEAR(k, 1.0 / radius, 1e-9);
}

TEST(Curvature, StraightAndWrap) {
  CurvatureEstimator est;
  for (int i = 0; i <= 100; ++i) est.update(kPi - 1e-9, 0.4 * i, 10.0);
  EXPECT_NEAR(est.current(), 0.0, 1e-12);
  CurvatureEstimator right;
  double k = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double s = 0.4 * i;
    k = right.update(std::remainder(kPi - s / 100.0, 2.0 * kPi), s, 10.0);
  }
  EXPECT_NEAR(k, -0.01, 1e-9);
}

TEST(Reference, ZeroTupleMatchesProduction) {
  const ControllerParams p;
  const double v_max = p.v_max_host;
  const reference::StateResult st = reference::agent_state({}, 0.0, p);
  EXPECT_EQ(st.agent_state, 0);
  const double offset = reference::get_offset(0.0, st.agent_state, 0.0, 60, 60, 60, p);
  const double steer = reference::filters(reference::steer(0, 0, offset, p), st.agent_state, 0, 0, 0, p);
  const double allowed = reference::allowed_speed(0.0, v_max, p);
  const ControlCommand ref{steer, reference::accel(0, allowed, 0, p), reference::brake(0, allowed, 0, 0, p)};
  EXPECT_EQ(ref.steer, 0.0);
  EXPECT_EQ(ref.accel, 1.0);
  EXPECT_EQ(ref.brake, 0.0);

  ControllerState cs = make_controller_state(p, v_max);
  const ControlCommand prod = control_step(Indicators{}, {}, VehicleState{}, 0.0, cs);
  EXPECT_EQ(prod.steer, ref.steer);
  EXPECT_EQ(prod.accel, ref.accel);
  EXPECT_EQ(prod.brake, ref.brake);
}
