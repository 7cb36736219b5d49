#include "dpdrive/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "dpdrive/controller.hpp"
#include "dpdrive/reference/pseudocode.hpp"
#include "dpdrive/rng.hpp"

namespace dpdrive {

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AlgorithmCheck& c) { return c.passed; });
}

std::vector<std::string> VerifyReport::failing() const {
  std::vector<std::string> names;
  for (const AlgorithmCheck& c : checks) {
    if (!c.passed) names.push_back(c.name);
  }
  return names;
}

namespace {

struct Tuple {
  std::vector<OpponentReading> readings;
  Indicators ind;
  VehicleState self;
  double self_yaw = 0.0;
  double offset = 0.0;
  double steer_in = 0.0;
  double accel_in = 0.0;
  double brake_in = 0.0;
  double allowed = 0.0;
  double curvature = 0.0;
  int state = 0;
};

// Inputs spread across every branch: near and far readings, both lateral
// bands, D values on both sides of the occupancy gap, slips on both sides of
// the thresholds, and some exact zeros.
Tuple draw(Rng& rng) {
  Tuple t;
  auto pick = [&](double lo, double hi) { return rng.uniform(lo, hi); };
  auto zero_or = [&](double v) { return rng.uniform() < 0.05 ? 0.0 : v; };

  const int n = static_cast<int>(rng.uniform() * 6.0);
  for (int i = 0; i < n; ++i) {
    OpponentReading r;
    r.id = i + 1;
    r.d_exact = pick(-70.0, 70.0);
    if (rng.uniform() < 0.3) r.d_exact = pick(-14.0, 14.0);
    r.to_middle = pick(-6.5, 6.5);
    r.lane_index = r.to_middle > 2.0 ? 1 : (r.to_middle < -2.0 ? 3 : 2);
    r.yaw = pick(-kPi, kPi);
    r.speed = pick(0.0, 25.0);
    r.same_lane = rng.uniform() < 0.5;
    t.readings.push_back(r);
  }
  std::sort(t.readings.begin(), t.readings.end(), [](const OpponentReading& a, const OpponentReading& b) {
    const double da = std::abs(a.d_exact), db = std::abs(b.d_exact);
    return da != db ? da < db : a.id < b.id;
  });

  t.ind.angle = zero_or(pick(-0.6, 0.6));
  t.ind.to_middle = zero_or(pick(-8.0, 8.0));
  t.ind.d1 = pick(0.0, 60.0);
  t.ind.d2 = pick(0.0, 60.0);
  t.ind.d3 = pick(0.0, 60.0);
  t.self.speed = zero_or(pick(0.0, 30.0));
  t.self.driven_wheel_speed = std::max(0.0, t.self.speed + pick(-3.0, 20.0));
  t.self.wheel_avg_speed = std::max(0.0, t.self.speed - pick(-1.0, 12.0));
  t.self_yaw = pick(-kPi, kPi);
  t.offset = zero_or(pick(-8.0, 8.0));
  t.steer_in = pick(-1.0, 1.0);
  t.accel_in = pick(0.0, 1.0);
  t.brake_in = pick(0.0, 1.0);
  t.allowed = pick(0.0, 30.0);
  t.curvature = zero_or(pick(-0.05, 0.05));
  t.state = static_cast<int>(rng.uniform() * 4.0);
  return t;
}

std::vector<reference::Agent> as_agents(const std::vector<OpponentReading>& readings) {
  std::vector<reference::Agent> agents;
  for (const OpponentReading& r : readings) {
    agents.push_back({r.id, r.d_exact, r.to_middle, r.yaw, r.speed, r.same_lane});
  }
  return agents;
}

AgentState make_state(const Tuple& t) {
  AgentState a;
  a.value = static_cast<AgentStateKind>(t.state);
  if (t.state != 0) {
    OpponentReading r;
    r.d_exact = t.readings.empty() ? 3.0 : t.readings.front().d_exact;
    r.to_middle = t.readings.empty() ? 0.0 : t.readings.front().to_middle;
    r.yaw = t.readings.empty() ? 0.0 : t.readings.front().yaw;
    a.focus = r;
  }
  return a;
}

double dev(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b) ? 0.0 : INFINITY;
  return std::abs(a - b);
}

}  // namespace

VerifyReport verify_controller(const ControllerParams& prod, const ControllerParams& ref,
                               std::uint64_t seed, long tuples, double tolerance) {
  VerifyReport report;
  report.tolerance = tolerance;

  using Check = std::function<double(const Tuple&)>;
  const std::vector<std::pair<std::pair<const char*, const char*>, Check>> algorithms = {
      {{"A1", "steering"},
       [&](const Tuple& t) {
         return dev(steer_command(t.ind.angle, t.ind.to_middle, t.offset, prod),
                    reference::steer(t.ind.angle, t.ind.to_middle, t.offset, ref));
       }},
      {{"A2", "overtaking offset"},
       [&](const Tuple& t) {
         ControllerState cs = make_controller_state(prod, prod.v_max_host);
         cs.offset = t.offset;
         const AgentState a = make_state(t);
         const double tm = a.focus ? a.focus->to_middle : 0.0;
         return dev(get_offset(cs, a, t.ind.d1, t.ind.d2, t.ind.d3),
                    reference::get_offset(t.offset, t.state, tm, t.ind.d1, t.ind.d2, t.ind.d3, ref));
       }},
      {{"A3", "steering filter"},
       [&](const Tuple& t) {
         const AgentState a = make_state(t);
         const double d = a.focus ? a.focus->d_exact : 0.0;
         const double yaw = a.focus ? a.focus->yaw : 0.0;
         return dev(filter_steer(t.steer_in, a, t.self_yaw, prod),
                    reference::filters(t.steer_in, t.state, d, yaw, t.self_yaw, ref));
       }},
      {{"A4", "throttle and allowed speed"},
       [&](const Tuple& t) {
         const double a = dev(allowed_speed(t.curvature, prod.v_max_host, prod),
                              reference::allowed_speed(t.curvature, ref.v_max_host, ref));
         const double b = dev(accel_command(t.self.speed, t.allowed, t.self.driven_wheel_speed, prod),
                              reference::accel(t.self.speed, t.allowed, t.self.driven_wheel_speed, ref));
         return std::max(a, b);
       }},
      {{"A5", "traction control"},
       [&](const Tuple& t) {
         return dev(traction_control(t.accel_in, t.self.speed, t.self.driven_wheel_speed, prod),
                    reference::tcs(t.accel_in, t.self.speed, t.self.driven_wheel_speed, ref));
       }},
      {{"A6", "brake"},
       [&](const Tuple& t) {
         return dev(brake_command(t.self.speed, t.allowed, make_state(t), t.self.wheel_avg_speed, prod),
                    reference::brake(t.self.speed, t.allowed, t.state, t.self.wheel_avg_speed, ref));
       }},
      {{"A7", "anti-lock brake"},
       [&](const Tuple& t) {
         return dev(anti_lock_brake(t.brake_in, t.self.speed, t.self.wheel_avg_speed, prod),
                    reference::abs_filter(t.brake_in, t.self.speed, t.self.wheel_avg_speed, ref));
       }},
      {{"A8", "agent state"},
       [&](const Tuple& t) {
         const AgentState a = agent_state(t.readings, t.self, prod);
         const reference::StateResult r = reference::agent_state(as_agents(t.readings), t.self.speed, ref);
         const int prod_focus = a.focus ? a.focus->id : -1;
         const int ref_focus = r.focus >= 0 ? t.readings[static_cast<std::size_t>(r.focus)].id : -1;
         return (to_int(a.value) == r.agent_state && prod_focus == ref_focus) ? 0.0 : 1.0;
       }},
      {{"pipeline", "full control step"},
       [&](const Tuple& t) {
         ControllerState cs = make_controller_state(prod, prod.v_max_host);
         cs.offset = t.offset;
         const ControlCommand c = control_step(t.ind, t.readings, t.self, t.self_yaw, cs);

         // A fresh curvature estimate is zero.
         const std::vector<reference::Agent> agents = as_agents(t.readings);
         const reference::StateResult st = reference::agent_state(agents, t.self.speed, ref);
         const reference::Agent* focus = st.focus >= 0 ? &agents[static_cast<std::size_t>(st.focus)] : nullptr;
         const double tm = focus ? focus->to_middle : 0.0;
         const double offset =
             reference::get_offset(t.offset, st.agent_state, tm, t.ind.d1, t.ind.d2, t.ind.d3, ref);
         double steer = reference::steer(t.ind.angle, t.ind.to_middle, offset, ref);
         steer = reference::filters(steer, st.agent_state, focus ? focus->d_exact : 0.0,
                                    focus ? focus->yaw : 0.0, t.self_yaw, ref);
         const double allowed = reference::allowed_speed(0.0, ref.v_max_host, ref);
         const double accel = reference::accel(t.self.speed, allowed, t.self.driven_wheel_speed, ref);
         const double brake =
             reference::brake(t.self.speed, allowed, st.agent_state, t.self.wheel_avg_speed, ref);
         return std::max({dev(c.steer, steer), dev(c.accel, accel), dev(c.brake, brake)});
       }},
  };

  std::uint64_t index = 0;
  for (const auto& [label, check] : algorithms) {
    Rng rng(derive_seed(seed ^ (++index * 0x100000001B3ULL), Stream::kSpawn));
    AlgorithmCheck c;
    c.name = label.first;
    c.title = label.second;
    for (long i = 0; i < tuples; ++i) {
      c.max_deviation = std::max(c.max_deviation, check(draw(rng)));
      ++c.tuples;
    }
    c.passed = c.max_deviation <= tolerance;
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace dpdrive
