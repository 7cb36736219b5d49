#pragma once

#include <memory>
#include <vector>

#include "dpdrive/track.hpp"
#include "dpdrive/world.hpp"

namespace testutil {

struct Place {
  double s = 0.0;
  double lateral = 0.0;
  double yaw_rel = 0.0;
  double speed = 0.0;
};

inline std::shared_ptr<const dpdrive::Track> loop_track() {
  return std::make_shared<const dpdrive::Track>(dpdrive::stadium_track(4000.0, 300.0));
}

inline std::shared_ptr<const dpdrive::Track> straight_track(double length = 2000.0) {
  dpdrive::TrackSpec spec;
  spec.closed = false;
  spec.segments = {dpdrive::Segment::straight(length)};
  return std::make_shared<const dpdrive::Track>(spec);
}

inline dpdrive::WorldState make_world(std::shared_ptr<const dpdrive::Track> track,
                                      const std::vector<Place>& places) {
  dpdrive::WorldState w;
  w.track = std::move(track);
  for (std::size_t i = 0; i < places.size(); ++i) {
    dpdrive::Vehicle v;
    v.id = static_cast<int>(i);
    v.state.s = places[i].s;
    v.state.lateral = places[i].lateral;
    v.state.yaw_rel = places[i].yaw_rel;
    v.state.speed = places[i].speed;
    v.state.role = i == 0 ? dpdrive::Role::kHost : dpdrive::Role::kAgent;
    w.vehicles.push_back(v);
  }
  return w;
}

}  // namespace testutil
