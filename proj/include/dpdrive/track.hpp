#pragma once

#include <string>
#include <vector>

namespace dpdrive {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  enum class Kind { kStraight, kArc };

  Kind kind = Kind::kStraight;
  double length = 0.0;     // straight only
  double radius = 0.0;     // arc only
  double arc_angle = 0.0;  // arc only, signed; positive turns left

  static Segment straight(double length);
  static Segment arc(double radius, double arc_angle);

  double arc_length() const;
  double curvature() const;
};

struct TrackSpec {
  std::vector<Segment> segments;
  int lane_count = 3;
  double lane_width = 4.0;
  double road_width = 13.0;
  bool closed = true;

  // Returns human-readable invariant violations; empty when valid.
  std::vector<std::string> check() const;
};

struct TrackPose {
  double heading = 0.0;
  double curvature = 0.0;
  Point2 point;
};

struct FrenetPoint {
  double s = 0.0;
  double lateral = 0.0;
};

// Immutable geometry built from a validated TrackSpec. Arc length s is
// measured along the centerline from the start of the first segment, which
// sits at the origin heading along +x.
class Track {
 public:
  explicit Track(TrackSpec spec);

  const TrackSpec& spec() const { return spec_; }
  double total_length() const { return total_length_; }
  bool closed() const { return spec_.closed; }
  // Unwrapped heading and position at the end of the last segment.
  double end_heading() const { return end_heading_; }
  Point2 end_point() const { return end_point_; }

  // Wraps s into [0, total_length) on closed loops; throws std::out_of_range
  // for s outside [0, total_length] on open courses.
  double normalize(double s) const;

  TrackPose pose(double s) const;

  // Shortest signed along-track distance from a to b. On closed loops the
  // result lies in (-L/2, L/2].
  double signed_gap(double from_s, double to_s) const;

  Point2 to_world(double s, double lateral) const;

  // Nearest centerline point. hint_s breaks ties between segments that are
  // equally close (e.g. on a loop's seam).
  FrenetPoint project(Point2 p, double hint_s) const;

  // Lateral position of the center of lane `index` (1 = leftmost).
  double lane_center(int index) const;

 private:
  struct Placed {
    Segment seg;
    double s0 = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double h0 = 0.0;
  };

  std::size_t segment_at(double s) const;
  TrackPose pose_in(const Placed& p, double u) const;

  TrackSpec spec_;
  std::vector<Placed> placed_;
  double total_length_ = 0.0;
  Point2 end_point_;
  double end_heading_ = 0.0;
};

// Default highway: a closed stadium loop of the given total length whose
// two semicircular ends have the given radius, three lanes of 4 m on a 13 m
// road.
TrackSpec stadium_track(double total_length, double radius);

double wrap_angle(double a);

}  // namespace dpdrive
