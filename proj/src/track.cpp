#include "dpdrive/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dpdrive/types.hpp"

namespace dpdrive {

double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

Segment Segment::straight(double length) {
  Segment s;
  s.kind = Kind::kStraight;
  s.length = length;
  return s;
}

Segment Segment::arc(double radius, double arc_angle) {
  Segment s;
  s.kind = Kind::kArc;
  s.radius = radius;
  s.arc_angle = arc_angle;
  return s;
}

double Segment::arc_length() const {
  return kind == Kind::kStraight ? length : radius * std::abs(arc_angle);
}

double Segment::curvature() const {
  if (kind == Kind::kStraight) return 0.0;
  return (arc_angle > 0.0 ? 1.0 : -1.0) / radius;
}

std::vector<std::string> TrackSpec::check() const {
  std::vector<std::string> errors;
  if (segments.empty()) errors.emplace_back("track has no segments");
  if (lane_count <= 0) errors.emplace_back("lane_count must be positive");
  if (!(lane_width > 0.0)) errors.emplace_back("lane_width must be positive");
  if (!(road_width >= lane_count * lane_width)) {
    errors.emplace_back("road_width must be at least lane_count * lane_width");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    std::ostringstream where;
    where << "segment " << i << ": ";
    if (seg.kind == Segment::Kind::kStraight) {
      if (!(seg.length > 0.0) || !std::isfinite(seg.length)) {
        errors.push_back(where.str() + "straight length must be positive");
      }
    } else {
      if (!(seg.radius > 0.0) || !std::isfinite(seg.radius)) {
        errors.push_back(where.str() + "arc radius must be positive");
      }
      if (seg.arc_angle == 0.0 || !std::isfinite(seg.arc_angle)) {
        errors.push_back(where.str() + "arc angle must be nonzero");
      }
    }
  }
  if (!errors.empty() || !closed) return errors;

  // A closed loop must return to its start point and heading.
  const Track probe(TrackSpec{segments, lane_count, lane_width, road_width, false});
  const double turn = probe.end_heading() / (2.0 * kPi);
  const double gap = std::hypot(probe.end_point().x, probe.end_point().y);
  if (std::abs(turn - std::round(turn)) > 1e-9 || std::round(turn) == 0.0) {
    errors.emplace_back("closed track: total turning is not a nonzero multiple of 2*pi");
  }
  if (gap > 1e-6 * std::max(1.0, probe.total_length())) {
    std::ostringstream msg;
    msg << "closed track: end point misses start by " << gap << " m";
    errors.push_back(msg.str());
  }
  return errors;
}

Track::Track(TrackSpec spec) : spec_(std::move(spec)) {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
  placed_.reserve(spec_.segments.size());
  for (const Segment& seg : spec_.segments) {
    if (seg.arc_length() <= 0.0) {
      throw std::invalid_argument("Track: segment with nonpositive length");
    }
    Placed p{seg, s, x, y, h};
    placed_.push_back(p);
    const TrackPose end = pose_in(p, seg.arc_length());
    x = end.point.x;
    y = end.point.y;
    h = end.heading;
    s += seg.arc_length();
  }
  if (placed_.empty()) throw std::invalid_argument("Track: no segments");
  total_length_ = s;
  end_point_ = {x, y};
  end_heading_ = h;
}

double Track::normalize(double s) const {
  if (!std::isfinite(s)) throw std::out_of_range("track position is not finite");
  if (spec_.closed) {
    double r = std::fmod(s, total_length_);
    if (r < 0.0) r += total_length_;
    if (r >= total_length_) r = 0.0;
    return r;
  }
  if (s < 0.0 || s > total_length_) {
    std::ostringstream msg;
    msg << "track position " << s << " outside open course [0, " << total_length_ << "]";
    throw std::out_of_range(msg.str());
  }
  return s;
}

std::size_t Track::segment_at(double s) const {
  // First segment whose start exceeds s, minus one.
  auto it = std::upper_bound(placed_.begin(), placed_.end(), s,
                             [](double v, const Placed& p) { return v < p.s0; });
  if (it == placed_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(placed_.begin(), it) - 1);
}

TrackPose Track::pose_in(const Placed& p, double u) const {
  TrackPose out;
  if (p.seg.kind == Segment::Kind::kStraight) {
    out.heading = p.h0;
    out.curvature = 0.0;
    out.point = {p.x0 + u * std::cos(p.h0), p.y0 + u * std::sin(p.h0)};
    return out;
  }
  const double sign = p.seg.arc_angle > 0.0 ? 1.0 : -1.0;
  const double r = p.seg.radius;
  const double k = sign / r;
  const double cx = p.x0 - sign * r * std::sin(p.h0);
  const double cy = p.y0 + sign * r * std::cos(p.h0);
  const double h = p.h0 + k * u;
  out.heading = h;
  out.curvature = k;
  out.point = {cx + sign * r * std::sin(h), cy - sign * r * std::cos(h)};
  return out;
}

TrackPose Track::pose(double s) const {
  const double sn = normalize(s);
  const Placed& p = placed_[segment_at(sn)];
  TrackPose out = pose_in(p, sn - p.s0);
  out.heading = wrap_angle(out.heading);
  return out;
}

double Track::signed_gap(double from_s, double to_s) const {
  double d = to_s - from_s;
  if (!spec_.closed) return d;
  const double L = total_length_;
  d = std::fmod(d, L);
  if (d > 0.5 * L) d -= L;
  if (d <= -0.5 * L) d += L;
  return d;
}

Point2 Track::to_world(double s, double lateral) const {
  const TrackPose tp = pose(s);
  return {tp.point.x - lateral * std::sin(tp.heading), tp.point.y + lateral * std::cos(tp.heading)};
}

FrenetPoint Track::project(Point2 p, double hint_s) const {
  double best_dist = std::numeric_limits<double>::infinity();
  double best_hint = std::numeric_limits<double>::infinity();
  FrenetPoint best;
  for (const Placed& seg : placed_) {
    const double len = seg.seg.arc_length();
    double u = 0.0;
    double lateral = 0.0;
    if (seg.seg.kind == Segment::Kind::kStraight) {
      const double dx = p.x - seg.x0;
      const double dy = p.y - seg.y0;
      const double c = std::cos(seg.h0);
      const double sn = std::sin(seg.h0);
      u = dx * c + dy * sn;
      lateral = -dx * sn + dy * c;
    } else {
      const double sign = seg.seg.arc_angle > 0.0 ? 1.0 : -1.0;
      const double r = seg.seg.radius;
      const double cx = seg.x0 - sign * r * std::sin(seg.h0);
      const double cy = seg.y0 + sign * r * std::cos(seg.h0);
      const double vx = p.x - cx;
      const double vy = p.y - cy;
      const double dist = std::hypot(vx, vy);
      const double phi = std::atan2(vy, vx);
      const double h = sign > 0.0 ? phi + 0.5 * kPi : phi - 0.5 * kPi;
      // Heading change from the segment start, measured in the turning
      // direction and centered on the arc's midpoint so points just
      // outside either end map to small negative/over-length values.
      const double mid = 0.5 * std::abs(seg.seg.arc_angle);
      const double swept = wrap_angle(sign * (h - seg.h0) - mid) + mid;
      u = swept * r;
      lateral = sign * (r - dist);
    }
    const double uc = std::clamp(u, 0.0, len);
    double dist;
    if (uc == u) {
      dist = std::abs(lateral);
    } else {
      const TrackPose end = pose_in(seg, uc);
      dist = std::hypot(p.x - end.point.x, p.y - end.point.y);
    }
    const double s = seg.s0 + uc;
    const double hint = std::abs(signed_gap(hint_s, s));
    const bool closer = dist < best_dist - 1e-12;
    const bool tie = std::abs(dist - best_dist) <= 1e-12 && hint < best_hint;
    if (closer || tie) {
      best_dist = dist;
      best_hint = hint;
      if (uc == u) {
        best = {s, lateral};
      } else {
        const TrackPose end = pose_in(seg, uc);
        const double dx = p.x - end.point.x;
        const double dy = p.y - end.point.y;
        best = {s, -dx * std::sin(end.heading) + dy * std::cos(end.heading)};
      }
    }
  }
  if (spec_.closed && best.s >= total_length_) best.s -= total_length_;
  return best;
}

double Track::lane_center(int index) const {
  return (0.5 * (spec_.lane_count + 1) - index) * spec_.lane_width;
}

TrackSpec stadium_track(double total_length, double radius) {
  const double straight = 0.5 * (total_length - 2.0 * kPi * radius);
  if (!(straight > 0.0)) {
    throw std::invalid_argument("stadium_track: loop too short for the requested radius");
  }
  TrackSpec spec;
  spec.segments = {Segment::straight(straight), Segment::arc(radius, kPi),
                   Segment::straight(straight), Segment::arc(radius, kPi)};
  return spec;
}

}  // namespace dpdrive
