#include "fleet/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fleet {

void TrajectorySpec::validate() const {
  if (!(speed_mps > 0.0)) {
    throw std::invalid_argument("trajectory speed must be positive");
  }
  if (kind == Kind::Circle) {
    if (!(radius_m > 0.0)) {
      throw std::invalid_argument("circle radius must be positive");
    }
    return;
  }
  if (waypoints.size() < 3) {
    throw std::invalid_argument("waypoint loop needs at least three points");
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const Point2& a = waypoints[i];
    const Point2& b = waypoints[(i + 1) % waypoints.size()];
    if (std::hypot(b.x - a.x, b.y - a.y) < 1e-9) {
      throw std::invalid_argument("waypoint loop has a zero-length segment");
    }
  }
}

double TrajectorySpec::length() const {
  if (kind == Kind::Circle) {
    return 2.0 * std::numbers::pi * radius_m;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const Point2& a = waypoints[i];
    const Point2& b = waypoints[(i + 1) % waypoints.size()];
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

LeaderCommand leader_at_arc(const TrajectorySpec& traj, double s) {
  const double len = traj.length();
  s = std::fmod(s, len);
  if (s < 0.0) {
    s += len;
  }
  LeaderCommand out;
  if (traj.kind == TrajectorySpec::Kind::Circle) {
    const double phi = traj.start_angle_rad + s / traj.radius_m;
    out.pose.x = traj.center.x + traj.radius_m * std::cos(phi);
    out.pose.y = traj.center.y + traj.radius_m * std::sin(phi);
    out.pose.theta = wrap_angle(phi + 0.5 * std::numbers::pi);
    out.vel = {traj.speed_mps, traj.speed_mps / traj.radius_m};
    return out;
  }
  // polyline: straight segments, heading jumps at corners
  const auto& wp = traj.waypoints;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const Point2& a = wp[i];
    const Point2& b = wp[(i + 1) % wp.size()];
    const double seg = std::hypot(b.x - a.x, b.y - a.y);
    if (s <= seg || i + 1 == wp.size()) {
      const double u = std::clamp(s / seg, 0.0, 1.0);
      out.pose.x = a.x + u * (b.x - a.x);
      out.pose.y = a.y + u * (b.y - a.y);
      out.pose.theta = std::atan2(b.y - a.y, b.x - a.x);
      out.vel = {traj.speed_mps, 0.0};
      return out;
    }
    s -= seg;
  }
  return out;
}

LeaderCommand leader_command(double t_s, const TrajectorySpec& traj) {
  return leader_at_arc(traj, traj.speed_mps * t_s);
}

double arc_position(const TrajectorySpec& traj, const Point2& p) {
  const double len = traj.length();
  if (traj.kind == TrajectorySpec::Kind::Circle) {
    const double phi = std::atan2(p.y - traj.center.y, p.x - traj.center.x) - traj.start_angle_rad;
    double s = std::fmod(phi * traj.radius_m, len);
    return s < 0.0 ? s + len : s;
  }
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double base = 0.0;
  const auto& wp = traj.waypoints;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const Point2& a = wp[i];
    const Point2& b = wp[(i + 1) % wp.size()];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double seg = std::hypot(dx, dy);
    const double u = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / (seg * seg), 0.0, 1.0);
    const double dist = std::hypot(p.x - (a.x + u * dx), p.y - (a.y + u * dy));
    if (dist < best) {
      best = dist;
      best_s = base + u * seg;
    }
    base += seg;
  }
  return best_s >= len ? 0.0 : best_s;
}

double distance_to_path(const TrajectorySpec& traj, const Point2& p) {
  if (traj.kind == TrajectorySpec::Kind::Circle) {
    return std::abs(std::hypot(p.x - traj.center.x, p.y - traj.center.y) - traj.radius_m);
  }
  double best = std::numeric_limits<double>::infinity();
  const auto& wp = traj.waypoints;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const Point2& a = wp[i];
    const Point2& b = wp[(i + 1) % wp.size()];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double u = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - (a.x + u * dx), p.y - (a.y + u * dy)));
  }
  return best;
}

}  // namespace fleet
