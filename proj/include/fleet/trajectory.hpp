#pragma once

#include <utility>
#include <vector>

#include "fleet/drivetrain.hpp"

namespace fleet {

/// Closed leader path traversed counter-clockwise (circle) or in listed order
/// (waypoint loop) at constant speed.
struct TrajectorySpec {
  enum class Kind { Circle, Waypoints };
  Kind kind = Kind::Circle;
  Point2 center{0.0, 0.0};
  double radius_m = 1.2;
  double start_angle_rad = 0.0;
  std::vector<Point2> waypoints;
  double speed_mps = 0.06;

  void validate() const;
  double length() const;
  bool operator==(const TrajectorySpec&) const = default;
};

struct LeaderCommand {
  Pose pose;
  BodyVelocity vel;
};

/// Reference pose and feed-forward velocity at arc length `s` (wrapped).
LeaderCommand leader_at_arc(const TrajectorySpec& traj, double s);

/// Same, parameterized by time since start at the nominal speed.
LeaderCommand leader_command(double t_s, const TrajectorySpec& traj);

/// Arc length of the path point closest to `p`, in [0, length).
double arc_position(const TrajectorySpec& traj, const Point2& p);

/// Planar distance from a point to the path.
double distance_to_path(const TrajectorySpec& traj, const Point2& p);

}  // namespace fleet
