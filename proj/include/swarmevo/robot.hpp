#pragma once

#include <numbers>

namespace swarmevo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct RobotBody {
  double body_radius = 0.06;
  double axle_length = 0.12;
};

/// Pose plus current wheel speeds of one differential-drive robot.
/// Heading is kept in (-pi, pi].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double left_wheel = 0.0;
  double right_wheel = 0.0;
  double body_radius = 0.06;
  double axle_length = 0.12;
};

/// Wraps any finite angle into (-pi, pi].
double wrap_angle(double radians);

}  // namespace swarmevo
