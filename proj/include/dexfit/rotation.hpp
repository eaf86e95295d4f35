#pragma once

#include <Eigen/Geometry>

#include "dexfit/geometry.hpp"

namespace dexfit {

Mat3 skew(const Vec3& v);

/// Rodrigues' formula, R = exp([w]x). Series expansion near zero.
Mat3 rodrigues(const Vec3& axis_angle);

/// Left Jacobian of SO(3): exp(w + d) ~= exp(J(w) d) exp(w) for small d,
/// hence dR/dw_i = [J(w) e_i]x R.
Mat3 so3_left_jacobian(const Vec3& axis_angle);

/// Inverse of rodrigues with angle in [0, pi].
Vec3 rotation_log(const Mat3& rotation);

/// Same rotation with magnitude kept in [0, pi].
Vec3 canonical_axis_angle(const Vec3& axis_angle);

/// Geodesic angle between two rotations, radians.
double rotation_angle_between(const Mat3& a, const Mat3& b);

}  // namespace dexfit
