#include "dexfit/rotation.hpp"

#include <cmath>
#include <numbers>

namespace dexfit {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

Mat3 rodrigues(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 k = skew(w);
  double a, b;  // sin(t)/t, (1 - cos(t))/t^2
  if (theta2 < 1e-10) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 so3_left_jacobian(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 k = skew(w);
  double b, c;  // (1 - cos(t))/t^2, (t - sin(t))/t^3
  if (theta2 < 1e-8) {
    b = 0.5 - theta2 / 24.0;
    c = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    const double theta = std::sqrt(theta2);
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Mat3::Identity() + b * k + c * k * k;
}

Vec3 rotation_log(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return canonical_axis_angle(aa.angle() * aa.axis());
}

Vec3 canonical_axis_angle(const Vec3& w) {
  constexpr double pi = std::numbers::pi;
  const double theta = w.norm();
  if (theta <= pi) return w;
  const Vec3 axis = w / theta;
  double reduced = std::fmod(theta, 2.0 * pi);
  if (reduced > pi) reduced -= 2.0 * pi;
  return reduced * axis;
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  return Eigen::AngleAxisd(a.transpose() * b).angle();
}

}  // namespace dexfit
