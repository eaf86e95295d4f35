#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "dexfit/geometry.hpp"

namespace dexfit {

using Mat23 = Eigen::Matrix<double, 2, 3>;

/// Pinhole view. Extrinsics map world to camera: x_cam = R * x_world + t.
class CameraView {
 public:
  CameraView(double fx, double fy, double cx, double cy, int width, int height,
             const Mat3& rotation, const Vec3& translation);

  /// Camera looking from `eye` at `target`, image y pointing away from `up`.
  static CameraView look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fx,
                            double fy, int width, int height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 to_camera(const Vec3& world) const { return rotation_ * world + translation_; }
  Vec3 center() const { return -rotation_.transpose() * translation_; }

  /// Throws when the camera-frame depth is <= 1e-6.
  Vec2 project(const Vec3& world) const;
  /// Projection plus d(pixel)/d(world).
  Vec2 project(const Vec3& world, Mat23& jacobian) const;

  Vec3 backproject(const Vec2& pixel, double depth) const;
  /// Unit world-space ray from the camera center through `pixel`.
  Ray pixel_ray(const Vec2& pixel) const;

  bool in_image(const Vec2& pixel) const;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
  Mat3 rotation_;
  Vec3 translation_;
};

inline constexpr double kMinCameraDepth = 1e-6;

/// Row-major depth image in meters; zero marks a missing return.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 0.0) {}

  double at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
  static bool valid(double d) { return d > 0.0; }
  std::size_t valid_count() const;
};

using PointCloud = std::vector<Vec3>;

/// Face and barycentric weights on a model's rest mesh.
struct SurfaceAnchor {
  int face = -1;
  Vec3 bary = Vec3::Zero();

  Vec3 point_on(const TriMesh& mesh) const {
    return bary[0] * mesh.corner(face, 0) + bary[1] * mesh.corner(face, 1) +
           bary[2] * mesh.corner(face, 2);
  }
};

/// One world point per valid pixel, view-major then row-major.
PointCloud merge_point_clouds(std::span<const CameraView> views, std::span<const DepthMap> depths);

/// Casts the camera ray through `pixel` onto the posed mesh. Because the
/// object moves rigidly, the hit face and weights also address the rest mesh.
SurfaceAnchor anchor_keypoint(const CameraView& view, const Vec2& pixel, const IndexedMesh& posed);

}  // namespace dexfit
