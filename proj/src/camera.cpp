#include "dexfit/camera.hpp"

#include <cmath>

namespace dexfit {

CameraView::CameraView(double fx, double fy, double cx, double cy, int width, int height,
                       const Mat3& rotation, const Vec3& translation)
    : fx_(fx),
      fy_(fy),
      cx_(cx),
      cy_(cy),
      width_(width),
      height_(height),
      rotation_(rotation),
      translation_(translation) {
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error("resolution must be positive");
  if ((rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(rotation.determinant() - 1.0) > 1e-9)
    throw Error("camera rotation is not a proper rotation");
  if (!translation.allFinite()) throw Error("camera translation is not finite");
}

CameraView CameraView::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fx,
                               double fy, int width, int height) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  return CameraView(fx, fy, 0.5 * (width - 1), 0.5 * (height - 1), width, height, r, -r * eye);
}

Vec2 CameraView::project(const Vec3& world) const {
  const Vec3 c = to_camera(world);
  if (c.z() <= kMinCameraDepth) throw Error("behind camera");
  return {fx_ * c.x() / c.z() + cx_, fy_ * c.y() / c.z() + cy_};
}

Vec2 CameraView::project(const Vec3& world, Mat23& jacobian) const {
  const Vec3 c = to_camera(world);
  if (c.z() <= kMinCameraDepth) throw Error("behind camera");
  const double iz = 1.0 / c.z();
  Mat23 dpix_dcam;
  dpix_dcam << fx_ * iz, 0.0, -fx_ * c.x() * iz * iz, 0.0, fy_ * iz, -fy_ * c.y() * iz * iz;
  jacobian = dpix_dcam * rotation_;
  return {fx_ * c.x() * iz + cx_, fy_ * c.y() * iz + cy_};
}

Vec3 CameraView::backproject(const Vec2& pixel, double depth) const {
  if (!(depth > 0.0)) throw Error("depth must be positive");
  const Vec3 c((pixel.x() - cx_) / fx_ * depth, (pixel.y() - cy_) / fy_ * depth, depth);
  return rotation_.transpose() * (c - translation_);
}

Ray CameraView::pixel_ray(const Vec2& pixel) const {
  const Vec3 dir_cam((pixel.x() - cx_) / fx_, (pixel.y() - cy_) / fy_, 1.0);
  return Ray(center(), (rotation_.transpose() * dir_cam).normalized());
}

bool CameraView::in_image(const Vec2& pixel) const {
  return pixel.x() >= -0.5 && pixel.y() >= -0.5 && pixel.x() < width_ - 0.5 &&
         pixel.y() < height_ - 0.5;
}

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (double d : depth) n += valid(d) ? 1 : 0;
  return n;
}

PointCloud merge_point_clouds(std::span<const CameraView> views, std::span<const DepthMap> depths) {
  if (views.size() != depths.size()) throw Error("one depth map per view required");
  PointCloud cloud;
  for (std::size_t c = 0; c < views.size(); ++c) {
    const auto& view = views[c];
    const auto& map = depths[c];
    if (map.width != view.width() || map.height != view.height())
      throw Error("depth map resolution does not match view " + std::to_string(c));
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const double d = map.at(x, y);
        if (DepthMap::valid(d)) cloud.push_back(view.backproject(Vec2(x, y), d));
      }
    }
  }
  return cloud;
}

SurfaceAnchor anchor_keypoint(const CameraView& view, const Vec2& pixel, const IndexedMesh& posed) {
  const auto hit = ray_cast(posed.tree, posed.mesh, view.pixel_ray(pixel));
  if (!hit) throw Error("keypoint off object");
  return SurfaceAnchor{hit->face, hit->bary};
}

}  // namespace dexfit
