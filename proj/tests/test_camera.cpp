#include "doctest.h"

#include "dexfit/camera.hpp"
#include "dexfit/synth.hpp"

using namespace dexfit;

namespace {
CameraView front_camera() {
  return CameraView::look_at(Vec3(0, 0, 2), Vec3::Zero(), Vec3::UnitY(), 100, 100, 101, 81);
}
}  // namespace

TEST_CASE("projection and back-projection round trip") {
  const CameraView view = front_camera();
  CHECK((view.center() - Vec3(0, 0, 2)).norm() < 1e-12);
  const Vec2 c = view.project(Vec3::Zero());
  CHECK(c.x() == doctest::Approx(50.0));
  CHECK(c.y() == doctest::Approx(40.0));
  const Vec3 p(0.1, -0.2, 0.3);
  const double depth = view.to_camera(p).z();
  CHECK((view.backproject(view.project(p), depth) - p).norm() < 1e-12);
  CHECK_THROWS_WITH(view.project(Vec3(0, 0, 3)), "behind camera");
  CHECK_THROWS_AS(view.backproject(Vec2(1, 1), 0.0), Error);
}

TEST_CASE("projection jacobian matches finite differences") {
  const CameraView view = CameraView::look_at(Vec3(0.4, -0.3, 0.5), Vec3(0, 0, 0.05), Vec3::UnitZ(), 200, 210, 160, 120);
  const Vec3 p(0.02, 0.03, 0.01);
  Mat23 j;
  view.project(p, j);
  const double h = 1e-7;
  for (int k = 0; k < 3; ++k) {
    Vec3 dp = Vec3::Zero();
    dp[k] = h;
    const Vec2 fd = (view.project(p + dp) - view.project(p - dp)) / (2 * h);
    CHECK((fd - j.col(k)).norm() < 1e-5 * fd.norm() + 1e-9);
  }
}

TEST_CASE("image bounds and pixel rays") {
  const CameraView view = front_camera();
  CHECK(view.in_image(Vec2(-0.5, -0.5)));
  CHECK_FALSE(view.in_image(Vec2(100.5, 0)));
  CHECK(view.in_image(Vec2(100.49, 80.49)));
  const Ray r = view.pixel_ray(Vec2(50, 40));
  CHECK((r.direction - Vec3(0, 0, -1)).norm() < 1e-12);
  CHECK_THROWS_AS(CameraView(0, 1, 0, 0, 10, 10, Mat3::Identity(), Vec3::Zero()), Error);
  CHECK_THROWS_AS(CameraView(1, 1, 0, 0, 10, 10, 2 * Mat3::Identity(), Vec3::Zero()), Error);
}

TEST_CASE("point cloud merge") {
  const CameraView view = front_camera();
  DepthMap d(view.width(), view.height());
  d.at(50, 40) = 2.0;
  d.at(0, 0) = 1.0;
  const std::vector<CameraView> views = {view, view};
  const std::vector<DepthMap> depths = {d, d};
  const PointCloud cloud = merge_point_clouds(views, depths);
  REQUIRE(cloud.size() == 4);
  CHECK(cloud[1].norm() < 1e-12);  // row-major: (0,0) first, then the center
  CHECK(d.valid_count() == 2);
  const std::vector<DepthMap> wrong = {DepthMap(3, 3), d};
  CHECK_THROWS_AS(merge_point_clouds(views, wrong), Error);
}

TEST_CASE("keypoint anchoring") {
  const CameraView view = front_camera();
  const IndexedMesh box(make_box(Vec3(0.4, 0.4, 0.4)));
  const SurfaceAnchor a = anchor_keypoint(view, Vec2(55, 42), box);
  const Vec3 p = a.point_on(box.mesh);
  CHECK(p.z() == doctest::Approx(0.2));
  CHECK((view.project(p) - Vec2(55, 42)).norm() < 1e-9);
  CHECK_THROWS_WITH(anchor_keypoint(view, Vec2(0, 0), box), "keypoint off object");
}
