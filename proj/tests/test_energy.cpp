#include <random>

#include "doctest.h"

#include "dexfit/energy.hpp"
#include "dexfit/synth.hpp"

using namespace dexfit;

namespace {

struct BoxScene {
  SceneModels models;
  ScenePose pose;
  std::vector<CameraView> views;
};

BoxScene box_scene() {
  BoxScene s;
  s.models.objects.push_back(make_box(Vec3(0.1, 0.1, 0.1)));
  s.pose.objects.push_back(RigidPose{});
  s.views.push_back(CameraView::look_at(Vec3(0.3, 0.2, 0.5), Vec3::Zero(), Vec3::UnitZ(), 200, 200, 160, 120));
  return s;
}

}  // namespace

TEST_CASE("barycentric gradient matches frozen-weight differences") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec3 d(n(rng), n(rng), n(rng)), a(n(rng), n(rng), n(rng)), b(n(rng), n(rng), n(rng)), c(n(rng), n(rng), n(rng));
  const Vec3 bary(0.2, 0.3, 0.5);
  const auto g = barycentric_grad(d, a, b, c, bary);
  auto f = [&](const Vec3& aa, const Vec3& bb, const Vec3& cc) {
    return (d - bary[0] * aa - bary[1] * bb - bary[2] * cc).squaredNorm();
  };
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = h * Vec3::Unit(k);
    CHECK(g.da[k] == doctest::Approx((f(a + e, b, c) - f(a - e, b, c)) / (2 * h)).epsilon(1e-7));
    CHECK(g.db[k] == doctest::Approx((f(a, b + e, c) - f(a, b - e, c)) / (2 * h)).epsilon(1e-7));
    CHECK(g.dc[k] == doctest::Approx((f(a, b, c + e) - f(a, b, c - e)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("depth term is in squared millimeters") {
  BoxScene s = box_scene();
  PointCloud cloud = {Vec3(0.0, 0.0, 0.051), Vec3(0.02, 0.01, 0.05)};
  const TermValue t = e_depth(s.pose, cloud, s.models);
  CHECK(t.value == doctest::Approx(0.5));  // (1 mm^2 + 0) / 2
  CHECK(e_depth(s.pose, {}, s.models).value == 0.0);
  // Moving the box up by 1 mm cancels the offset of the first point.
  s.pose.objects[0].translation.z() = 0.001;
  CHECK(e_depth(s.pose, {Vec3(0.0, 0.0, 0.051)}, s.models).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("depth points go to the nearest mesh, hands first on ties") {
  SceneModels models;
  models.hands.push_back(make_default_hand());
  models.objects.push_back(make_box(Vec3(0.05, 0.05, 0.05)));
  ScenePose pose;
  pose.hands.push_back(Eigen::VectorXd::Zero(kPoseParamCount));
  pose.hands[0].segment<3>(3) = Vec3(0.5, 0, 0);
  pose.objects.push_back(RigidPose{});
  const TermValue t = e_depth(pose, {Vec3(0, 0, 0.026)}, models);
  CHECK(t.value == doctest::Approx(1.0));
  CHECK(t.gradient.hands[0].norm() == 0.0);
  CHECK(t.gradient.objects[0].tail<3>().z() == doctest::Approx(-2.0 * 1e6 * 0.001));
}

TEST_CASE("object keypoint term") {
  BoxScene s = box_scene();
  AnnotationSet ann;
  ann.anchors.push_back({SurfaceAnchor{0, Vec3(0.3, 0.3, 0.4)}, std::nullopt});
  AnnotationSet::View v;
  ObjectKeypoints kps;
  const Vec3 p = ann.anchors[0][0]->point_on(s.models.objects[0]);
  kps[0] = {s.views[0].project(p) + Vec2(3, 0), true};
  kps[1] = {Vec2::Zero(), false};
  v.objects.push_back(kps);
  ann.views.push_back(v);
  CHECK(e_kpt_object(s.pose, ann, s.views, s.models).value == doctest::Approx(9.0));

  ann.views[0].objects[0][1].visible = true;  // visible but never anchored
  CHECK_THROWS_AS(e_kpt_object(s.pose, ann, s.views, s.models), Error);
  ann.views[0].objects[0][0].visible = false;
  ann.views[0].objects[0][1].visible = false;
  CHECK_THROWS_WITH(e_kpt_object(s.pose, ann, s.views, s.models), "no visible object keypoints");
}

TEST_CASE("hand keypoint term normalizes by visible count") {
  SceneModels models;
  models.hands.push_back(make_default_hand());
  ScenePose pose;
  pose.hands.push_back(Eigen::VectorXd::Zero(kPoseParamCount));
  const std::vector<CameraView> views = {
      CameraView::look_at(Vec3(0, 0.05, 0.5), Vec3(0, 0.05, 0), Vec3::UnitY(), 200, 200, 160, 120)};
  const auto joints = hand_forward(models.hands[0], pose.hands[0]).joints;
  AnnotationSet ann;
  AnnotationSet::View v;
  HandKeypoints kps;
  for (int j = 0; j < kJointCount; ++j) kps[j] = {views[0].project(joints[j]), j < 4};
  kps[1].pixel += Vec2(0, 4);
  v.hands.push_back(kps);
  ann.views.push_back(v);
  CHECK(e_kpt_hand(pose, ann, views, models).value == doctest::Approx(4.0));  // 16 / 4
  for (auto& k : ann.views[0].hands[0]) k.visible = false;
  CHECK_THROWS_WITH(e_kpt_hand(pose, ann, views, models), "no visible hand keypoints");
}

TEST_CASE("regularizer and total energy") {
  ScenePose pose;
  pose.hands.push_back(Eigen::VectorXd::Constant(kPoseParamCount, 0.1));
  pose.hands.push_back(Eigen::VectorXd::Zero(kPoseParamCount));
  const TermValue r = e_reg(pose);
  CHECK(r.value == doctest::Approx(0.51 / 2));
  CHECK(r.gradient.hands[0][0] == doctest::Approx(0.1));
  CHECK(e_reg(ScenePose{}).value == 0.0);

  BoxScene s = box_scene();
  Observations obs;
  obs.views = s.views;
  obs.cloud = {Vec3(0.0, 0.0, 0.052)};
  obs.annotations.views.resize(1);
  obs.annotations.views[0].objects.push_back(ObjectKeypoints{});
  obs.annotations.anchors.resize(1);
  // No visible object keypoints at all raises, as the term is ill-posed.
  CHECK_THROWS_AS(e_total(s.pose, obs, s.models), Error);
  obs.annotations.anchors[0][0] = SurfaceAnchor{2, Vec3(0.2, 0.3, 0.5)};
  obs.annotations.views[0].objects[0][0] = {
      s.views[0].project(obs.annotations.anchors[0][0]->point_on(s.models.objects[0])), true};
  const EnergyEvaluation e = e_total(s.pose, obs, s.models);
  CHECK(e.report.e_depth == doctest::Approx(4.0));
  CHECK(e.report.e_kpt_object == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.report.e_total == doctest::Approx(e.report.e_depth + e.report.e_kpt_hand + e.report.e_kpt_object + e.report.e_reg));
}
