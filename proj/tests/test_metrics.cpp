#include <random>

#include "doctest.h"

#include "dexfit/metrics.hpp"

using namespace dexfit;

namespace {

JointSet random_joints(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 50.0);
  JointSet j;
  for (auto& p : j) p = Vec3(n(rng), n(rng), n(rng));
  return j;
}

}  // namespace

TEST_CASE("mpjpe alignment modes") {
  std::mt19937_64 rng(8);
  const JointSet gt = random_joints(rng);
  for (auto mode : {AlignMode::absolute, AlignMode::root_relative, AlignMode::procrustes})
    CHECK(mpjpe(gt, gt, mode) == doctest::Approx(0.0).epsilon(1e-12));
  JointSet shifted = gt;
  for (auto& p : shifted) p += Vec3(3, 4, 0);
  CHECK(mpjpe(shifted, gt, AlignMode::absolute) == doctest::Approx(5.0));
  CHECK(mpjpe(shifted, gt, AlignMode::root_relative) < 1e-12);

  const JointSet pred = random_joints(rng);
  CHECK(mpjpe(pred, gt, AlignMode::procrustes) <= mpjpe(pred, gt, AlignMode::root_relative) + 1e-12);
  // Procrustes error is invariant to a similarity transform of the prediction.
  const Mat3 r = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
  JointSet moved = pred;
  for (auto& p : moved) p = 2.5 * r * p + Vec3(10, -20, 30);
  CHECK(mpjpe(moved, gt, AlignMode::procrustes) == doctest::Approx(mpjpe(pred, gt, AlignMode::procrustes)));
}

TEST_CASE("procrustes returns a proper rotation") {
  std::mt19937_64 rng(12);
  const JointSet a = random_joints(rng);
  JointSet b = a;
  for (auto& p : b) p = Vec3(-p.x(), p.y(), p.z());  // mirror image
  const SimilarityTransform t = procrustes_align(a, b);
  CHECK(t.rotation.determinant() == doctest::Approx(1.0));
  CHECK(t.scale > 0.0);
}

TEST_CASE("pck auc grid") {
  std::vector<double> zeros(21, 0.0), far(21, 50.0), mid(21, 25.0);
  CHECK(pck_auc(zeros) == 1.0);
  CHECK(pck_auc(far) == 0.0);
  // Thresholds 0.5 k mm, strict: 25 mm counts below tau for k = 51..100.
  CHECK(pck_auc(mid) == doctest::Approx(0.5));
  CHECK_THROWS_AS(pck_auc(std::vector<double>{}), Error);
  CHECK_THROWS_AS(pck_auc(std::vector<double>{-1.0}), Error);
  std::vector<double> e = {1, 10, 30};
  const double before = pck_auc(e);
  e[1] = 20;
  CHECK(pck_auc(e) <= before);
}

TEST_CASE("reprojection error statistics") {
  const CameraView view = CameraView::look_at(Vec3(0, 0, 1), Vec3::Zero(), Vec3::UnitY(), 100, 100, 200, 200);
  const std::vector<CameraView> views = {view, view};
  std::vector<Vec3> joints(kJointCount);
  for (int j = 0; j < kJointCount; ++j) joints[j] = Vec3(0.01 * j, 0, 0);
  AnnotationSet ann;
  ann.views.resize(2);
  for (auto& v : ann.views) {
    HandKeypoints kps;
    for (int j = 0; j < kJointCount; ++j) kps[j] = {view.project(joints[j]), true};
    v.hands.push_back(kps);
  }
  ann.views[0].hands[0][4].pixel += Vec2(3, 0);
  ann.views[0].hands[0][7].visible = false;
  ann.views[1].hands[0][7].visible = false;
  const std::vector<ReprojectionSample> samples = {{joints, &ann, 0}};
  const auto r = reprojection_error(samples, views);
  CHECK(*r[0].mean == doctest::Approx(0.0));
  CHECK(*r[4].mean == doctest::Approx(1.5));
  CHECK(*r[4].stddev == doctest::Approx(1.5));
  CHECK(r[4].count == 2);
  CHECK_FALSE(r[7].mean.has_value());
}
