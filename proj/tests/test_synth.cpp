#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "dexfit/synth.hpp"

using namespace dexfit;

TEST_CASE("primitives are closed and centered") {
  for (const TriMesh& m : {make_box(Vec3(0.1, 0.2, 0.3)), make_cylinder(0.05, 0.1), make_l_bracket(0.1, 0.08, 0.02, 0.04),
                           make_uv_sphere(0.05, 6, 9)}) {
    CHECK(m.is_closed());
    // Positive enclosed volume means outward-facing triangles.
    double volume = 0.0;
    for (std::size_t f = 0; f < m.face_count(); ++f)
      volume += m.corner(f, 0).dot(m.corner(f, 1).cross(m.corner(f, 2))) / 6.0;
    CHECK(volume > 0.0);
  }
  CHECK_THROWS_AS(make_l_bracket(0.1, 0.1, 0.2, 0.1), Error);
  CHECK_THROWS_AS(make_cylinder(0.1, 0.1, 2), Error);
}

TEST_CASE("rendering") {
  const CameraView view = CameraView::look_at(Vec3(0, 0, 2), Vec3::Zero(), Vec3::UnitY(), 100, 100, 41, 31);
  const RenderResult empty = render_depth({}, view);
  CHECK(empty.depth.valid_count() == 0);

  // Unit square facing the camera at distance 2.
  const TriMesh square({{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}}, {{0, 1, 2}, {0, 2, 3}});
  const TriMesh nearer = square.with_vertices({{-0.1, -0.1, 0.5}, {0.1, -0.1, 0.5}, {0.1, 0.1, 0.5}, {-0.1, 0.1, 0.5}});
  std::vector<IndexedMesh> meshes;
  meshes.emplace_back(square);
  const RenderResult one = render_depth(meshes, view);
  CHECK(one.depth.at(20, 15) == doctest::Approx(2.0));
  meshes.emplace_back(nearer);
  const RenderResult two = render_depth(meshes, view);
  CHECK(two.depth.at(20, 15) == doctest::Approx(1.5));
  CHECK(two.labels[15 * 41 + 20] == 1);
  CHECK(two.labels[0] == 0);  // corner pixel still on the square
  CHECK(empty.labels[0] == -1);
}

TEST_CASE("rendered depth lies on the scene surface") {
  const SyntheticScene scene = build_scene(SceneSpec::default_scene());
  const auto meshes = posed_meshes(scene.models, scene.gt[0]);
  const CameraView& view = scene.views[3];
  const RenderResult r = render_depth(meshes, view);
  int checked = 0;
  for (int y = 0; y < view.height(); y += 3)
    for (int x = 0; x < view.width(); x += 3) {
      const double d = r.depth.at(x, y);
      if (d <= 0.0) continue;
      const Vec3 p = view.backproject(Vec2(x, y), d);
      const auto& m = meshes[r.labels[y * view.width() + x]];
      CHECK(closest_point(m.tree, m.mesh, p).distance < 1e-6);
      ++checked;
    }
  CHECK(checked > 50);
}

TEST_CASE("visibility matches an all-faces occlusion test") {
  const SyntheticScene scene = build_scene(SceneSpec::default_scene());
  const auto meshes = posed_meshes(scene.models, scene.gt[0]);
  std::vector<TriMesh> plain;
  for (const auto& m : meshes) plain.push_back(m.mesh);
  const auto joints = hand_forward(scene.models.hands[0], scene.gt[0].hands[0]).joints;
  int visible = 0, hidden = 0;
  for (const auto& view : scene.views) {
    for (const auto& j : joints) {
      const bool v = keypoint_visible(meshes, view, j, 0);
      CHECK(v == oracle::visible(plain, view, j, 0));
      (v ? visible : hidden)++;
    }
    for (const auto& kp : scene.object_keypoints[0]) {
      const Vec3 p = scene.gt[0].objects[0].apply(kp.point_on(scene.models.objects[0]));
      CHECK(keypoint_visible(meshes, view, p, 1) == oracle::visible(plain, view, p, 1));
    }
  }
  CHECK(visible > 0);
  CHECK(hidden > 0);
}

TEST_CASE("noiseless annotations are exact projections") {
  const SyntheticScene scene = build_scene(SceneSpec::default_scene());
  auto rng = make_rng(0, 3);
  const AnnotationSet ann = annotate(scene, 0, 0.0, rng);
  const auto joints = hand_forward(scene.models.hands[0], scene.gt[0].hands[0]).joints;
  REQUIRE(ann.views.size() == 8);
  for (std::size_t c = 0; c < ann.views.size(); ++c)
    for (int j = 0; j < kJointCount; ++j)
      CHECK((ann.views[c].hands[0][j].pixel - scene.views[c].project(joints[j])).norm() < 1e-12);
}

TEST_CASE("observed sequences anchor every labeled keypoint") {
  SceneSpec spec = SceneSpec::default_scene();
  spec.noise.keypoint_px = 1.0;
  spec.noise.depth_mm = 1.0;
  const SyntheticScene scene = build_scene(spec);
  const auto frames = observe_sequence(scene);
  const auto again = observe_sequence(build_scene(spec));
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].obs.cloud == again[0].obs.cloud);
  CHECK(frames[0].hand_cloud.size() < frames[0].obs.cloud.size());
  const auto& ann = frames[0].obs.annotations;
  for (const auto& v : ann.views)
    for (int k = 0; k < kObjectKeypoints; ++k)
      if (v.objects[0][k].visible) CHECK(ann.anchors[0][k].has_value());
  // The anchor comes from a noisy click, so it lands near the true keypoint.
  for (int k = 0; k < kObjectKeypoints; ++k) {
    if (!ann.anchors[0][k]) continue;
    const Vec3 a = ann.anchors[0][k]->point_on(scene.models.objects[0]);
    const Vec3 t = scene.object_keypoints[0][k].point_on(scene.models.objects[0]);
    CHECK((a - t).norm() < 0.01);
  }
}

TEST_CASE("perturbation") {
  const SyntheticScene scene = build_scene(SceneSpec::default_scene());
  auto rng = make_rng(1, 5);
  const ScenePose same = perturb(scene.gt[0], {}, rng);
  CHECK(same.flatten() == scene.gt[0].flatten());
  auto r1 = make_rng(2, 5), r2 = make_rng(2, 5);
  const PerturbMagnitudes mag{0.005, 0.05, 0.05};
  CHECK(perturb(scene.gt[0], mag, r1).flatten() == perturb(scene.gt[0], mag, r2).flatten());
  CHECK_THROWS_AS(perturb(scene.gt[0], {-1.0, 0, 0}, r1), Error);

  ScenePose obj;
  obj.objects.push_back(RigidPose{});
  auto rng3 = make_rng(3, 5);
  double sum2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum2 += std::pow(perturb(obj, {0.005, 0.0, 0.0}, rng3).objects[0].translation.x(), 2);
  CHECK(std::sqrt(sum2 / n) == doctest::Approx(0.005).epsilon(0.05));
}

TEST_CASE("scene construction is deterministic") {
  SceneSpec spec = SceneSpec::default_scene();
  spec.seed = 17;
  spec.frames = 2;
  const SyntheticScene a = build_scene(spec), b = build_scene(spec);
  CHECK(a.gt[1].flatten() == b.gt[1].flatten());
  CHECK(a.object_keypoints[0][0].face == b.object_keypoints[0][0].face);
  spec.objects[0].shape = "pyramid";
  CHECK_THROWS_AS(build_scene(spec), Error);
}
