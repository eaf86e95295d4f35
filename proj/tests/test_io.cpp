#include <filesystem>

#include "doctest.h"

#include "dexfit/io.hpp"

using namespace dexfit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dexfit_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("camera and pose records round trip") {
  const CameraView v = CameraView::look_at(Vec3(0.3, 0.1, 0.4), Vec3::Zero(), Vec3::UnitZ(), 200, 190, 160, 120);
  const CameraView back = camera_from_json(Json::parse(to_json(v).dump()));
  CHECK(back.rotation() == v.rotation());
  CHECK(back.translation() == v.translation());
  CHECK(back.cx() == v.cx());

  ScenePose p;
  p.hands.push_back(Eigen::VectorXd::LinSpaced(kPoseParamCount, -1, 1));
  p.objects.push_back(RigidPose{Vec3(0.1, 0.2, 0.3), Vec3(1.0 / 3.0, 2, 3)});
  CHECK(scene_pose_from_json(Json::parse(to_json(p).dump())).flatten() == p.flatten());
}

TEST_CASE("annotations round trip") {
  AnnotationSet a;
  a.views.resize(2);
  HandKeypoints hk;
  for (int j = 0; j < kJointCount; ++j) hk[j] = {Vec2(j, 2.5 * j), j % 2 == 0};
  ObjectKeypoints ok = {Keypoint2D{Vec2(1, 2), true}, Keypoint2D{Vec2(3, 4), false}};
  for (auto& v : a.views) {
    v.hands.push_back(hk);
    v.objects.push_back(ok);
  }
  a.anchors.push_back({SurfaceAnchor{3, Vec3(0.2, 0.3, 0.5)}, std::nullopt});
  const AnnotationSet b = annotations_from_json(Json::parse(to_json(a).dump()));
  CHECK(b.views[1].hands[0][6].pixel == hk[6].pixel);
  CHECK(b.views[1].hands[0][7].visible == false);
  CHECK(b.anchors[0][0]->face == 3);
  CHECK_FALSE(b.anchors[0][1].has_value());
}

TEST_CASE("grasp, gripper and config files") {
  const GraspSet gs = {{Vec3(1, 2, 3), Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Vec3::UnitY()))}};
  const GraspSet back = grasps_from_json(Json::parse(to_json(gs).dump()));
  CHECK(back[0].t == gs[0].t);
  CHECK(back[0].q.coeffs().isApprox(gs[0].q.coeffs(), 1e-15));
  CHECK_THROWS_AS(grasps_from_json(Json::parse(R"([{"t":[0,0,0],"q":[2,0,0,0]}])")), Error);
  CHECK(gripper_from_json(to_json(make_parallel_jaw_template())).points.size() ==
        make_parallel_jaw_template().points.size());

  const SolveConfig c = solve_config_from_json(Json::parse(R"({"iterations": 7})"));
  CHECK(c.iterations == 7);
  CHECK(c.learning_rate == 0.01);
  CHECK_THROWS_AS(solve_config_from_json(Json::parse(R"({"lr": 1})")), Error);
  CHECK_THROWS_AS(solve_config_from_json(Json::parse(R"({"iterations": 0})")), Error);

  SceneSpec spec = SceneSpec::default_scene();
  spec.seed = 99;
  spec.noise.keypoint_px = 2.0;
  const SceneSpec sb = scene_spec_from_json(Json::parse(to_json(spec).dump()));
  CHECK(to_json(sb) == to_json(spec));
  CHECK_THROWS_AS(scene_spec_from_json(Json::parse(R"({"framez": 3})")), Error);
}

TEST_CASE("binary depth and label images") {
  const fs::path dir = scratch_dir("depth");
  DepthMap d(4, 3);
  d.at(1, 2) = 0.75f;
  write_depth(dir / "d.bin", d);
  const DepthMap back = read_depth(dir / "d.bin");
  CHECK(back.width == 4);
  CHECK(back.at(1, 2) == 0.75);
  CHECK(back.valid_count() == 1);
  write_labels(dir / "l.bin", 4, 3, std::vector<int>(12, -1));
  CHECK(read_labels(dir / "l.bin", 4, 3)[5] == -1);
  CHECK_THROWS_AS(read_labels(dir / "l.bin", 3, 3), Error);
  write_text_atomic(dir / "bad.bin", "DEPTH 4 3\nxx");
  CHECK_THROWS_AS(read_depth(dir / "bad.bin"), Error);
  write_text_atomic(dir / "bad2.bin", "IMAGE 1 1\n0000");
  CHECK_THROWS_AS(read_depth(dir / "bad2.bin"), Error);
}

TEST_CASE("hand model files reproduce the model") {
  const fs::path dir = scratch_dir("hand");
  HandBuildOptions opt;
  opt.beta[2] = 1.5;
  const HandModel hand = make_default_hand(opt);
  write_hand_model(dir / "h.mesh", dir / "h.json", hand);
  const HandModel back = read_hand_model(dir / "h.mesh", dir / "h.json");
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(kPoseParamCount, 0.1);
  const auto a = hand_forward(hand, theta), b = hand_forward(back, theta);
  for (std::size_t v = 0; v < a.mesh.vertex_count(); ++v) CHECK(a.mesh.vertices()[v] == b.mesh.vertices()[v]);
}

TEST_CASE("scene directories round trip") {
  const fs::path dir = scratch_dir("scene");
  SceneSpec spec = SceneSpec::default_scene();
  spec.rig.width = 40;
  spec.rig.height_px = 30;
  spec.rig.fx = spec.rig.fy = 50;
  spec.grasp_candidates = 30;
  spec.grasps = 10;
  const SyntheticScene scene = build_scene(spec);
  StoredScene s{spec, scene.models, scene.views, scene.gt, observe_sequence(scene), {}, make_parallel_jaw_template()};
  s.object_grasps.push_back(make_object_grasps(scene, 0, s.gripper));
  write_scene(dir, s);
  const StoredScene back = read_scene(dir);
  CHECK(back.views.size() == 8);
  CHECK(back.gt[0].flatten() == s.gt[0].flatten());
  CHECK(back.frames[0].obs.cloud.size() == s.frames[0].obs.cloud.size());
  CHECK(back.frames[0].hand_cloud.size() == s.frames[0].hand_cloud.size());
  CHECK(back.object_grasps[0].size() == 10);
  CHECK(back.frames[0].obs.annotations.anchors[0][0].has_value() ==
        s.frames[0].obs.annotations.anchors[0][0].has_value());
  CHECK_THROWS_AS(read_scene(dir / "missing"), Error);
}
