#include "doctest.h"

#include "dexfit/solver.hpp"
#include "dexfit/synth.hpp"

using namespace dexfit;

TEST_CASE("adam update") {
  SolveConfig cfg;
  AdamState st = AdamState::for_size(3, cfg);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd g(3);
  g << 2.0, -1e-3, 0.0;
  adam_step(st, x, g);
  // The bias-corrected first step has magnitude lr in every moving coordinate.
  CHECK(x[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(x[2] == 0.0);
  CHECK(st.step == 1);
  CHECK_THROWS_AS(adam_step(st, x, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("solver config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolveConfig{};
  cfg.beta2 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolveConfig{};
  cfg.learning_rate = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("sequence solving warm-starts every frame") {
  SceneSpec spec = SceneSpec::default_scene();
  spec.frames = 3;
  spec.objects[0].velocity = Vec3(0.002, 0, 0);
  spec.rig.width = 80;
  spec.rig.height_px = 60;
  spec.rig.fx = spec.rig.fy = 100;
  const SyntheticScene scene = build_scene(spec);
  auto frames = observe_sequence(scene);
  std::vector<Observations> obs;
  for (auto& f : frames) obs.push_back(f.obs);
  SolveConfig cfg;
  cfg.iterations = 5;
  const auto sol = solve_sequence(obs, scene.models, scene.gt[0], cfg);
  REQUIRE(sol.size() == 3);
  for (const auto& s : sol) CHECK(s.trace.size() == 6);
  for (int t = 1; t < 3; ++t) {
    CHECK(sol[t].init.flatten() == sol[t - 1].pose.flatten());
  }
  CHECK(sol[0].init.flatten() == scene.gt[0].flatten());
  CHECK(sol[2].trace.front().e_total == doctest::Approx(e_total(sol[1].pose, obs[2], scene.models).report.e_total));
}

TEST_CASE("solve errors name the frame") {
  SceneSpec spec = SceneSpec::default_scene();
  spec.rig.width = 40;
  spec.rig.height_px = 30;
  const SyntheticScene scene = build_scene(spec);
  auto frames = observe_sequence(scene);
  for (auto& v : frames[0].obs.annotations.views)
    for (auto& k : v.hands[0]) k.visible = false;
  SolveConfig cfg;
  cfg.iterations = 1;
  CHECK_THROWS_WITH(solve_sequence({frames[0].obs}, scene.models, scene.gt[0], cfg),
                    "frame 0: no visible hand keypoints");
}
