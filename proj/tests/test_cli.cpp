#include <filesystem>
#include <vector>

#include "doctest.h"

#include "dexfit/cli.hpp"
#include "dexfit/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "dexfit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return dexfit::dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}) == 1);
  CHECK(run({"frobnicate"}) == 1);
  CHECK(run({"solve", "--scene", "x", "--out", "y", "--bogus"}) == 1);
  CHECK(run({"solve", "--scene", "x"}) == 1);
  CHECK(run({"solve", "--scene", "x", "--out", "y", "--init", "perturbed:abc"}) == 1);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("runtime failures exit with 2") {
  const fs::path missing = fs::temp_directory_path() / "dexfit_cli_missing_scene";
  fs::remove_all(missing);
  CHECK(run({"solve", "--scene", missing.string(), "--out", (missing / "p.json").string()}) == 2);
}

TEST_CASE("pipeline commands write results and a manifest") {
  const fs::path dir = fs::temp_directory_path() / "dexfit_cli_pipeline";
  fs::remove_all(dir);
  fs::create_directories(dir);
  dexfit::SceneSpec spec = dexfit::SceneSpec::default_scene();
  spec.rig.width = 64;
  spec.rig.height_px = 48;
  spec.rig.fx = spec.rig.fy = 80;
  spec.grasp_candidates = 60;
  spec.grasps = 20;
  dexfit::write_json(dir / "spec.json", dexfit::to_json(spec));
  dexfit::write_json(dir / "solver.json", dexfit::Json{{"iterations", 10}});
  const std::string scene = (dir / "scene").string();
  REQUIRE(run({"gen-scene", "--spec", (dir / "spec.json").string(), "--out", scene}) == 0);
  CHECK(fs::exists(dir / "scene" / "run_manifest.json"));
  REQUIRE(run({"solve", "--scene", scene, "--init", "perturbed:2mm", "--config", (dir / "solver.json").string(),
               "--out", (dir / "poses.json").string()}) == 0);
  const auto manifest = dexfit::read_json(dir / "poses.json.manifest.json");
  CHECK(manifest.at("command") == "solve");
  CHECK(manifest.at("config").at("solver").at("iterations") == 10);
  REQUIRE(run({"eval-grasps", "--scene", scene, "--poses", (dir / "poses.json").string(), "--eps-grid", "5", "--out",
               (dir / "curve.csv").string()}) == 0);
  const std::string curve = dexfit::read_text(dir / "curve.csv");
  CHECK(curve.rfind("epsilon,precision,coverage\n", 0) == 0);
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 6);
  REQUIRE(run({"metrics", "--scene", scene, "--poses", (dir / "poses.json").string(), "--out",
               (dir / "metrics.csv").string()}) == 0);
  CHECK(dexfit::read_text(dir / "metrics.csv").find("f0_h0,mpjpe_procrustes,") != std::string::npos);
  CHECK(run({"eval-grasps", "--scene", scene, "--poses", (dir / "poses.json").string(), "--frame", "4", "--out",
             (dir / "c2.csv").string()}) == 2);
}
