#include "dexfit/cli.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dexfit/gradcheck.hpp"
#include "dexfit/io.hpp"
#include "dexfit/metrics.hpp"
#include "dexfit/rotation.hpp"

namespace dexfit {

namespace fs = std::filesystem;

namespace {

struct Manifest {
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_manifest(const fs::path& path, const Manifest& m, double seconds) {
  write_json(path, Json{{"command", m.command},
                        {"config", m.config},
                        {"seed", m.seed},
                        {"inputs", m.inputs},
                        {"outputs", m.outputs},
                        {"wall_time_s", seconds}});
}

fs::path manifest_for_file(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// "gt" or "perturbed:<mm>" with an optional "mm" suffix.
std::optional<double> parse_init(const std::string& spec) {
  if (spec == "gt") return std::nullopt;
  const std::string prefix = "perturbed:";
  if (spec.rfind(prefix, 0) != 0) throw CLI::ValidationError("--init", "expected gt or perturbed:<mm>");
  std::string num = spec.substr(prefix.size());
  if (num.size() > 2 && num.substr(num.size() - 2) == "mm") num.resize(num.size() - 2);
  std::size_t used = 0;
  double mm = 0.0;
  try {
    mm = std::stod(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != num.size() || !(mm >= 0.0))
    throw CLI::ValidationError("--init", "bad perturbation magnitude '" + num + "'");
  return mm;
}

struct GenSceneArgs {
  std::string spec, out;
  std::optional<std::uint64_t> seed;
};

void run_gen_scene(const GenSceneArgs& a, Manifest& m) {
  SceneSpec spec = SceneSpec::default_scene();
  if (!a.spec.empty()) {
    spec = scene_spec_from_json(read_json(a.spec));
    m.inputs.push_back(a.spec);
  }
  if (a.seed) spec.seed = *a.seed;
  m.seed = spec.seed;
  m.config = to_json(spec);

  const SyntheticScene scene = build_scene(spec);
  StoredScene stored;
  stored.spec = spec;
  stored.models = scene.models;
  stored.views = scene.views;
  stored.gt = scene.gt;
  stored.frames = observe_sequence(scene);
  stored.gripper = make_parallel_jaw_template();
  for (std::size_t o = 0; o < scene.models.objects.size(); ++o)
    stored.object_grasps.push_back(make_object_grasps(scene, static_cast<int>(o), stored.gripper));
  for (const auto& p : write_scene(a.out, stored)) m.outputs.push_back(p.string());
}

struct SolveArgs {
  std::string scene, out, config, init = "gt";
  std::uint64_t seed = 0;
};

void run_solve(const SolveArgs& a, Manifest& m) {
  SolveConfig config;
  if (!a.config.empty()) {
    config = solve_config_from_json(read_json(a.config));
    m.inputs.push_back(a.config);
  }
  const auto mm = parse_init(a.init);
  m.inputs.push_back(a.scene);
  m.seed = a.seed;
  m.config = Json{{"solver", to_json(config)}, {"init", a.init}};

  StoredScene s = read_scene(a.scene);
  ScenePose init = s.gt.at(0);
  if (mm) {
    auto rng = make_rng(a.seed, 5);
    PerturbMagnitudes mag{*mm * 1e-3, *mm * std::numbers::pi / 180.0, 0.01 * *mm};
    init = perturb(init, mag, rng);
  }
  std::vector<Observations> obs;
  for (auto& f : s.frames) obs.push_back(std::move(f.obs));
  const auto solutions = solve_sequence(std::move(obs), s.models, init, config);
  Json out = to_json(solutions);
  out["config"] = to_json(config);
  write_json(a.out, out);
  m.outputs.push_back(a.out);
}

struct EvalArgs {
  std::string scene, poses, out;
  int eps_grid = 15;
  int frame = 0;
  int object = 0;
};

void run_eval_grasps(const EvalArgs& a, Manifest& m) {
  m.inputs = {a.scene, a.poses};
  m.config = Json{{"eps_grid", a.eps_grid}, {"frame", a.frame}, {"object", a.object}};
  if (a.eps_grid < 2) throw CLI::ValidationError("--eps-grid", "needs at least 2 points");
  const StoredScene s = read_scene(a.scene);
  const auto solutions = solutions_from_json(read_json(a.poses));
  if (a.frame < 0 || a.frame >= static_cast<int>(std::min(s.gt.size(), solutions.size())))
    throw Error("frame " + std::to_string(a.frame) + " out of range");
  if (a.object < 0 || a.object >= static_cast<int>(s.models.objects.size()))
    throw Error("object " + std::to_string(a.object) + " out of range");

  const ScenePose& gt = s.gt[a.frame];
  HandoverScene hs;
  hs.object_grasps = s.object_grasps[a.object];
  hs.object_rest = s.models.objects[a.object];
  hs.gt_object_pose = gt.objects[a.object];
  for (std::size_t h = 0; h < s.models.hands.size(); ++h)
    hs.gt_hands.push_back(hand_forward(s.models.hands[h], gt.hands[h]).mesh);
  const auto grid = default_eps_grid(a.eps_grid, 0.07);
  const auto curve = precision_coverage_curve(hs, solutions[a.frame].pose.objects.at(a.object),
                                              s.frames[a.frame].hand_cloud, s.gripper, grid);
  std::string csv = "epsilon,precision,coverage\n";
  for (const auto& p : curve)
    csv += fmt(p.epsilon) + "," + (p.precision ? fmt(*p.precision) : "") + "," + fmt(p.coverage) + "\n";
  write_text_atomic(a.out, csv);
  m.outputs.push_back(a.out);
}

struct MetricsArgs {
  std::string scene, poses, out;
};

JointSet joints_mm(const HandModel& model, const HandPose& theta) {
  const auto joints = hand_forward(model, theta).joints;
  JointSet out;
  for (int j = 0; j < kJointCount; ++j) out[j] = joints[j] * 1000.0;
  return out;
}

void run_metrics(const MetricsArgs& a, Manifest& m) {
  m.inputs = {a.scene, a.poses};
  const StoredScene s = read_scene(a.scene);
  const auto solutions = solutions_from_json(read_json(a.poses));
  const std::size_t frames = std::min(s.gt.size(), solutions.size());
  std::string csv = "sample,mode,value\n";
  auto row = [&](const std::string& sample, const std::string& mode, const std::string& value) {
    csv += sample + "," + mode + "," + value + "\n";
  };

  const AlignMode modes[] = {AlignMode::absolute, AlignMode::root_relative, AlignMode::procrustes};
  std::array<std::vector<double>, 3> all_errors;
  std::vector<std::vector<Vec3>> solved_joints;
  std::vector<ReprojectionSample> samples;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t h = 0; h < s.models.hands.size(); ++h) {
      const JointSet pred = joints_mm(s.models.hands[h], solutions[t].pose.hands.at(h));
      const JointSet gt = joints_mm(s.models.hands[h], s.gt[t].hands[h]);
      const std::string id = "f" + std::to_string(t) + "_h" + std::to_string(h);
      for (int k = 0; k < 3; ++k) {
        const auto err = joint_errors(pred, gt, modes[k]);
        all_errors[k].insert(all_errors[k].end(), err.begin(), err.end());
        row(id, std::string("mpjpe_") + to_string(modes[k]), fmt(mpjpe(pred, gt, modes[k])));
      }
      solved_joints.push_back(hand_forward(s.models.hands[h], solutions[t].pose.hands[h]).joints);
      samples.push_back({{}, &s.frames[t].obs.annotations, static_cast<int>(h)});
    }
    for (std::size_t o = 0; o < s.models.objects.size(); ++o) {
      const RigidPose& p = solutions[t].pose.objects.at(o);
      const RigidPose& g = s.gt[t].objects[o];
      const std::string id = "f" + std::to_string(t) + "_o" + std::to_string(o);
      row(id, "translation_mm", fmt((p.translation - g.translation).norm() * 1000.0));
      row(id, "rotation_deg",
          fmt(rotation_angle_between(p.rotation_matrix(), g.rotation_matrix()) * 180.0 / std::numbers::pi));
    }
  }
  for (int k = 0; k < 3; ++k)
    if (!all_errors[k].empty()) row("all", std::string("pck_auc_") + to_string(modes[k]), fmt(pck_auc(all_errors[k])));
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].joints = solved_joints[i];
  if (!samples.empty()) {
    const auto reproj = reprojection_error(samples, s.views);
    for (int j = 0; j < kJointCount; ++j) {
      const std::string id = "joint_" + std::to_string(j);
      row(id, "reproj_mean_px", reproj[j].mean ? fmt(*reproj[j].mean) : "");
      row(id, "reproj_std_px", reproj[j].stddev ? fmt(*reproj[j].stddev) : "");
    }
  }
  write_text_atomic(a.out, csv);
  m.outputs.push_back(a.out);
}

struct GradArgs {
  int scenes = 50;
  std::uint64_t seed = 0;
  std::string out;
};

bool run_check_grad(const GradArgs& a, Manifest& m) {
  m.seed = a.seed;
  m.config = Json{{"scenes", a.scenes}, {"tolerance", kGradTolerance}};
  const auto results = run_gradient_checks(a.scenes, a.seed);
  double worst = 0.0;
  Json report = Json::array();
  for (const auto& r : results) {
    std::cout << r.name << ": max relative error " << fmt(r.max_rel_error) << " over " << r.checks
              << " checks\n";
    worst = std::max(worst, r.max_rel_error);
    report.push_back(Json{{"name", r.name}, {"max_rel_error", r.max_rel_error}, {"checks", r.checks}});
  }
  const bool ok = worst <= kGradTolerance;
  std::cout << "max relative error " << fmt(worst) << (ok ? " PASS" : " FAIL") << "\n";
  if (!a.out.empty()) {
    write_json(a.out, Json{{"results", report}, {"max_rel_error", worst}, {"pass", ok}});
    m.outputs.push_back(a.out);
  }
  return ok;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"Hand-object pose fitting and grasp evaluation"};
  app.require_subcommand(1);

  GenSceneArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-scene", "Generate a synthetic scene directory");
  gen_cmd->add_option("--spec,--config", gen.spec, "Scene spec JSON (default scene when omitted)");
  gen_cmd->add_option("--seed", gen.seed, "Override the spec seed");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Fit poses to every frame of a scene");
  solve_cmd->add_option("--scene", solve.scene, "Scene directory")->required();
  solve_cmd->add_option("--init", solve.init, "gt or perturbed:<mm>");
  solve_cmd->add_option("--config", solve.config, "Solver config JSON");
  solve_cmd->add_option("--seed", solve.seed, "Seed of the initial perturbation");
  solve_cmd->add_option("--out", solve.out, "Output poses JSON")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval-grasps", "Precision-coverage curve of transferred grasps");
  eval_cmd->add_option("--scene", eval.scene, "Scene directory")->required();
  eval_cmd->add_option("--poses", eval.poses, "Poses JSON from solve")->required();
  eval_cmd->add_option("--eps-grid", eval.eps_grid, "Number of epsilon values over [0, 0.07] m");
  eval_cmd->add_option("--frame", eval.frame, "Frame index");
  eval_cmd->add_option("--object", eval.object, "Object index");
  eval_cmd->add_option("--out", eval.out, "Output CSV")->required();

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Pose error metrics against ground truth");
  metrics_cmd->add_option("--scene", metrics.scene, "Scene directory")->required();
  metrics_cmd->add_option("--poses", metrics.poses, "Poses JSON from solve")->required();
  metrics_cmd->add_option("--out", metrics.out, "Output CSV")->required();

  GradArgs grad;
  auto* grad_cmd = app.add_subcommand("check-grad", "Finite-difference gradient suite");
  grad_cmd->add_option("--scenes", grad.scenes, "Random scenes");
  grad_cmd->add_option("--seed", grad.seed, "Seed");
  grad_cmd->add_option("--out", grad.out, "Optional JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();
  Manifest m;
  fs::path manifest;
  int code = 0;
  try {
    if (gen_cmd->parsed()) {
      m.command = "gen-scene";
      run_gen_scene(gen, m);
      manifest = fs::path(gen.out) / "run_manifest.json";
    } else if (solve_cmd->parsed()) {
      m.command = "solve";
      run_solve(solve, m);
      manifest = manifest_for_file(solve.out);
    } else if (eval_cmd->parsed()) {
      m.command = "eval-grasps";
      run_eval_grasps(eval, m);
      manifest = manifest_for_file(eval.out);
    } else if (metrics_cmd->parsed()) {
      m.command = "metrics";
      run_metrics(metrics, m);
      manifest = manifest_for_file(metrics.out);
    } else if (grad_cmd->parsed()) {
      m.command = "check-grad";
      code = run_check_grad(grad, m) ? 0 : 2;
      if (!grad.out.empty()) manifest = manifest_for_file(grad.out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!manifest.empty()) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest, m, seconds);
  }
  return code;
}

}  // namespace dexfit
