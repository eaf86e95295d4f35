#include "dexfit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "dexfit/energy.hpp"
#include "dexfit/synth.hpp"

namespace dexfit {

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  if (analytic.size() != numeric.size()) throw Error("gradient size mismatch");
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
  }
  return scale > 0.0 ? diff / scale : 0.0;
}

namespace {

struct RandomScene {
  SceneModels models;
  ScenePose pose;
  Observations obs;
};

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

/// True if a second, distinct surface point lies within `gap` of the nearest
/// one: the squared distance has a crease there.
bool near_crease(const std::vector<const TriMesh*>& meshes, const Vec3& p, double gap) {
  struct Hit {
    double d;
    Vec3 q;
  };
  std::vector<Hit> hits;
  Vec3 q, bary;
  for (const TriMesh* m : meshes)
    for (std::size_t f = 0; f < m->face_count(); ++f) {
      closest_point_on_triangle(p, m->corner(f, 0), m->corner(f, 1), m->corner(f, 2), q, bary);
      hits.push_back({(p - q).norm(), q});
    }
  const auto best = std::min_element(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.d < b.d; });
  for (const Hit& h : hits)
    if (h.d < best->d + gap && (h.q - best->q).norm() > 1e-9) return true;
  return false;
}

RandomScene make_random_scene(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * u(rng); };
  RandomScene s;

  HandBuildOptions opt;
  for (int i = 0; i < kShapeCount; ++i) opt.beta[i] = n(rng);
  s.models.hands.push_back(make_default_hand(opt));
  HandPose theta(kPoseParamCount);
  for (int i = 0; i < kPoseParamCount; ++i) theta[i] = 0.3 * n(rng);
  theta.segment<3>(0) = random_unit(rng) * uniform(0.2, 2.5);
  theta.segment<3>(3) = Vec3(uniform(-0.05, 0.05), uniform(-0.05, 0.05), uniform(-0.05, 0.05));
  s.pose.hands.push_back(theta);

  switch (static_cast<int>(u(rng) * 4)) {
    case 0: s.models.objects.push_back(make_box(Vec3(uniform(0.03, 0.1), uniform(0.03, 0.1), uniform(0.03, 0.1)))); break;
    case 1: s.models.objects.push_back(make_cylinder(uniform(0.02, 0.05), uniform(0.05, 0.12))); break;
    case 2: s.models.objects.push_back(make_l_bracket(uniform(0.05, 0.1), uniform(0.05, 0.1), uniform(0.01, 0.02), uniform(0.02, 0.05))); break;
    default: s.models.objects.push_back(make_uv_sphere(uniform(0.02, 0.06), 8, 12)); break;
  }
  RigidPose obj;
  obj.rotation = random_unit(rng) * uniform(0.1, 3.0);
  obj.translation = Vec3(uniform(-0.1, 0.1), uniform(-0.1, 0.1), uniform(-0.1, 0.1));
  s.pose.objects.push_back(obj);

  for (int c = 0; c < 3; ++c) {
    Vec3 dir = random_unit(rng);
    dir.z() = std::abs(dir.z()) + 0.3;
    s.obs.views.push_back(CameraView::look_at(0.6 * dir.normalized(), Vec3::Zero(), Vec3::UnitZ(), 200.0,
                                              200.0, 160, 120));
  }

  const PosedModel hand = hand_forward(s.models.hands[0], theta);
  const TriMesh posed_obj = rigid_forward(obj, s.models.objects[0]).mesh;
  const TriMesh* meshes[2] = {&hand.mesh, &posed_obj};
  // Points near a crease of the distance field are skipped: finite
  // differences straddling it do not measure the gradient.
  while (s.obs.cloud.size() < 80) {
    const TriMesh& m = *meshes[u(rng) < 0.5 ? 0 : 1];
    const int f = std::min<int>(static_cast<int>(u(rng) * m.face_count()), m.face_count() - 1);
    double r1 = u(rng), r2 = u(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Vec3& a = m.corner(f, 0);
    const Vec3& b = m.corner(f, 1);
    const Vec3& c = m.corner(f, 2);
    const Vec3 normal = (b - a).cross(c - a).normalized();
    const Vec3 p = (1.0 - r1 - r2) * a + r1 * b + r2 * c + uniform(0.0005, 0.005) * normal;
    if (!near_crease({meshes[0], meshes[1]}, p, 1e-5)) s.obs.cloud.push_back(p);
  }

  auto& ann = s.obs.annotations;
  std::array<std::optional<SurfaceAnchor>, kObjectKeypoints> anchors;
  const int nf = static_cast<int>(s.models.objects[0].face_count());
  for (auto& a : anchors) {
    const double r1 = uniform(0.1, 0.45), r2 = uniform(0.1, 0.45);
    a = SurfaceAnchor{std::min(static_cast<int>(u(rng) * nf), nf - 1), Vec3(1.0 - r1 - r2, r1, r2)};
  }
  ann.anchors.push_back(anchors);
  for (std::size_t c = 0; c < s.obs.views.size(); ++c) {
    const auto& view = s.obs.views[c];
    AnnotationSet::View v;
    HandKeypoints hk;
    for (int j = 0; j < kJointCount; ++j) {
      hk[j].pixel = view.project(hand.joints[j]) + 5.0 * Vec2(n(rng), n(rng));
      hk[j].visible = u(rng) < 0.7 || (c == 0 && j == 0);
    }
    v.hands.push_back(hk);
    ObjectKeypoints ok;
    for (int k = 0; k < kObjectKeypoints; ++k) {
      ok[k].pixel = view.project(obj.apply(anchors[k]->point_on(s.models.objects[0]))) + 5.0 * Vec2(n(rng), n(rng));
      ok[k].visible = u(rng) < 0.7 || (c == 0 && k == 0);
    }
    v.objects.push_back(ok);
    ann.views.push_back(v);
  }
  return s;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

using Term = std::function<TermValue(const ScenePose&)>;

double check_term(const Term& term, const ScenePose& pose, double h) {
  const Eigen::VectorXd analytic = term(pose).gradient.flatten();
  const Eigen::VectorXd x = pose.flatten();
  Eigen::VectorXd numeric(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    numeric[i] = (term(pose.unflatten(xp)).value - term(pose.unflatten(xm)).value) / (2.0 * h);
  }
  return relative_error(to_std(analytic), to_std(numeric));
}

/// Max over columns of the relative error of one Jacobian.
double check_columns(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < analytic.cols(); ++c)
    worst = std::max(worst, relative_error(to_std(analytic.col(c)), to_std(numeric.col(c))));
  return worst;
}

Eigen::VectorXd stack(const std::vector<Vec3>& points) {
  Eigen::VectorXd out(3 * points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out.segment<3>(3 * i) = points[i];
  return out;
}

}  // namespace

std::vector<GradCheckResult> run_gradient_checks(int scenes, std::uint64_t seed, double h) {
  if (scenes < 1) throw Error("need at least one scene");
  std::vector<GradCheckResult> results = {{"e_depth"},        {"e_kpt_hand"},      {"e_kpt_object"},
                                          {"e_reg"},          {"hand_jacobian_vertices"},
                                          {"hand_jacobian_joints"}, {"rigid_jacobian"}};
  auto record = [&](int i, double err) {
    results[i].max_rel_error = std::max(results[i].max_rel_error, err);
    ++results[i].checks;
  };

  for (int k = 0; k < scenes; ++k) {
    auto rng = make_rng(seed, 6, k);
    const RandomScene s = make_random_scene(rng);
    const auto& views = s.obs.views;
    record(0, check_term([&](const ScenePose& p) { return e_depth(p, s.obs.cloud, s.models); }, s.pose, h));
    record(1, check_term([&](const ScenePose& p) { return e_kpt_hand(p, s.obs.annotations, views, s.models); },
                         s.pose, h));
    record(2, check_term([&](const ScenePose& p) { return e_kpt_object(p, s.obs.annotations, views, s.models); },
                         s.pose, h));
    record(3, check_term([](const ScenePose& p) { return e_reg(p); }, s.pose, h));

    const HandModel& model = s.models.hands[0];
    const HandPose& theta = s.pose.hands[0];
    const HandJacobian jac = hand_jacobian(model, theta);
    Eigen::MatrixXd nv(jac.vertices.rows(), theta.size()), nj(jac.joints.rows(), theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      HandPose tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      const PosedModel fp = hand_forward(model, tp), fm = hand_forward(model, tm);
      nv.col(i) = (stack(fp.mesh.vertices()) - stack(fm.mesh.vertices())) / (2.0 * h);
      nj.col(i) = (stack(fp.joints) - stack(fm.joints)) / (2.0 * h);
    }
    record(4, check_columns(jac.vertices, nv));
    record(5, std::max(check_columns(jac.joints, nj), check_columns(hand_joint_jacobian(model, theta), nj)));

    const RigidPose& obj = s.pose.objects[0];
    const auto& verts = s.models.objects[0].vertices();
    for (std::size_t v = 0; v < verts.size(); v += std::max<std::size_t>(1, verts.size() / 8)) {
      const Mat36 analytic = rigid_jacobian(obj, verts[v]);
      Eigen::MatrixXd numeric(3, 6);
      for (int i = 0; i < 6; ++i) {
        Vec6 xp = obj.as_vector(), xm = obj.as_vector();
        xp[i] += h;
        xm[i] -= h;
        numeric.col(i) = (RigidPose::from_vector(xp).apply(verts[v]) - RigidPose::from_vector(xm).apply(verts[v])) /
                         (2.0 * h);
      }
      record(6, check_columns(analytic, numeric));
    }
  }
  return results;
}

}  // namespace dexfit
