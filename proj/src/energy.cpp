#include "dexfit/energy.hpp"

#include "dexfit/parallel.hpp"
#include "dexfit/rotation.hpp"

namespace dexfit {

namespace {

constexpr double kMmPerM = 1000.0;

void check_shapes(const ScenePose& pose, const SceneModels& models) {
  if (pose.hands.size() != models.hands.size() || pose.objects.size() != models.objects.size())
    throw Error("scene pose does not match the scene models");
}

void check_annotation_shapes(const AnnotationSet& ann, std::span<const CameraView> views,
                             const ScenePose& pose) {
  if (ann.views.size() != views.size()) throw Error("annotations do not match the camera count");
  for (const auto& v : ann.views) {
    if (v.hands.size() != pose.hands.size() || v.objects.size() != pose.objects.size())
      throw Error("annotations do not match the scene entities");
  }
}

}  // namespace

Gradient Gradient::zeros_like(const ScenePose& pose) {
  Gradient g;
  for (const auto& h : pose.hands) g.hands.push_back(Eigen::VectorXd::Zero(h.size()));
  g.objects.assign(pose.objects.size(), Vec6::Zero());
  return g;
}

Gradient& Gradient::operator+=(const Gradient& other) {
  if (other.hands.size() != hands.size() || other.objects.size() != objects.size())
    throw Error("gradient shape mismatch");
  for (std::size_t h = 0; h < hands.size(); ++h) hands[h] += other.hands[h];
  for (std::size_t o = 0; o < objects.size(); ++o) objects[o] += other.objects[o];
  return *this;
}

Eigen::VectorXd Gradient::flatten() const {
  Eigen::Index n = 6 * static_cast<Eigen::Index>(objects.size());
  for (const auto& h : hands) n += h.size();
  Eigen::VectorXd out(n);
  Eigen::Index at = 0;
  for (const auto& h : hands) {
    out.segment(at, h.size()) = h;
    at += h.size();
  }
  for (const auto& o : objects) {
    out.segment<6>(at) = o;
    at += 6;
  }
  return out;
}

TriangleGradient barycentric_grad(const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c,
                                  const Vec3& bary) {
  const double u = bary[0], v = bary[1], w = bary[2];
  const Vec3 residual = d - u * a - v * b - w * c;
  return {-2.0 * u * residual, -2.0 * v * residual, -2.0 * w * residual};
}

TermValue e_depth(const ScenePose& pose, const PointCloud& cloud, const SceneModels& models) {
  check_shapes(pose, models);
  TermValue out{0.0, Gradient::zeros_like(pose)};
  if (cloud.empty()) return out;

  // Hands first, then objects; the tree is rebuilt for every evaluation.
  std::vector<IndexedMesh> meshes;
  meshes.reserve(pose.hands.size() + pose.objects.size());
  for (std::size_t h = 0; h < pose.hands.size(); ++h)
    meshes.emplace_back(hand_forward(models.hands[h], pose.hands[h]).mesh);
  for (std::size_t o = 0; o < pose.objects.size(); ++o)
    meshes.emplace_back(rigid_forward(pose.objects[o], models.objects[o]).mesh);
  if (meshes.empty()) return out;

  struct Assignment {
    int mesh;
    ClosestPointResult closest;
  };
  std::vector<Assignment> assigned(cloud.size());
  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Assignment best{-1, {}};
      for (std::size_t m = 0; m < meshes.size(); ++m) {
        auto r = closest_point(meshes[m].tree, meshes[m].mesh, cloud[i]);
        if (best.mesh < 0 || r.distance < best.closest.distance)
          best = {static_cast<int>(m), r};
      }
      assigned[i] = best;
    }
  });

  // Fixed-order reduction keeps results independent of the thread count.
  const double scale = kMmPerM * kMmPerM / static_cast<double>(cloud.size());
  std::vector<std::vector<Vec3>> vertex_grad(meshes.size());
  for (std::size_t m = 0; m < meshes.size(); ++m)
    vertex_grad[m].assign(meshes[m].mesh.vertex_count(), Vec3::Zero());
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& a = assigned[i];
    const auto& mesh = meshes[a.mesh].mesh;
    const auto& face = mesh.faces()[a.closest.face];
    sum += a.closest.distance * a.closest.distance;
    const auto g = barycentric_grad(cloud[i], mesh.vertices()[face[0]], mesh.vertices()[face[1]],
                                    mesh.vertices()[face[2]], a.closest.bary);
    vertex_grad[a.mesh][face[0]] += g.da;
    vertex_grad[a.mesh][face[1]] += g.db;
    vertex_grad[a.mesh][face[2]] += g.dc;
  }
  out.value = sum * scale;

  for (std::size_t h = 0; h < pose.hands.size(); ++h) {
    const auto& vg = vertex_grad[h];
    Eigen::VectorXd flat(3 * vg.size());
    for (std::size_t v = 0; v < vg.size(); ++v) flat.segment<3>(3 * v) = vg[v];
    const HandJacobian jac = hand_jacobian(models.hands[h], pose.hands[h]);
    out.gradient.hands[h] = scale * (jac.vertices.transpose() * flat);
  }
  for (std::size_t o = 0; o < pose.objects.size(); ++o) {
    const std::size_t m = pose.hands.size() + o;
    const auto& posed = meshes[m].mesh.vertices();
    const Vec3& t = pose.objects[o].translation;
    Vec3 torque = Vec3::Zero();
    Vec3 force = Vec3::Zero();
    for (std::size_t v = 0; v < posed.size(); ++v) {
      const Vec3& g = vertex_grad[m][v];
      torque += (posed[v] - t).cross(g);
      force += g;
    }
    const Mat3 jl = so3_left_jacobian(pose.objects[o].rotation);
    out.gradient.objects[o] << scale * (jl.transpose() * torque), scale * force;
  }
  return out;
}

TermValue e_kpt_hand(const ScenePose& pose, const AnnotationSet& annotations,
                     std::span<const CameraView> views, const SceneModels& models) {
  check_shapes(pose, models);
  check_annotation_shapes(annotations, views, pose);
  TermValue out{0.0, Gradient::zeros_like(pose)};
  if (pose.hands.empty()) return out;

  int visible = 0;
  for (const auto& v : annotations.views)
    for (const auto& hand : v.hands)
      for (const auto& kp : hand) visible += kp.visible ? 1 : 0;
  if (visible == 0) throw Error("no visible hand keypoints");

  double sum = 0.0;
  for (std::size_t h = 0; h < pose.hands.size(); ++h) {
    const auto joints = hand_forward(models.hands[h], pose.hands[h]).joints;
    const Eigen::MatrixXd dj = hand_joint_jacobian(models.hands[h], pose.hands[h]);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(pose.hands[h].size());
    for (std::size_t c = 0; c < views.size(); ++c) {
      const auto& labels = annotations.views[c].hands[h];
      for (int j = 0; j < kJointCount; ++j) {
        if (!labels[j].visible) continue;
        Mat23 dpix;
        const Vec2 residual = views[c].project(joints[j], dpix) - labels[j].pixel;
        sum += residual.squaredNorm();
        grad += 2.0 * (residual.transpose() * dpix * dj.middleRows<3>(3 * j)).transpose();
      }
    }
    out.gradient.hands[h] = grad / visible;
  }
  out.value = sum / visible;
  return out;
}

TermValue e_kpt_object(const ScenePose& pose, const AnnotationSet& annotations,
                       std::span<const CameraView> views, const SceneModels& models) {
  check_shapes(pose, models);
  check_annotation_shapes(annotations, views, pose);
  TermValue out{0.0, Gradient::zeros_like(pose)};
  if (pose.objects.empty()) return out;

  int visible = 0;
  for (const auto& v : annotations.views) {
    for (std::size_t o = 0; o < v.objects.size(); ++o) {
      for (int k = 0; k < kObjectKeypoints; ++k) {
        if (!v.objects[o][k].visible) continue;
        if (o >= annotations.anchors.size() || !annotations.anchors[o][k])
          throw Error("visible object keypoint without a surface anchor");
        ++visible;
      }
    }
  }
  if (visible == 0) throw Error("no visible object keypoints");

  double sum = 0.0;
  for (std::size_t o = 0; o < pose.objects.size(); ++o) {
    const RigidPose& p = pose.objects[o];
    for (int k = 0; k < kObjectKeypoints; ++k) {
      if (o >= annotations.anchors.size() || !annotations.anchors[o][k]) continue;
      const Vec3 rest = annotations.anchors[o][k]->point_on(models.objects[o]);
      const Vec3 world = p.apply(rest);
      const Mat36 jac = rigid_jacobian(p, rest);
      for (std::size_t c = 0; c < views.size(); ++c) {
        const auto& label = annotations.views[c].objects[o][k];
        if (!label.visible) continue;
        Mat23 dpix;
        const Vec2 residual = views[c].project(world, dpix) - label.pixel;
        sum += residual.squaredNorm();
        out.gradient.objects[o] += 2.0 * (residual.transpose() * dpix * jac).transpose();
      }
    }
    out.gradient.objects[o] /= visible;
  }
  out.value = sum / visible;
  return out;
}

TermValue e_reg(const ScenePose& pose) {
  TermValue out{0.0, Gradient::zeros_like(pose)};
  if (pose.hands.empty()) return out;
  const double n = static_cast<double>(pose.hands.size());
  for (std::size_t h = 0; h < pose.hands.size(); ++h) {
    out.value += pose.hands[h].squaredNorm();
    out.gradient.hands[h] = 2.0 * pose.hands[h] / n;
  }
  out.value /= n;
  return out;
}

EnergyEvaluation e_total(const ScenePose& pose, const Observations& obs, const SceneModels& models) {
  const TermValue depth = e_depth(pose, obs.cloud, models);
  const TermValue hand = e_kpt_hand(pose, obs.annotations, obs.views, models);
  const TermValue object = e_kpt_object(pose, obs.annotations, obs.views, models);
  const TermValue reg = e_reg(pose);

  EnergyEvaluation out;
  out.report.e_depth = depth.value;
  out.report.e_kpt_hand = hand.value;
  out.report.e_kpt_object = object.value;
  out.report.e_reg = reg.value;
  out.report.e_total = depth.value + hand.value + object.value + reg.value;
  out.gradient = depth.gradient;
  out.gradient += hand.gradient;
  out.gradient += object.gradient;
  out.gradient += reg.gradient;
  return out;
}

}  // namespace dexfit
