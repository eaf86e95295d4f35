#include "dexfit/synth.hpp"

#include <cmath>
#include <numbers>

#include "dexfit/rotation.hpp"

namespace dexfit {

TriMesh make_box(const Vec3& size) {
  const Vec3 h = 0.5 * size;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i)
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  // Outward-facing, two triangles per side.
  std::vector<Face> f = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                         {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_cylinder(double radius, double height, int segments) {
  if (segments < 3) throw Error("cylinder needs >= 3 segments");
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int i = 0; i < segments; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / segments;
    v.emplace_back(radius * std::cos(phi), radius * std::sin(phi), -0.5 * height);
    v.emplace_back(radius * std::cos(phi), radius * std::sin(phi), 0.5 * height);
  }
  const int bottom = static_cast<int>(v.size());
  v.emplace_back(0.0, 0.0, -0.5 * height);
  v.emplace_back(0.0, 0.0, 0.5 * height);
  const int top = bottom + 1;
  for (int i = 0; i < segments; ++i) {
    const int n = (i + 1) % segments;
    f.push_back({2 * i, 2 * n, 2 * n + 1});
    f.push_back({2 * i, 2 * n + 1, 2 * i + 1});
    f.push_back({bottom, 2 * n, 2 * i});
    f.push_back({top, 2 * i + 1, 2 * n + 1});
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_l_bracket(double leg_a, double leg_b, double thickness, double depth) {
  if (!(thickness > 0.0 && thickness < leg_a && thickness < leg_b && depth > 0.0))
    throw Error("invalid L-bracket dimensions");
  // Area centroid of the two rectangles making up the L.
  const double a1 = leg_a * thickness, a2 = thickness * (leg_b - thickness);
  const Vec3 centroid((a1 * leg_a / 2 + a2 * thickness / 2) / (a1 + a2),
                      (a1 * thickness / 2 + a2 * (thickness + leg_b) / 2) / (a1 + a2), 0.0);
  const std::array<Vec2, 6> outline = {Vec2(0, 0),         Vec2(leg_a, 0),
                                       Vec2(leg_a, thickness), Vec2(thickness, thickness),
                                       Vec2(thickness, leg_b), Vec2(0, leg_b)};
  std::vector<Vec3> v;
  for (double z : {-0.5 * depth, 0.5 * depth})
    for (const auto& p : outline) v.push_back(Vec3(p.x(), p.y(), z) - centroid);
  std::vector<Face> f;
  // The outline is star-shaped from its first corner, so a fan covers it.
  for (int i = 1; i + 1 < 6; ++i) {
    f.push_back({0, i + 1, i});
    f.push_back({6, 6 + i, 6 + i + 1});
  }
  for (int i = 0; i < 6; ++i) {
    const int n = (i + 1) % 6;
    f.push_back({i, n, 6 + n});
    f.push_back({i, 6 + n, 6 + i});
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_uv_sphere(double radius, int stacks, int slices) {
  if (stacks < 2 || slices < 3) throw Error("sphere needs >= 2 stacks and >= 3 slices");
  std::vector<Vec3> v;
  std::vector<Face> f;
  v.emplace_back(0.0, 0.0, radius);
  for (int s = 1; s < stacks; ++s) {
    const double polar = std::numbers::pi * s / stacks;
    for (int i = 0; i < slices; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / slices;
      v.emplace_back(radius * std::sin(polar) * std::cos(phi),
                     radius * std::sin(polar) * std::sin(phi), radius * std::cos(polar));
    }
  }
  v.emplace_back(0.0, 0.0, -radius);
  const int south = static_cast<int>(v.size()) - 1;
  auto ring = [&](int s, int i) { return 1 + (s - 1) * slices + (i % slices); };
  for (int i = 0; i < slices; ++i) f.push_back({0, ring(1, i), ring(1, i + 1)});
  for (int s = 1; s + 1 < stacks; ++s) {
    for (int i = 0; i < slices; ++i) {
      f.push_back({ring(s, i), ring(s + 1, i), ring(s + 1, i + 1)});
      f.push_back({ring(s, i), ring(s + 1, i + 1), ring(s, i + 1)});
    }
  }
  for (int i = 0; i < slices; ++i) f.push_back({south, ring(stacks - 1, i + 1), ring(stacks - 1, i)});
  return TriMesh(std::move(v), std::move(f));
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t a,
                         std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

SceneSpec SceneSpec::default_scene() {
  SceneSpec spec;
  ObjectSpec box;
  box.pose.rotation = Vec3(0.0, 0.0, 0.3);
  box.pose.translation = Vec3(0.0, 0.0, 0.05);
  spec.objects.push_back(box);
  HandSpec hand;
  hand.root_rotation = Vec3(0.0, 0.0, -std::numbers::pi / 2);
  hand.root_translation = Vec3(-0.13, 0.0, 0.14);
  spec.hands.push_back(hand);
  spec.rig.target = Vec3(0.0, 0.0, 0.07);
  return spec;
}

std::vector<CameraView> make_camera_ring(const RigSpec& rig) {
  if (rig.views < 1) throw Error("rig needs at least one view");
  std::vector<CameraView> views;
  for (int c = 0; c < rig.views; ++c) {
    const double phi = 2.0 * std::numbers::pi * c / rig.views;
    const Vec3 eye = rig.target + Vec3(rig.radius * std::cos(phi), rig.radius * std::sin(phi), rig.height);
    views.push_back(CameraView::look_at(eye, rig.target, Vec3::UnitZ(), rig.fx, rig.fy, rig.width,
                                        rig.height_px));
  }
  return views;
}

namespace {

TriMesh make_primitive(const ObjectSpec& o) {
  const auto& s = o.size;
  if (o.shape == "box" && s.size() == 3) return make_box(Vec3(s[0], s[1], s[2]));
  if (o.shape == "cylinder" && s.size() == 2) return make_cylinder(s[0], s[1]);
  if (o.shape == "l_bracket" && s.size() == 4) return make_l_bracket(s[0], s[1], s[2], s[3]);
  throw Error("unknown object shape '" + o.shape + "' or wrong size count");
}

RigidPose object_pose_at(const ObjectSpec& o, int frame) {
  RigidPose p;
  p.rotation = rotation_log(rodrigues(o.angular_velocity * frame) * o.pose.rotation_matrix());
  p.translation = o.pose.translation + o.velocity * frame;
  return p;
}

Vec3 sample_bary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r1 = unit(rng), r2 = unit(rng);
  if (r1 + r2 > 1.0) {
    r1 = 1.0 - r1;
    r2 = 1.0 - r2;
  }
  // Pull toward the centroid so anchors stay off edges.
  return 0.8 * Vec3(1.0 - r1 - r2, r1, r2) + Vec3::Constant(0.2 / 3.0);
}

}  // namespace

SyntheticScene build_scene(const SceneSpec& spec) {
  if (spec.frames < 1) throw Error("scene needs at least one frame");
  SyntheticScene scene;
  scene.spec = spec;
  scene.views = make_camera_ring(spec.rig);
  auto rng = make_rng(spec.seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (const auto& o : spec.objects) scene.models.objects.push_back(make_primitive(o));
  std::vector<HandPose> hand_base;
  for (const auto& h : spec.hands) {
    HandBuildOptions opt;
    opt.sides = h.sides;
    opt.rings = h.rings;
    opt.beta = h.beta;
    scene.models.hands.push_back(make_default_hand(opt));
    HandPose theta = HandPose::Zero(kPoseParamCount);
    theta.segment<3>(0) = h.root_rotation;
    theta.segment<3>(3) = h.root_translation;
    for (int i = 6; i < kPoseParamCount; ++i) theta[i] = h.articulation * normal(rng);
    hand_base.push_back(theta);
  }

  for (int t = 0; t < spec.frames; ++t) {
    ScenePose pose;
    for (std::size_t h = 0; h < spec.hands.size(); ++h) {
      HandPose theta = hand_base[h];
      theta.segment<3>(3) += spec.hands[h].velocity * t;
      pose.hands.push_back(theta);
    }
    for (const auto& o : spec.objects) pose.objects.push_back(object_pose_at(o, t));
    scene.gt.push_back(std::move(pose));
  }

  // Keypoints on faces seen by at least two views in the first frame.
  const auto meshes = posed_meshes(scene.models, scene.gt[0]);
  const std::size_t nh = scene.models.hands.size();
  for (std::size_t o = 0; o < scene.models.objects.size(); ++o) {
    const auto& rest = scene.models.objects[o];
    std::uniform_int_distribution<int> pick(0, static_cast<int>(rest.face_count()) - 1);
    std::array<SurfaceAnchor, kObjectKeypoints> kps;
    for (auto& kp : kps) {
      for (int attempt = 0; attempt < 200; ++attempt) {
        kp = SurfaceAnchor{pick(rng), sample_bary(rng)};
        const Vec3 world = scene.gt[0].objects[o].apply(kp.point_on(rest));
        int seen = 0;
        for (const auto& view : scene.views)
          seen += keypoint_visible(meshes, view, world, static_cast<int>(nh + o)) ? 1 : 0;
        if (seen >= 2) break;
      }
    }
    scene.object_keypoints.push_back(kps);
  }
  return scene;
}

std::vector<IndexedMesh> posed_meshes(const SceneModels& models, const ScenePose& pose) {
  std::vector<IndexedMesh> out;
  for (std::size_t h = 0; h < models.hands.size(); ++h)
    out.emplace_back(hand_forward(models.hands[h], pose.hands[h]).mesh);
  for (std::size_t o = 0; o < models.objects.size(); ++o)
    out.emplace_back(rigid_forward(pose.objects[o], models.objects[o]).mesh);
  return out;
}

RenderResult render_depth(std::span<const IndexedMesh> meshes, const CameraView& view,
                          double noise_sigma_m, std::mt19937_64* rng) {
  RenderResult out{DepthMap(view.width(), view.height()),
                   std::vector<int>(static_cast<std::size_t>(view.width()) * view.height(), -1)};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int y = 0; y < view.height(); ++y) {
    for (int x = 0; x < view.width(); ++x) {
      const Ray ray = view.pixel_ray(Vec2(x, y));
      double best_t = std::numeric_limits<double>::infinity();
      int best_mesh = -1;
      for (std::size_t m = 0; m < meshes.size(); ++m) {
        const auto hit = ray_cast(meshes[m].tree, meshes[m].mesh, ray);
        if (hit && hit->t < best_t) {
          best_t = hit->t;
          best_mesh = static_cast<int>(m);
        }
      }
      if (best_mesh < 0) continue;
      double depth = view.to_camera(ray.at(best_t)).z();
      if (noise_sigma_m > 0.0 && rng) depth += noise_sigma_m * normal(*rng);
      if (!(depth > 0.0)) continue;
      out.depth.at(x, y) = depth;
      out.labels[static_cast<std::size_t>(y) * view.width() + x] = best_mesh;
    }
  }
  return out;
}

bool keypoint_visible(std::span<const IndexedMesh> meshes, const CameraView& view,
                      const Vec3& point, int own_mesh) {
  if (view.to_camera(point).z() <= kMinCameraDepth) return false;
  if (!view.in_image(view.project(point))) return false;
  const Vec3 origin = view.center();
  const double dist = (point - origin).norm();
  const Ray ray(origin, (point - origin) / dist);
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    const auto hit = ray_cast(meshes[m].tree, meshes[m].mesh, ray);
    if (!hit) continue;
    const double tol = static_cast<int>(m) == own_mesh ? kJointClearance : kOcclusionTolerance;
    if (hit->t < dist - tol) return false;
  }
  return true;
}

AnnotationSet annotate(const SyntheticScene& scene, int frame, double noise_px,
                       std::mt19937_64& rng) {
  const ScenePose& pose = scene.gt.at(frame);
  const auto meshes = posed_meshes(scene.models, pose);
  const std::size_t nh = scene.models.hands.size();
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<Vec3>> joints;
  for (std::size_t h = 0; h < nh; ++h)
    joints.push_back(hand_forward(scene.models.hands[h], pose.hands[h]).joints);

  auto label = [&](const CameraView& view, const Vec3& point, int own) {
    Keypoint2D kp;
    kp.visible = keypoint_visible(meshes, view, point, own);
    const Vec2 noise(normal(rng), normal(rng));
    if (view.to_camera(point).z() > kMinCameraDepth) kp.pixel = view.project(point) + noise_px * noise;
    return kp;
  };

  AnnotationSet ann;
  ann.anchors.resize(scene.models.objects.size());
  for (const auto& view : scene.views) {
    AnnotationSet::View v;
    for (std::size_t h = 0; h < nh; ++h) {
      HandKeypoints hk;
      for (int j = 0; j < kJointCount; ++j) hk[j] = label(view, joints[h][j], static_cast<int>(h));
      v.hands.push_back(hk);
    }
    for (std::size_t o = 0; o < scene.models.objects.size(); ++o) {
      ObjectKeypoints ok;
      for (int k = 0; k < kObjectKeypoints; ++k) {
        const Vec3 world =
            pose.objects[o].apply(scene.object_keypoints[o][k].point_on(scene.models.objects[o]));
        ok[k] = label(view, world, static_cast<int>(nh + o));
      }
      v.objects.push_back(ok);
    }
    ann.views.push_back(std::move(v));
  }
  return ann;
}

PointCloud hand_point_cloud(std::span<const CameraView> views, std::span<const DepthMap> depths,
                            std::span<const std::vector<int>> labels, int hand_count) {
  std::vector<DepthMap> masked(depths.begin(), depths.end());
  for (std::size_t c = 0; c < masked.size(); ++c)
    for (std::size_t i = 0; i < masked[c].depth.size(); ++i)
      if (labels[c][i] < 0 || labels[c][i] >= hand_count) masked[c].depth[i] = 0.0;
  return merge_point_clouds(views, masked);
}

std::vector<FrameData> observe_sequence(const SyntheticScene& scene) {
  const auto& spec = scene.spec;
  const int nh = static_cast<int>(scene.models.hands.size());
  std::vector<FrameData> frames;
  for (int t = 0; t < spec.frames; ++t) {
    FrameData fd;
    const auto meshes = posed_meshes(scene.models, scene.gt[t]);
    for (std::size_t c = 0; c < scene.views.size(); ++c) {
      auto rng = make_rng(spec.seed, 2, t, c);
      auto r = render_depth(meshes, scene.views[c], spec.noise.depth_mm * 1e-3, &rng);
      fd.depths.push_back(std::move(r.depth));
      fd.labels.push_back(std::move(r.labels));
    }
    fd.obs.views = scene.views;
    fd.obs.cloud = merge_point_clouds(scene.views, fd.depths);
    fd.hand_cloud = hand_point_cloud(scene.views, fd.depths, fd.labels, nh);
    auto rng = make_rng(spec.seed, 3, t);
    fd.obs.annotations = annotate(scene, t, spec.noise.keypoint_px, rng);
    frames.push_back(std::move(fd));
  }

  // Each keypoint is anchored once, from the first frame and view that labels it.
  const std::size_t no = scene.models.objects.size();
  std::vector<std::array<std::optional<SurfaceAnchor>, kObjectKeypoints>> anchors(no);
  for (std::size_t o = 0; o < no; ++o) {
    for (int k = 0; k < kObjectKeypoints; ++k) {
      for (int t = 0; t < spec.frames && !anchors[o][k]; ++t) {
        const IndexedMesh posed(rigid_forward(scene.gt[t].objects[o], scene.models.objects[o]).mesh);
        for (std::size_t c = 0; c < scene.views.size() && !anchors[o][k]; ++c) {
          const auto& kp = frames[t].obs.annotations.views[c].objects[o][k];
          if (!kp.visible) continue;
          try {
            anchors[o][k] = anchor_keypoint(scene.views[c], kp.pixel, posed);
          } catch (const Error&) {
            // Label noise pushed the pixel off the object; try the next view.
          }
        }
      }
    }
  }
  for (auto& fd : frames) {
    fd.obs.annotations.anchors = anchors;
    for (auto& v : fd.obs.annotations.views)
      for (std::size_t o = 0; o < no; ++o)
        for (int k = 0; k < kObjectKeypoints; ++k)
          if (!anchors[o][k]) v.objects[o][k].visible = false;
  }
  return frames;
}

ScenePose perturb(const ScenePose& pose, const PerturbMagnitudes& mag, std::mt19937_64& rng) {
  if (mag.translation < 0.0 || mag.rotation < 0.0 || mag.theta < 0.0)
    throw Error("perturbation magnitudes must be non-negative");
  std::normal_distribution<double> normal(0.0, 1.0);
  ScenePose out = pose;
  for (auto& theta : out.hands) {
    if (mag.theta == 0.0) continue;
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += mag.theta * normal(rng);
  }
  for (auto& o : out.objects) {
    if (mag.rotation > 0.0) {
      const Vec3 delta(normal(rng), normal(rng), normal(rng));
      o.rotation = rotation_log(rodrigues(mag.rotation * delta) * o.rotation_matrix());
    }
    if (mag.translation > 0.0)
      o.translation += mag.translation * Vec3(normal(rng), normal(rng), normal(rng));
  }
  return out;
}

GraspSet make_object_grasps(const SyntheticScene& scene, int object, const GripperTemplate& gripper) {
  auto rng = make_rng(scene.spec.seed, 4, object);
  const GraspSet candidates = generate_grasp_candidates(
      scene.models.objects.at(object), gripper, scene.spec.grasp_candidates, rng);
  if (candidates.empty()) throw Error("no collision-free grasp candidates for object " + std::to_string(object));
  const std::size_t n = std::min<std::size_t>(candidates.size(), scene.spec.grasps);
  return fps_sample(candidates, n);
}

}  // namespace dexfit
