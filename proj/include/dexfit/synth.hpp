#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dexfit/camera.hpp"
#include "dexfit/energy.hpp"
#include "dexfit/grasp.hpp"
#include "dexfit/models.hpp"

namespace dexfit {

// Watertight parametric primitives centered at the origin.
TriMesh make_box(const Vec3& size);
TriMesh make_cylinder(double radius, double height, int segments = 24);
/// L-shaped extrusion: outer legs `leg_a` (x) and `leg_b` (y), wall `thickness`, extruded `depth` in z.
TriMesh make_l_bracket(double leg_a, double leg_b, double thickness, double depth);
TriMesh make_uv_sphere(double radius, int stacks, int slices);

/// Deterministic generator for one named random stream.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t a = 0,
                         std::uint64_t b = 0);

struct ObjectSpec {
  std::string shape = "box";  // box | cylinder | l_bracket
  std::vector<double> size{0.06, 0.04, 0.10};
  RigidPose pose;
  Vec3 velocity = Vec3::Zero();          // m per frame
  Vec3 angular_velocity = Vec3::Zero();  // rad per frame, world frame
};

struct HandSpec {
  Vec3 root_rotation = Vec3::Zero();
  Vec3 root_translation = Vec3::Zero();
  double articulation = 0.15;  // std of random finger joint angles, rad
  Vec3 velocity = Vec3::Zero();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(kShapeCount);
  int sides = 8;
  int rings = 6;
};

struct RigSpec {
  int views = 8;
  double radius = 0.5;
  double height = 0.35;
  Vec3 target{0.0, 0.0, 0.03};
  double fx = 200.0;
  double fy = 200.0;
  int width = 160;
  int height_px = 120;
};

struct NoiseSpec {
  double depth_mm = 0.0;
  double keypoint_px = 0.0;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int frames = 1;
  RigSpec rig;
  NoiseSpec noise;
  std::vector<ObjectSpec> objects;
  std::vector<HandSpec> hands;
  int grasp_candidates = 400;
  int grasps = 100;

  /// One box under a flat hand, the desk-scale default.
  static SceneSpec default_scene();
};

/// Ground truth of a synthetic sequence.
struct SyntheticScene {
  SceneSpec spec;
  SceneModels models;
  std::vector<CameraView> views;
  std::vector<ScenePose> gt;  // per frame
  /// Ground-truth object keypoints on the rest meshes.
  std::vector<std::array<SurfaceAnchor, kObjectKeypoints>> object_keypoints;
};

std::vector<CameraView> make_camera_ring(const RigSpec& rig);

SyntheticScene build_scene(const SceneSpec& spec);

/// Posed meshes of one frame: hands first, then objects.
std::vector<IndexedMesh> posed_meshes(const SceneModels& models, const ScenePose& pose);

struct RenderResult {
  DepthMap depth;
  std::vector<int> labels;  // per pixel posed-mesh index, -1 for no hit
};

/// Nearest-hit ray cast per pixel with optional Gaussian depth noise.
RenderResult render_depth(std::span<const IndexedMesh> meshes, const CameraView& view,
                          double noise_sigma_m = 0.0, std::mt19937_64* rng = nullptr);

/// Hand joints sit inside the finger surface; surface hits of the joint's
/// own hand closer than this to the joint do not occlude it.
inline constexpr double kJointClearance = 0.02;
inline constexpr double kOcclusionTolerance = 1e-4;

/// Visibility of a world point from a view: inside the image and no surface
/// crossed before it. `own_mesh` (or -1) gets the joint clearance.
bool keypoint_visible(std::span<const IndexedMesh> meshes, const CameraView& view,
                      const Vec3& point, int own_mesh = -1);

/// Labels of one frame: projections plus Gaussian pixel noise, with
/// visibility from the occlusion test. Anchors are left empty.
AnnotationSet annotate(const SyntheticScene& scene, int frame, double noise_px,
                       std::mt19937_64& rng);

/// Rendered cloud, hand-only cloud and labels of each frame, with object
/// anchors taken from the ground-truth pose at the first labeled frame.
struct FrameData {
  Observations obs;
  std::vector<DepthMap> depths;
  std::vector<std::vector<int>> labels;
  PointCloud hand_cloud;
};

std::vector<FrameData> observe_sequence(const SyntheticScene& scene);

/// Hand cloud: pixels whose label is a hand mesh.
PointCloud hand_point_cloud(std::span<const CameraView> views, std::span<const DepthMap> depths,
                            std::span<const std::vector<int>> labels, int hand_count);

struct PerturbMagnitudes {
  double translation = 0.0;  // m, per-axis std
  double rotation = 0.0;     // rad, per-axis std of a left-multiplied rotation
  double theta = 0.0;        // per-component std of hand embeddings
};

ScenePose perturb(const ScenePose& pose, const PerturbMagnitudes& magnitudes,
                  std::mt19937_64& rng);

/// Object-frame grasp set for object `o`: candidates thinned by FPS.
GraspSet make_object_grasps(const SyntheticScene& scene, int object,
                            const GripperTemplate& gripper);

}  // namespace dexfit
