#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "dexfit/camera.hpp"
#include "dexfit/models.hpp"

namespace dexfit {

/// Gripper pose in SE(3). The gripper approaches along its local +z and
/// closes along its local x.
struct Grasp {
  Vec3 t = Vec3::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
};

using GraspSet = std::vector<Grasp>;

/// Grasps that survive collision checks against ground-truth meshes.
struct ReferenceSet {
  GraspSet grasps;
};

/// Points sampled on the gripper surface, gripper frame, meters.
struct GripperTemplate {
  std::vector<Vec3> points;
};

struct MatchConfig {
  double sigma_t = 0.05;        // meters
  double sigma_q_deg = 15.0;    // degrees

  void validate() const;
};

/// Translation distance below sigma_t and quaternion angle
/// arccos(|<q_g, q_h>|) below sigma_q.
bool grasp_match(const Grasp& g, const Grasp& h, const MatchConfig& cfg);

inline constexpr double kFpsRotationWeight = 0.1;  // meters per radian

/// |t_g - t_h| + lambda * arccos(|<q_g, q_h>|).
double grasp_distance(const Grasp& g, const Grasp& h, double lambda = kFpsRotationWeight);

/// Greedy farthest-point sampling seeded with element 0.
GraspSet fps_sample(const GraspSet& grasps, std::size_t n, double lambda = kFpsRotationWeight);

GraspSet transform_grasps(const GraspSet& grasps, const RigidPose& pose);

std::vector<Vec3> posed_gripper_points(const Grasp& g, const GripperTemplate& gripper);

/// Drops grasps with any gripper point closer than eps to any hand point.
GraspSet hand_collision_filter(const GraspSet& grasps, const GripperTemplate& gripper,
                               const PointCloud& hand_cloud, double eps);

/// Gripper-vs-mesh collision against a fixed set of closed meshes.
class MeshCollisionChecker {
 public:
  static constexpr double kSurfaceTolerance = 1e-4;

  /// Throws "mesh not closed" for any open mesh.
  explicit MeshCollisionChecker(std::vector<TriMesh> meshes);

  /// True when any posed gripper point is inside a mesh or within the
  /// surface tolerance of one.
  bool collides(const Grasp& g, const GripperTemplate& gripper) const;

 private:
  std::vector<IndexedMesh> meshes_;
};

/// Transforms object-frame grasps by the ground-truth pose and keeps those
/// not colliding with the posed object or the (already posed) hand meshes.
ReferenceSet build_reference_set(const GraspSet& grasps, const RigidPose& gt_object_pose,
                                 const TriMesh& object_rest, std::span<const TriMesh> hands,
                                 const GripperTemplate& gripper);

/// Fraction of R matched by some collision-free member of chi; 1 when R is empty.
double coverage(const GraspSet& chi, const ReferenceSet& reference, const MatchConfig& cfg,
                const MeshCollisionChecker& gt_meshes, const GripperTemplate& gripper);

/// Fraction of chi matching some member of R; empty when chi is empty.
std::optional<double> precision(const GraspSet& chi, const ReferenceSet& reference,
                                const MatchConfig& cfg);

/// Ground truth of one handover evaluation instance.
struct HandoverScene {
  GraspSet object_grasps;  // object frame
  TriMesh object_rest;
  RigidPose gt_object_pose;
  std::vector<TriMesh> gt_hands;  // posed
};

struct CurvePoint {
  double epsilon = 0.0;
  std::optional<double> precision;
  double coverage = 0.0;
};

/// Uniform grid over [0, max] with `count` points including both ends.
std::vector<double> default_eps_grid(int count = 15, double max = 0.07);

std::vector<CurvePoint> precision_coverage_curve(const HandoverScene& scene,
                                                 const RigidPose& estimated_pose,
                                                 const PointCloud& hand_cloud,
                                                 const GripperTemplate& gripper,
                                                 std::span<const double> eps_grid,
                                                 const MatchConfig& cfg = {});

/// Parallel-jaw gripper (8 cm opening, 5 cm fingers) sampled every `spacing` m.
GripperTemplate make_parallel_jaw_template(double spacing = 0.005);

/// Object-frame grasps around a mesh centered near its origin: random
/// approach and closing axes, fingers straddling a random point of the
/// object, kept only when collision-free against the object itself.
GraspSet generate_grasp_candidates(const TriMesh& object_rest, const GripperTemplate& gripper,
                                   std::size_t count, std::mt19937_64& rng);

}  // namespace dexfit
