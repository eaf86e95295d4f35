#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dexfit/geometry.hpp"

namespace dexfit {

using Mat36 = Eigen::Matrix<double, 3, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Rigid object pose: axis-angle rotation (radians) and translation (meters).
struct RigidPose {
  Vec3 rotation = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  Mat3 rotation_matrix() const;
  Vec3 apply(const Vec3& p) const;
  Vec6 as_vector() const;
  static RigidPose from_vector(const Vec6& v);
};

struct PosedModel {
  TriMesh mesh;
  std::vector<Vec3> joints;  // hands only
};

PosedModel rigid_forward(const RigidPose& pose, const TriMesh& rest);

/// d(R v + t)/d(rotation, translation), 3x6.
Mat36 rigid_jacobian(const RigidPose& pose, const Vec3& vertex);

inline constexpr int kJointCount = 21;
inline constexpr int kPoseParamCount = 51;  // root rotation, root translation, 15 x 3 joint rotations
inline constexpr int kShapeCount = 10;

/// Joint order: wrist, then thumb/index/middle/ring/pinky, each as three
/// articulated joints followed by a tip.
inline constexpr std::array<int, 5> kFingertips = {4, 8, 12, 16, 20};

/// Pose-parameter offset of the rotation owned by `joint`, or -1 for tips.
int joint_rotation_offset(int joint);

struct VertexWeight {
  int joint;
  double weight;
};

/**
 * Linear-blend-skinned articulated hand.
 *
 * The pose embedding theta maps through `pose_basis` (51 x D) to root
 * rotation, root translation and 15 per-joint axis-angle rotations. Shape
 * coefficients beta are fixed per subject and baked into the rest vertices.
 */
class HandModel {
 public:
  HandModel(TriMesh rest_mesh, std::array<int, kJointCount> parents,
            std::array<Vec3, kJointCount> rest_joints,
            std::vector<std::vector<VertexWeight>> weights, Eigen::MatrixXd pose_basis,
            Eigen::MatrixXd shape_basis, Eigen::VectorXd beta);

  const TriMesh& rest_mesh() const { return rest_mesh_; }
  const std::array<int, kJointCount>& parents() const { return parents_; }
  const std::array<Vec3, kJointCount>& rest_joints() const { return rest_joints_; }
  const std::vector<std::vector<VertexWeight>>& weights() const { return weights_; }
  const Eigen::MatrixXd& pose_basis() const { return pose_basis_; }
  const Eigen::MatrixXd& shape_basis() const { return shape_basis_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  int pose_dim() const { return static_cast<int>(pose_basis_.cols()); }
  bool identity_basis() const { return identity_basis_; }

  /// Rest vertices with the shape offsets applied.
  const std::vector<Vec3>& shaped_vertices() const { return shaped_; }
  /// Rotation-carrying ancestors of `joint`, including itself, root first.
  const std::vector<int>& rotating_chain(int joint) const { return chains_[joint]; }

 private:
  TriMesh rest_mesh_;
  std::array<int, kJointCount> parents_;
  std::array<Vec3, kJointCount> rest_joints_;
  std::vector<std::vector<VertexWeight>> weights_;
  Eigen::MatrixXd pose_basis_;
  Eigen::MatrixXd shape_basis_;
  Eigen::VectorXd beta_;
  std::vector<Vec3> shaped_;
  std::array<std::vector<int>, kJointCount> chains_;
  bool identity_basis_ = false;
};

using HandPose = Eigen::VectorXd;

PosedModel hand_forward(const HandModel& model, const HandPose& theta);

struct HandJacobian {
  Eigen::MatrixXd vertices;  // 3V x D, rows x/y/z per vertex
  Eigen::MatrixXd joints;    // 63 x D
};

HandJacobian hand_jacobian(const HandModel& model, const HandPose& theta);

/// Joint rows of hand_jacobian only (63 x D), skipping the vertex block.
Eigen::MatrixXd hand_joint_jacobian(const HandModel& model, const HandPose& theta);

struct HandBuildOptions {
  int sides = 8;  // polygon sides of each finger segment
  int rings = 6;  // vertex rings along each finger segment
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(kShapeCount);
};

/// Procedural right hand, 778 vertices with the default options.
HandModel make_default_hand(const HandBuildOptions& options = {});

/// Pose of a full scene: one embedding per hand and one rigid pose per object.
struct ScenePose {
  std::vector<HandPose> hands;
  std::vector<RigidPose> objects;

  Eigen::VectorXd flatten() const;
  /// Inverse of flatten using this pose's shapes.
  ScenePose unflatten(const Eigen::VectorXd& params) const;
  std::size_t parameter_count() const;
};

}  // namespace dexfit
