#include "dexfit/models.hpp"

#include <cmath>

#include "dexfit/rotation.hpp"

namespace dexfit {

Mat3 RigidPose::rotation_matrix() const { return rodrigues(rotation); }

Vec3 RigidPose::apply(const Vec3& p) const { return rotation_matrix() * p + translation; }

Vec6 RigidPose::as_vector() const {
  Vec6 v;
  v << rotation, translation;
  return v;
}

RigidPose RigidPose::from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }

PosedModel rigid_forward(const RigidPose& pose, const TriMesh& rest) {
  const Mat3 r = pose.rotation_matrix();
  std::vector<Vec3> posed;
  posed.reserve(rest.vertex_count());
  for (const auto& v : rest.vertices()) posed.push_back(r * v + pose.translation);
  return {rest.with_vertices(std::move(posed)), {}};
}

Mat36 rigid_jacobian(const RigidPose& pose, const Vec3& vertex) {
  Mat36 j;
  const Vec3 rotated = pose.rotation_matrix() * vertex;
  j.leftCols<3>() = -skew(rotated) * so3_left_jacobian(pose.rotation);
  j.rightCols<3>() = Mat3::Identity();
  return j;
}

int joint_rotation_offset(int joint) {
  if (joint == 0) return 0;
  if (joint < 0 || joint >= kJointCount || joint % 4 == 0) return -1;
  const int finger = (joint - 1) / 4;
  const int segment = (joint - 1) % 4;
  return 6 + 3 * (3 * finger + segment);
}

HandModel::HandModel(TriMesh rest_mesh, std::array<int, kJointCount> parents,
                     std::array<Vec3, kJointCount> rest_joints,
                     std::vector<std::vector<VertexWeight>> weights, Eigen::MatrixXd pose_basis,
                     Eigen::MatrixXd shape_basis, Eigen::VectorXd beta)
    : rest_mesh_(std::move(rest_mesh)),
      parents_(parents),
      rest_joints_(rest_joints),
      weights_(std::move(weights)),
      pose_basis_(std::move(pose_basis)),
      shape_basis_(std::move(shape_basis)),
      beta_(std::move(beta)) {
  const std::size_t nv = rest_mesh_.vertex_count();
  if (parents_[0] != -1) throw Error("joint 0 must be the root");
  for (int j = 1; j < kJointCount; ++j) {
    if (parents_[j] < 0 || parents_[j] >= j) throw Error("joint parents must precede children");
  }
  if (weights_.size() != nv) throw Error("one skinning weight row per vertex required");
  for (const auto& row : weights_) {
    double sum = 0.0;
    for (const auto& w : row) {
      if (w.joint < 0 || w.joint >= kJointCount) throw Error("skinning weight joint out of range");
      if (w.weight < 0.0) throw Error("negative skinning weight");
      sum += w.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("skinning weights must sum to 1");
  }
  if (pose_basis_.rows() != kPoseParamCount || pose_basis_.cols() < 1)
    throw Error("pose basis must have 51 rows");
  if (shape_basis_.rows() != static_cast<Eigen::Index>(3 * nv) ||
      shape_basis_.cols() != beta_.size())
    throw Error("shape basis does not match vertices and beta");

  identity_basis_ = pose_basis_.cols() == kPoseParamCount &&
                    pose_basis_ == Eigen::MatrixXd::Identity(kPoseParamCount, kPoseParamCount);

  const Eigen::VectorXd offsets = shape_basis_ * beta_;
  shaped_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v)
    shaped_[v] = rest_mesh_.vertices()[v] + offsets.segment<3>(3 * v);

  for (int j = 0; j < kJointCount; ++j) {
    std::vector<int> chain;
    for (int k = j; k >= 0; k = parents_[k]) {
      if (joint_rotation_offset(k) >= 0) chain.insert(chain.begin(), k);
    }
    chains_[j] = std::move(chain);
  }
}

namespace {

struct Kinematics {
  std::array<Mat3, kJointCount> rotation;  // world rotation of each joint frame
  std::array<Vec3, kJointCount> position;  // world position of each joint
  std::array<Mat3, kJointCount> axis;      // columns: d(world rot)/d(local params) axes
};

Eigen::VectorXd pose_params(const HandModel& model, const HandPose& theta) {
  if (theta.size() != model.pose_dim())
    throw Error("hand pose has dimension " + std::to_string(theta.size()) + ", model expects " +
                std::to_string(model.pose_dim()));
  if (model.identity_basis()) return theta;
  return model.pose_basis() * theta;
}

Kinematics forward_kinematics(const HandModel& model, const Eigen::VectorXd& params) {
  Kinematics k;
  const auto& rest = model.rest_joints();
  for (int j = 0; j < kJointCount; ++j) {
    const int offset = joint_rotation_offset(j);
    const Vec3 w = offset >= 0 ? Vec3(params.segment<3>(offset)) : Vec3::Zero();
    const Mat3 local = rodrigues(w);
    const int p = model.parents()[j];
    if (p < 0) {
      k.rotation[j] = local;
      k.position[j] = rest[j] + params.segment<3>(3);
      k.axis[j] = so3_left_jacobian(w);
    } else {
      k.rotation[j] = k.rotation[p] * local;
      k.position[j] = k.rotation[p] * (rest[j] - rest[p]) + k.position[p];
      k.axis[j] = k.rotation[p] * so3_left_jacobian(w);
    }
  }
  return k;
}

Eigen::MatrixXd joint_jacobian_params(const HandModel& model, const Kinematics& k) {
  Eigen::MatrixXd dj = Eigen::MatrixXd::Zero(3 * kJointCount, kPoseParamCount);
  for (int j = 0; j < kJointCount; ++j) {
    auto rows = dj.middleRows<3>(3 * j);
    rows.middleCols<3>(3).setIdentity();
    for (int c : model.rotating_chain(j)) {
      if (c == j) continue;
      rows.middleCols<3>(joint_rotation_offset(c)) = -skew(k.position[j] - k.position[c]) * k.axis[c];
    }
  }
  return dj;
}

}  // namespace

PosedModel hand_forward(const HandModel& model, const HandPose& theta) {
  const Kinematics k = forward_kinematics(model, pose_params(model, theta));
  const auto& rest = model.rest_joints();
  const auto& shaped = model.shaped_vertices();
  std::vector<Vec3> posed(shaped.size());
  for (std::size_t v = 0; v < shaped.size(); ++v) {
    Vec3 p = Vec3::Zero();
    for (const auto& w : model.weights()[v])
      p += w.weight * (k.rotation[w.joint] * (shaped[v] - rest[w.joint]) + k.position[w.joint]);
    posed[v] = p;
  }
  PosedModel out{model.rest_mesh().with_vertices(std::move(posed)), {}};
  out.joints.assign(k.position.begin(), k.position.end());
  return out;
}

HandJacobian hand_jacobian(const HandModel& model, const HandPose& theta) {
  const Kinematics k = forward_kinematics(model, pose_params(model, theta));
  const auto& rest = model.rest_joints();
  const auto& shaped = model.shaped_vertices();
  const Eigen::Index nv = static_cast<Eigen::Index>(shaped.size());

  // d(point)/d(rotation params of joint c) = -[point - joint_c]x * axis_c.
  Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(3 * nv, kPoseParamCount);
  for (Eigen::Index v = 0; v < nv; ++v) {
    auto rows = dv.middleRows<3>(3 * v);
    rows.middleCols<3>(3).setIdentity();
    for (const auto& w : model.weights()[v]) {
      const Vec3 p = k.rotation[w.joint] * (shaped[v] - rest[w.joint]) + k.position[w.joint];
      for (int c : model.rotating_chain(w.joint)) {
        rows.middleCols<3>(joint_rotation_offset(c)) -=
            w.weight * skew(p - k.position[c]) * k.axis[c];
      }
    }
  }

  Eigen::MatrixXd dj = joint_jacobian_params(model, k);
  if (model.identity_basis()) return {std::move(dv), std::move(dj)};
  return {dv * model.pose_basis(), dj * model.pose_basis()};
}

Eigen::MatrixXd hand_joint_jacobian(const HandModel& model, const HandPose& theta) {
  const Kinematics k = forward_kinematics(model, pose_params(model, theta));
  Eigen::MatrixXd dj = joint_jacobian_params(model, k);
  if (model.identity_basis()) return dj;
  return dj * model.pose_basis();
}

Eigen::VectorXd ScenePose::flatten() const {
  Eigen::VectorXd out(parameter_count());
  Eigen::Index at = 0;
  for (const auto& h : hands) {
    out.segment(at, h.size()) = h;
    at += h.size();
  }
  for (const auto& o : objects) {
    out.segment<6>(at) = o.as_vector();
    at += 6;
  }
  return out;
}

ScenePose ScenePose::unflatten(const Eigen::VectorXd& params) const {
  if (params.size() != static_cast<Eigen::Index>(parameter_count()))
    throw Error("parameter vector does not match scene pose shape");
  ScenePose out;
  Eigen::Index at = 0;
  for (const auto& h : hands) {
    out.hands.push_back(params.segment(at, h.size()));
    at += h.size();
  }
  for (std::size_t o = 0; o < objects.size(); ++o) {
    out.objects.push_back(RigidPose::from_vector(params.segment<6>(at)));
    at += 6;
  }
  return out;
}

std::size_t ScenePose::parameter_count() const {
  std::size_t n = 6 * objects.size();
  for (const auto& h : hands) n += static_cast<std::size_t>(h.size());
  return n;
}

}  // namespace dexfit
