#include "dexfit/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "dexfit/rotation.hpp"

namespace dexfit {

namespace {

double quaternion_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return std::acos(std::clamp(std::abs(a.coeffs().dot(b.coeffs())), -1.0, 1.0));
}

double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

// Uniform hash grid over a point cloud for radius queries.
class PointGrid {
 public:
  PointGrid(const PointCloud& points, double cell) : points_(points), cell_(cell) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(cell_of(points[i]))].push_back(i);
  }

  bool any_within(const Vec3& p, double radius) const {
    const double r2 = radius * radius;
    const Eigen::Vector3i c = cell_of(p);
    const int reach = static_cast<int>(std::ceil(radius / cell_));
    for (int dx = -reach; dx <= reach; ++dx)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dz = -reach; dz <= reach; ++dz) {
          const auto it = cells_.find(key(c + Eigen::Vector3i(dx, dy, dz)));
          if (it == cells_.end()) continue;
          for (std::size_t i : it->second)
            if ((points_[i] - p).squaredNorm() < r2) return true;
        }
    return false;
  }

 private:
  Eigen::Vector3i cell_of(const Vec3& p) const {
    return (p / cell_).array().floor().cast<int>();
  }
  static std::int64_t key(const Eigen::Vector3i& c) {
    constexpr std::int64_t kSpan = 1 << 20;
    return ((c.x() + kSpan / 2) * kSpan + (c.y() + kSpan / 2)) * kSpan + (c.z() + kSpan / 2);
  }

  const PointCloud& points_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

void sample_box_surface(const Vec3& lo, const Vec3& hi, double spacing, std::vector<Vec3>& out) {
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    const int nu = static_cast<int>(std::ceil((hi[u] - lo[u]) / spacing)) + 1;
    const int nv = static_cast<int>(std::ceil((hi[v] - lo[v]) / spacing)) + 1;
    for (double side : {lo[axis], hi[axis]}) {
      for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
          Vec3 p;
          p[axis] = side;
          p[u] = lo[u] + (hi[u] - lo[u]) * i / (nu - 1);
          p[v] = lo[v] + (hi[v] - lo[v]) * j / (nv - 1);
          out.push_back(p);
        }
      }
    }
  }
}

}  // namespace

void MatchConfig::validate() const {
  if (!(sigma_t > 0.0)) throw Error("sigma_t must be positive");
  if (!(sigma_q_deg > 0.0 && sigma_q_deg < 180.0)) throw Error("sigma_q must lie in (0, 180) deg");
}

bool grasp_match(const Grasp& g, const Grasp& h, const MatchConfig& cfg) {
  return (g.t - h.t).norm() < cfg.sigma_t &&
         quaternion_angle(g.q, h.q) < degrees_to_radians(cfg.sigma_q_deg);
}

double grasp_distance(const Grasp& g, const Grasp& h, double lambda) {
  return (g.t - h.t).norm() + lambda * quaternion_angle(g.q, h.q);
}

GraspSet fps_sample(const GraspSet& grasps, std::size_t n, double lambda) {
  if (n < 1 || n > grasps.size()) throw Error("fps sample count out of range");
  GraspSet out;
  out.reserve(n);
  std::vector<double> nearest(grasps.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(grasps.size(), false);
  std::size_t next = 0;
  for (std::size_t k = 0; k < n; ++k) {
    taken[next] = true;
    out.push_back(grasps[next]);
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < grasps.size(); ++i) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], grasp_distance(grasps[i], grasps[next], lambda));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    next = best;
  }
  return out;
}

GraspSet transform_grasps(const GraspSet& grasps, const RigidPose& pose) {
  const Mat3 r = pose.rotation_matrix();
  const Eigen::Quaterniond qr(r);
  GraspSet out;
  out.reserve(grasps.size());
  for (const auto& g : grasps) out.push_back({r * g.t + pose.translation, (qr * g.q).normalized()});
  return out;
}

std::vector<Vec3> posed_gripper_points(const Grasp& g, const GripperTemplate& gripper) {
  const Mat3 r = g.q.toRotationMatrix();
  std::vector<Vec3> out;
  out.reserve(gripper.points.size());
  for (const auto& p : gripper.points) out.push_back(r * p + g.t);
  return out;
}

GraspSet hand_collision_filter(const GraspSet& grasps, const GripperTemplate& gripper,
                               const PointCloud& hand_cloud, double eps) {
  if (eps < 0.0) throw Error("epsilon must be non-negative");
  if (eps == 0.0 || hand_cloud.empty()) return grasps;
  const PointGrid grid(hand_cloud, eps);
  GraspSet out;
  for (const auto& g : grasps) {
    bool hit = false;
    for (const auto& p : posed_gripper_points(g, gripper)) {
      if (grid.any_within(p, eps)) {
        hit = true;
        break;
      }
    }
    if (!hit) out.push_back(g);
  }
  return out;
}

MeshCollisionChecker::MeshCollisionChecker(std::vector<TriMesh> meshes) {
  for (auto& m : meshes) {
    if (!m.is_closed()) throw Error("mesh not closed");
    meshes_.emplace_back(std::move(m));
  }
}

bool MeshCollisionChecker::collides(const Grasp& g, const GripperTemplate& gripper) const {
  const auto points = posed_gripper_points(g, gripper);
  for (const auto& m : meshes_) {
    for (const auto& p : points) {
      if (closest_point(m.tree, m.mesh, p).distance <= kSurfaceTolerance) return true;
      if (is_inside(m.tree, m.mesh, p)) return true;
    }
  }
  return false;
}

ReferenceSet build_reference_set(const GraspSet& grasps, const RigidPose& gt_object_pose,
                                 const TriMesh& object_rest, std::span<const TriMesh> hands,
                                 const GripperTemplate& gripper) {
  std::vector<TriMesh> meshes{rigid_forward(gt_object_pose, object_rest).mesh};
  meshes.insert(meshes.end(), hands.begin(), hands.end());
  const MeshCollisionChecker checker(std::move(meshes));
  ReferenceSet out;
  for (const auto& g : transform_grasps(grasps, gt_object_pose))
    if (!checker.collides(g, gripper)) out.grasps.push_back(g);
  return out;
}

double coverage(const GraspSet& chi, const ReferenceSet& reference, const MatchConfig& cfg,
                const MeshCollisionChecker& gt_meshes, const GripperTemplate& gripper) {
  if (reference.grasps.empty()) return 1.0;
  GraspSet usable;
  for (const auto& g : chi)
    if (!gt_meshes.collides(g, gripper)) usable.push_back(g);
  std::size_t covered = 0;
  for (const auto& r : reference.grasps) {
    for (const auto& g : usable) {
      if (grasp_match(r, g, cfg)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(reference.grasps.size());
}

std::optional<double> precision(const GraspSet& chi, const ReferenceSet& reference,
                                const MatchConfig& cfg) {
  if (chi.empty()) return std::nullopt;
  std::size_t matched = 0;
  for (const auto& g : chi) {
    for (const auto& r : reference.grasps) {
      if (grasp_match(g, r, cfg)) {
        ++matched;
        break;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(chi.size());
}

std::vector<double> default_eps_grid(int count, double max) {
  if (count < 1) throw Error("epsilon grid needs at least one point");
  if (count == 1) return {0.0};
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) grid[k] = max * k / (count - 1);
  return grid;
}

std::vector<CurvePoint> precision_coverage_curve(const HandoverScene& scene,
                                                 const RigidPose& estimated_pose,
                                                 const PointCloud& hand_cloud,
                                                 const GripperTemplate& gripper,
                                                 std::span<const double> eps_grid,
                                                 const MatchConfig& cfg) {
  cfg.validate();
  if (eps_grid.empty()) throw Error("epsilon grid is empty");
  for (std::size_t k = 1; k < eps_grid.size(); ++k)
    if (!(eps_grid[k] > eps_grid[k - 1])) throw Error("epsilon grid must be ascending");

  const ReferenceSet reference = build_reference_set(
      scene.object_grasps, scene.gt_object_pose, scene.object_rest, scene.gt_hands, gripper);
  std::vector<TriMesh> gt_meshes{rigid_forward(scene.gt_object_pose, scene.object_rest).mesh};
  gt_meshes.insert(gt_meshes.end(), scene.gt_hands.begin(), scene.gt_hands.end());
  const MeshCollisionChecker checker(std::move(gt_meshes));

  const GraspSet predicted = transform_grasps(scene.object_grasps, estimated_pose);
  std::vector<CurvePoint> curve;
  for (double eps : eps_grid) {
    const GraspSet chi = hand_collision_filter(predicted, gripper, hand_cloud, eps);
    curve.push_back({eps, precision(chi, reference, cfg), coverage(chi, reference, cfg, checker, gripper)});
  }
  return curve;
}

GripperTemplate make_parallel_jaw_template(double spacing) {
  if (!(spacing > 0.0)) throw Error("template spacing must be positive");
  std::vector<Vec3> raw;
  sample_box_surface({-0.05, -0.01, -0.01}, {0.05, 0.01, 0.0}, spacing, raw);   // palm
  sample_box_surface({0.04, -0.01, 0.0}, {0.05, 0.01, 0.05}, spacing, raw);     // finger
  sample_box_surface({-0.05, -0.01, 0.0}, {-0.04, 0.01, 0.05}, spacing, raw);   // finger
  sample_box_surface({-0.005, -0.005, -0.07}, {0.005, 0.005, -0.01}, spacing, raw);  // stem
  // Drop duplicates on shared edges, keeping first-seen order.
  std::map<std::array<long long, 3>, bool> seen;
  GripperTemplate out;
  for (const auto& p : raw) {
    const std::array<long long, 3> k{std::llround(p.x() * 1e7), std::llround(p.y() * 1e7),
                                     std::llround(p.z() * 1e7)};
    if (seen.emplace(k, true).second) out.points.push_back(p);
  }
  return out;
}

GraspSet generate_grasp_candidates(const TriMesh& object_rest, const GripperTemplate& gripper,
                                   std::size_t count, std::mt19937_64& rng) {
  const MeshCollisionChecker self_check({object_rest});
  Aabb box;
  for (const auto& v : object_rest.vertices()) box.extend(v);
  const Vec3 center = 0.5 * (box.min + box.max);
  const Vec3 half = 0.5 * (box.max - box.min);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  constexpr double kClearance = 0.005;

  GraspSet out;
  const std::size_t max_attempts = 50 * count + 100;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt) {
    const Vec3 approach = Vec3(normal(rng), normal(rng), normal(rng)).normalized();
    Vec3 side = Vec3(normal(rng), normal(rng), normal(rng));
    side = (side - side.dot(approach) * approach).normalized();
    const Vec3 target = center + 0.5 * half.cwiseProduct(Vec3(unit(rng), unit(rng), unit(rng)));
    double behind = 0.0;
    for (const auto& v : object_rest.vertices()) behind = std::max(behind, (target - v).dot(approach));
    Mat3 r;
    r.col(0) = side;
    r.col(1) = approach.cross(side);
    r.col(2) = approach;
    const Grasp g{target - (behind + kClearance) * approach, Eigen::Quaterniond(r).normalized()};
    if (!self_check.collides(g, gripper)) out.push_back(g);
  }
  return out;
}

}  // namespace dexfit
