#pragma once

// Brute-force reference implementations used by the tests. Each one takes a
// different route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "dexfit/camera.hpp"
#include "dexfit/grasp.hpp"
#include "dexfit/models.hpp"
#include "dexfit/rotation.hpp"
#include "dexfit/synth.hpp"

namespace oracle {

using dexfit::TriMesh;
using dexfit::Vec3;

inline double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// Plane projection if it lands inside the triangle, else the nearest edge.
inline double triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a).normalized();
  const double h = (p - a).dot(n);
  const Vec3 q = p - h * n;
  const bool inside = (b - a).cross(q - a).dot(n) >= 0.0 && (c - b).cross(q - b).dot(n) >= 0.0 &&
                      (a - c).cross(q - c).dot(n) >= 0.0;
  if (inside) return std::abs(h);
  return std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
}

inline double closest_distance(const TriMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    best = std::min(best, triangle_distance(p, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2)));
  return best;
}

/// Generalized winding number from signed solid angles (Van Oosterom-Strackee).
inline double winding_number(const TriMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Vec3 a = mesh.corner(f, 0) - p, b = mesh.corner(f, 1) - p, c = mesh.corner(f, 2) - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

inline bool inside(const TriMesh& mesh, const Vec3& p) { return winding_number(mesh, p) > 0.5; }

/// Ray parameter of the hit with triangle (a, b, c), solved as a 3x3 system.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                          const Vec3& c) {
  Eigen::Matrix3d m;
  m << -d, b - a, c - a;
  if (std::abs(m.determinant()) < 1e-15) return std::nullopt;
  const Vec3 x = m.partialPivLu().solve(o - a);
  if (x[1] < 0.0 || x[2] < 0.0 || x[1] + x[2] > 1.0 || x[0] <= 1e-9) return std::nullopt;
  return x[0];
}

/// All-faces occlusion test with the same tolerances as the library.
inline bool visible(const std::vector<TriMesh>& meshes, const dexfit::CameraView& view, const Vec3& point,
                    int own_mesh) {
  if (view.to_camera(point).z() <= dexfit::kMinCameraDepth) return false;
  if (!view.in_image(view.project(point))) return false;
  const Vec3 o = view.center();
  const double dist = (point - o).norm();
  const Vec3 d = (point - o) / dist;
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    const double tol = static_cast<int>(m) == own_mesh ? dexfit::kJointClearance : dexfit::kOcclusionTolerance;
    for (std::size_t f = 0; f < meshes[m].face_count(); ++f) {
      const auto t = ray_triangle(o, d, meshes[m].corner(f, 0), meshes[m].corner(f, 1), meshes[m].corner(f, 2));
      if (t && *t < dist - tol) return false;
    }
  }
  return true;
}

/// Hand forward kinematics with 4x4 homogeneous transforms.
struct Fk {
  std::vector<Vec3> vertices;
  std::vector<Vec3> joints;
};

inline Eigen::Matrix4d translate(const Vec3& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topRightCorner<3, 1>() = t;
  return m;
}

inline Fk hand_fk(const dexfit::HandModel& model, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd params = model.pose_basis() * theta;
  const auto& rest = model.rest_joints();
  std::array<Eigen::Matrix4d, dexfit::kJointCount> g;
  for (int j = 0; j < dexfit::kJointCount; ++j) {
    const int off = dexfit::joint_rotation_offset(j);
    Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
    if (off >= 0) {
      const Vec3 w = params.segment<3>(off);
      if (w.norm() > 0.0) r.topLeftCorner<3, 3>() = Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix();
    }
    const Eigen::Matrix4d local = translate(rest[j]) * r * translate(-rest[j]);
    const int p = model.parents()[j];
    g[j] = p < 0 ? translate(params.segment<3>(3)) * local : g[p] * local;
  }
  Fk out;
  for (int j = 0; j < dexfit::kJointCount; ++j) out.joints.push_back((g[j] * rest[j].homogeneous()).head<3>());
  const Eigen::VectorXd offsets = model.shape_basis() * model.beta();
  for (std::size_t v = 0; v < model.rest_mesh().vertex_count(); ++v) {
    const Vec3 x = model.rest_mesh().vertices()[v] + offsets.segment<3>(3 * v);
    Vec3 sum = Vec3::Zero();
    for (const auto& w : model.weights()[v]) sum += w.weight * (g[w.joint] * x.homogeneous()).head<3>();
    out.vertices.push_back(sum);
  }
  return out;
}

inline double quaternion_angle_deg(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const double dot = a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
  return std::acos(std::min(1.0, std::abs(dot))) * 180.0 / std::numbers::pi;
}

inline bool matches(const dexfit::Grasp& g, const dexfit::Grasp& h, double sigma_t, double sigma_q_deg) {
  return (g.t - h.t).norm() < sigma_t && quaternion_angle_deg(g.q, h.q) < sigma_q_deg;
}

/// Double-loop coverage; `collision_free[i]` flags chi[i].
inline double coverage(const dexfit::GraspSet& chi, const std::vector<bool>& collision_free,
                       const dexfit::GraspSet& reference, double sigma_t, double sigma_q_deg) {
  if (reference.empty()) return 1.0;
  int hit = 0;
  for (const auto& r : reference) {
    bool any = false;
    for (std::size_t i = 0; i < chi.size(); ++i)
      if (collision_free[i] && matches(chi[i], r, sigma_t, sigma_q_deg)) any = true;
    hit += any ? 1 : 0;
  }
  return static_cast<double>(hit) / reference.size();
}

inline std::optional<double> precision(const dexfit::GraspSet& chi, const dexfit::GraspSet& reference,
                                       double sigma_t, double sigma_q_deg) {
  if (chi.empty()) return std::nullopt;
  int hit = 0;
  for (const auto& g : chi) {
    bool any = false;
    for (const auto& r : reference) any = any || matches(g, r, sigma_t, sigma_q_deg);
    hit += any ? 1 : 0;
  }
  return static_cast<double>(hit) / chi.size();
}

/// Random closed mesh: a UV sphere with radially jittered vertices.
inline TriMesh jittered_sphere(std::mt19937_64& rng, int stacks, int slices, double radius, double jitter) {
  const TriMesh base = dexfit::make_uv_sphere(radius, stacks, slices);
  std::uniform_real_distribution<double> u(1.0 - jitter, 1.0 + jitter);
  std::vector<Vec3> v = base.vertices();
  for (auto& p : v) p *= u(rng);
  return TriMesh(v, base.faces());
}

/// Random open triangle soup inside a cube of half-size `extent`.
inline TriMesh triangle_soup(std::mt19937_64& rng, int faces, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent), s(-0.1 * extent, 0.1 * extent);
  std::vector<Vec3> v;
  std::vector<dexfit::Face> f;
  for (int i = 0; i < faces; ++i) {
    const Vec3 c(u(rng), u(rng), u(rng));
    const int base = static_cast<int>(v.size());
    for (int k = 0; k < 3; ++k) v.push_back(c + Vec3(s(rng), s(rng), s(rng)));
    f.push_back({base, base + 1, base + 2});
  }
  return TriMesh(v, f);
}

}  // namespace oracle
