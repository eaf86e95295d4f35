#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dexfit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<int, 3>;

/// Error type shared by every dexfit module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Triangle mesh in meters.
 *
 * Construction validates indices and rejects degenerate faces. Posed copies
 * produced by `with_vertices` share the topology and skip validation, since
 * the rest mesh already passed it.
 */
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  bool empty() const { return faces_.empty(); }

  /// Every undirected edge is shared by exactly two faces.
  bool is_closed() const { return closed_; }

  /// Same faces, new vertex positions (must match the vertex count).
  TriMesh with_vertices(std::vector<Vec3> vertices) const;

  const Vec3& corner(int face, int k) const { return vertices_[faces_[face][k]]; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  bool closed_ = false;
};

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  /// Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const;
};

/**
 * Axis-aligned bounding-box hierarchy over the faces of one mesh.
 *
 * Built by median split on the longest box axis with at most
 * `kLeafSize` faces per leaf. Immutable after construction; any number of
 * threads may query it concurrently.
 */
class AabbTree {
 public:
  static constexpr int kLeafSize = 4;

  struct Node {
    Aabb box;
    int left = -1;   // child node indices, -1 for leaves
    int right = -1;
    int first = 0;   // leaf: range into face_order()
    int count = 0;
    bool is_leaf() const { return left < 0; }
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& face_order() const { return face_order_; }
  int height() const { return height_; }

 private:
  friend AabbTree build_aabb_tree(const TriMesh& mesh);
  std::vector<Node> nodes_;
  std::vector<int> face_order_;
  int height_ = 0;
};

struct ClosestPointResult {
  Vec3 point = Vec3::Zero();
  int face = -1;
  Vec3 bary = Vec3::Zero();  // (u, v, w) weights of the face corners
  double distance = std::numeric_limits<double>::infinity();
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length

  Ray(const Vec3& o, const Vec3& d);
  Vec3 at(double t) const { return origin + t * direction; }
};

struct RayHit {
  int face = -1;
  double t = 0.0;
  Vec3 bary = Vec3::Zero();
};

/// Closest point on triangle (a, b, c) to p, with barycentric weights.
/// Voronoi-region walk; exact corner/edge weights on boundary regions.
void closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                               Vec3& closest, Vec3& bary);

/// Moller-Trumbore intersection; returns t and barycentrics on hit.
std::optional<RayHit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                         const Vec3& c);

AabbTree build_aabb_tree(const TriMesh& mesh);

ClosestPointResult closest_point(const AabbTree& tree, const TriMesh& mesh, const Vec3& p);

/// Element-wise identical to calling closest_point per point. Parallel over points.
std::vector<ClosestPointResult> distance_batch(const AabbTree& tree, const TriMesh& mesh,
                                               std::span<const Vec3> points);

/// Ray-parity inside test. Requires a closed mesh.
bool is_inside(const AabbTree& tree, const TriMesh& mesh, const Vec3& p);

/// Nearest intersection with t > kRayEpsilon, lowest face index on ties.
std::optional<RayHit> ray_cast(const AabbTree& tree, const TriMesh& mesh, const Ray& ray);

inline constexpr double kRayEpsilon = 1e-9;

/// A mesh bundled with its tree.
struct IndexedMesh {
  TriMesh mesh;
  AabbTree tree;

  IndexedMesh() = default;
  explicit IndexedMesh(TriMesh m) : mesh(std::move(m)), tree(build_aabb_tree(mesh)) {}
};

// Minimal ASCII triangle format: "v x y z" and "f i j k" (0-based).
TriMesh read_mesh(const std::string& path);
TriMesh parse_mesh(const std::string& text);
void write_mesh(const std::string& path, const TriMesh& mesh);
std::string format_mesh(const TriMesh& mesh);

}  // namespace dexfit
