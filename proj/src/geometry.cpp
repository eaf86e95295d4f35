#include "dexfit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dexfit/parallel.hpp"

namespace dexfit {

namespace {

bool edges_closed(const std::vector<Face>& faces) {
  std::map<std::pair<int, int>, int> edge_uses;
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      int i = f[k], j = f[(k + 1) % 3];
      if (i > j) std::swap(i, j);
      ++edge_uses[{i, j}];
    }
  }
  return std::all_of(edge_uses.begin(), edge_uses.end(),
                     [](const auto& e) { return e.second == 2; });
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int n = static_cast<int>(vertices_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n)
        throw Error("face " + std::to_string(f) + " index out of range");
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      throw Error("face " + std::to_string(f) + " repeats a vertex");
    const Vec3& a = vertices_[face[0]];
    const double twice_area = (vertices_[face[1]] - a).cross(vertices_[face[2]] - a).norm();
    if (!(twice_area > 0.0)) throw Error("face " + std::to_string(f) + " is degenerate");
  }
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw Error("non-finite vertex");
  }
  closed_ = !faces_.empty() && edges_closed(faces_);
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) throw Error("vertex count mismatch");
  TriMesh posed;
  posed.vertices_ = std::move(vertices);
  posed.faces_ = faces_;
  posed.closed_ = closed_;
  return posed;
}

double Aabb::squared_distance(const Vec3& p) const {
  const Vec3 lo = (min - p).cwiseMax(0.0);
  const Vec3 hi = (p - max).cwiseMax(0.0);
  return (lo + hi).squaredNorm();
}

Ray::Ray(const Vec3& o, const Vec3& d) : origin(o), direction(d) {
  if (std::abs(d.norm() - 1.0) > 1e-9) throw Error("ray direction must be unit length");
}

void closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                               Vec3& closest, Vec3& bary) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) {
    bary = {1.0, 0.0, 0.0};
    closest = a;
    return;
  }
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) {
    bary = {0.0, 1.0, 0.0};
    closest = b;
    return;
  }
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    bary = {1.0 - v, v, 0.0};
    closest = bary[0] * a + bary[1] * b;
    return;
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) {
    bary = {0.0, 0.0, 1.0};
    closest = c;
    return;
  }
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    bary = {1.0 - w, 0.0, w};
    closest = bary[0] * a + bary[2] * c;
    return;
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    bary = {0.0, 1.0 - w, w};
    closest = bary[1] * b + bary[2] * c;
    return;
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  bary = {1.0 - v - w, v, w};
  closest = bary[0] * a + bary[1] * b + bary[2] * c;
}

namespace {

struct RawHit {
  double t;
  double u;  // weight of b
  double v;  // weight of c
  double det;
};

// Moller-Trumbore without range checks; caller classifies the hit.
std::optional<RawHit> raw_intersect(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = ray.direction.cross(e2);
  const double det = e1.dot(pvec);
  if (det == 0.0) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = ray.origin - a;
  const double u = tvec.dot(pvec) * inv;
  const Vec3 qvec = tvec.cross(e1);
  const double v = ray.direction.dot(qvec) * inv;
  const double t = e2.dot(qvec) * inv;
  return RawHit{t, u, v, det};
}

bool ray_hits_box(const Ray& ray, const Vec3& inv_dir, const Aabb& box, double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    double ta = (box.min[k] - ray.origin[k]) * inv_dir[k];
    double tb = (box.max[k] - ray.origin[k]) * inv_dir[k];
    if (std::isnan(ta) || std::isnan(tb)) {
      // Direction component is zero and origin lies on a slab plane.
      if (ray.origin[k] < box.min[k] || ray.origin[k] > box.max[k]) return false;
      continue;
    }
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

template <typename Visit>
void traverse_ray(const AabbTree& tree, const Ray& ray, const double& t_max, Visit&& visit) {
  const auto& nodes = tree.nodes();
  if (nodes.empty()) return;
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const auto& node = nodes[idx];
    if (!ray_hits_box(ray, inv_dir, node.box, t_max)) continue;
    if (node.is_leaf()) {
      for (int k = 0; k < node.count; ++k) visit(tree.face_order()[node.first + k]);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

}  // namespace

std::optional<RayHit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                         const Vec3& c) {
  const auto raw = raw_intersect(ray, a, b, c);
  if (!raw) return std::nullopt;
  if (raw->u < 0.0 || raw->v < 0.0 || raw->u + raw->v > 1.0) return std::nullopt;
  RayHit hit;
  hit.t = raw->t;
  hit.bary = {1.0 - raw->u - raw->v, raw->u, raw->v};
  return hit;
}

AabbTree build_aabb_tree(const TriMesh& mesh) {
  if (mesh.empty()) throw Error("empty mesh");
  const int n = static_cast<int>(mesh.face_count());
  std::vector<Vec3> centroids(n);
  for (int f = 0; f < n; ++f)
    centroids[f] = (mesh.corner(f, 0) + mesh.corner(f, 1) + mesh.corner(f, 2)) / 3.0;

  AabbTree tree;
  tree.face_order_.resize(n);
  std::iota(tree.face_order_.begin(), tree.face_order_.end(), 0);
  tree.nodes_.reserve(2 * (n / AabbTree::kLeafSize + 1));

  // Recursion depth is logarithmic in the face count.
  auto build = [&](auto&& self, int first, int count, int depth) -> int {
    const int idx = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    Aabb box;
    for (int k = first; k < first + count; ++k) {
      const int f = tree.face_order_[k];
      for (int c = 0; c < 3; ++c) box.extend(mesh.corner(f, c));
    }
    tree.nodes_[idx].box = box;
    tree.height_ = std::max(tree.height_, depth);
    if (count <= AabbTree::kLeafSize) {
      tree.nodes_[idx].first = first;
      tree.nodes_[idx].count = count;
      return idx;
    }
    int axis = 0;
    (box.max - box.min).maxCoeff(&axis);
    const int half = count / 2;
    auto begin = tree.face_order_.begin() + first;
    std::nth_element(begin, begin + half, begin + count, [&](int lhs, int rhs) {
      const double a = centroids[lhs][axis], b = centroids[rhs][axis];
      return a < b || (a == b && lhs < rhs);
    });
    const int left = self(self, first, half, depth + 1);
    const int right = self(self, first + half, count - half, depth + 1);
    tree.nodes_[idx].left = left;
    tree.nodes_[idx].right = right;
    return idx;
  };
  build(build, 0, n, 0);
  return tree;
}

ClosestPointResult closest_point(const AabbTree& tree, const TriMesh& mesh, const Vec3& p) {
  ClosestPointResult best;
  double best_d2 = std::numeric_limits<double>::infinity();
  const auto& nodes = tree.nodes();
  if (nodes.empty()) return best;

  struct Entry {
    int node;
    double d2;
  };
  Entry stack[128];
  int top = 0;
  stack[top++] = {0, nodes[0].box.squared_distance(p)};
  Vec3 q, bary;
  while (top > 0) {
    const Entry e = stack[--top];
    // Strict: an equal-distance box may still hold a lower face index.
    if (e.d2 > best_d2) continue;
    const auto& node = nodes[e.node];
    if (node.is_leaf()) {
      for (int k = 0; k < node.count; ++k) {
        const int f = tree.face_order()[node.first + k];
        closest_point_on_triangle(p, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2), q,
                                  bary);
        const double d2 = (p - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && f < best.face)) {
          best_d2 = d2;
          best.face = f;
          best.point = q;
          best.bary = bary;
        }
      }
      continue;
    }
    const double dl = nodes[node.left].box.squared_distance(p);
    const double dr = nodes[node.right].box.squared_distance(p);
    // Push the farther child first so the nearer one is explored first.
    if (dl <= dr) {
      if (dr <= best_d2) stack[top++] = {node.right, dr};
      if (dl <= best_d2) stack[top++] = {node.left, dl};
    } else {
      if (dl <= best_d2) stack[top++] = {node.left, dl};
      if (dr <= best_d2) stack[top++] = {node.right, dr};
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

std::vector<ClosestPointResult> distance_batch(const AabbTree& tree, const TriMesh& mesh,
                                               std::span<const Vec3> points) {
  std::vector<ClosestPointResult> out(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = closest_point(tree, mesh, points[i]);
  });
  return out;
}

bool is_inside(const AabbTree& tree, const TriMesh& mesh, const Vec3& p) {
  if (!mesh.is_closed()) throw Error("mesh not closed");
  // Fixed, axis-avoiding directions; later ones are used only when an
  // earlier ray grazes an edge or vertex.
  static const std::array<Vec3, 6> kDirections = {
      Vec3(1.0, 2.0, 3.0).normalized(),    Vec3(-2.0, 0.7, 1.3).normalized(),
      Vec3(0.3, -1.9, 0.6).normalized(),   Vec3(-0.8, -0.45, -2.2).normalized(),
      Vec3(2.3, -0.35, -0.9).normalized(), Vec3(-0.15, 1.1, -0.55).normalized()};
  constexpr double kGraze = 1e-9;

  bool inside = false;
  for (const Vec3& dir : kDirections) {
    const Ray ray(p, dir);
    const double t_max = std::numeric_limits<double>::infinity();
    int crossings = 0;
    bool grazing = false;
    traverse_ray(tree, ray, t_max, [&](int f) {
      if (grazing) return;
      const Vec3& a = mesh.corner(f, 0);
      const Vec3& b = mesh.corner(f, 1);
      const Vec3& c = mesh.corner(f, 2);
      const auto raw = raw_intersect(ray, a, b, c);
      if (!raw) return;
      const double w = 1.0 - raw->u - raw->v;
      const double scale = (b - a).norm() * (c - a).norm();
      if (std::abs(raw->det) < 1e-12 * scale) {
        // Ray nearly parallel to the face plane.
        if (raw->u > -kGraze && raw->v > -kGraze && w > -kGraze && raw->t > -kGraze) grazing = true;
        return;
      }
      if (raw->t <= kRayEpsilon) return;
      if (raw->u < -kGraze || raw->v < -kGraze || w < -kGraze) return;
      if (raw->u < kGraze || raw->v < kGraze || w < kGraze) {
        grazing = true;
        return;
      }
      ++crossings;
    });
    inside = (crossings % 2) == 1;
    if (!grazing) break;
  }
  return inside;
}

std::optional<RayHit> ray_cast(const AabbTree& tree, const TriMesh& mesh, const Ray& ray) {
  std::optional<RayHit> best;
  double t_max = std::numeric_limits<double>::infinity();
  traverse_ray(tree, ray, t_max, [&](int f) {
    auto hit = intersect_triangle(ray, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
    if (!hit || hit->t <= kRayEpsilon) return;
    if (!best || hit->t < best->t || (hit->t == best->t && f < best->face)) {
      hit->face = f;
      best = hit;
      t_max = hit->t;
    }
  });
  return best;
}

}  // namespace dexfit
