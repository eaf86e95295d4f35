#include <cmath>
#include <numbers>

#include "dexfit/models.hpp"

namespace dexfit {

namespace {

struct FingerSpec {
  Vec3 base;
  Vec3 direction;
  std::array<double, 3> lengths;
  std::array<double, 3> radii;
};

// Right hand, wrist at the origin, fingers along +y, back of the hand +z.
const std::array<FingerSpec, 5> kFingers = {{
    {{0.045, 0.022, -0.004}, {0.8, 0.6, -0.1}, {0.035, 0.032, 0.028}, {0.0105, 0.0095, 0.0085}},
    {{0.025, 0.085, 0.0}, {0.1, 1.0, 0.0}, {0.040, 0.025, 0.022}, {0.0085, 0.0075, 0.0068}},
    {{0.005, 0.090, 0.0}, {0.0, 1.0, 0.0}, {0.045, 0.028, 0.024}, {0.0088, 0.0078, 0.0070}},
    {{-0.014, 0.085, 0.0}, {-0.08, 1.0, 0.0}, {0.042, 0.026, 0.022}, {0.0083, 0.0073, 0.0066}},
    {{-0.031, 0.076, 0.0}, {-0.18, 1.0, 0.0}, {0.033, 0.020, 0.020}, {0.0074, 0.0066, 0.0060}},
}};

constexpr int kPalmSides = 13;
constexpr double kPalmCenterY = 0.042;
constexpr double kPalmHalfWidth = 0.036;
constexpr double kPalmHalfLength = 0.043;
constexpr double kPalmHalfThickness = 0.012;
constexpr double kJointGap = 0.002;
constexpr double kBlendSpan = 0.3;  // fraction of a segment blended with its parent
constexpr double kShapeUnit = 0.001;

struct Builder {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::vector<VertexWeight>> weights;
  std::vector<std::array<double, 3 * kShapeCount>> shape;  // per vertex: 10 x (dx, dy, dz)

  int add(const Vec3& p, std::vector<VertexWeight> w) {
    vertices.push_back(p);
    weights.push_back(std::move(w));
    shape.emplace_back();
    shape.back().fill(0.0);
    return static_cast<int>(vertices.size()) - 1;
  }
  void shape_offset(int v, int coeff, const Vec3& dir) {
    for (int k = 0; k < 3; ++k) shape[v][3 * coeff + k] += kShapeUnit * dir[k];
  }
};

std::vector<VertexWeight> blend(int parent, int own, double parent_weight) {
  if (parent_weight <= 0.0) return {{own, 1.0}};
  return {{parent, parent_weight}, {own, 1.0 - parent_weight}};
}

void add_palm(Builder& b) {
  std::array<int, kPalmSides> bottom{}, top{};
  for (int i = 0; i < kPalmSides; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / kPalmSides;
    const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
    const Vec3 rim(kPalmHalfWidth * radial.x(), kPalmCenterY + kPalmHalfLength * radial.y(), 0.0);
    bottom[i] = b.add(rim - Vec3(0, 0, kPalmHalfThickness), {{0, 1.0}});
    top[i] = b.add(rim + Vec3(0, 0, kPalmHalfThickness), {{0, 1.0}});
    for (int v : {bottom[i], top[i]}) {
      b.shape_offset(v, 0, radial);
      b.shape_offset(v, 7, Vec3(radial.x(), 0.0, 0.0));
    }
    b.shape_offset(bottom[i], 6, Vec3(0, 0, -1));
    b.shape_offset(top[i], 6, Vec3(0, 0, 1));
  }
  const int cb = b.add(Vec3(0, kPalmCenterY, -kPalmHalfThickness), {{0, 1.0}});
  const int ct = b.add(Vec3(0, kPalmCenterY, kPalmHalfThickness), {{0, 1.0}});
  b.shape_offset(cb, 6, Vec3(0, 0, -1));
  b.shape_offset(ct, 6, Vec3(0, 0, 1));
  for (int i = 0; i < kPalmSides; ++i) {
    const int n = (i + 1) % kPalmSides;
    b.faces.push_back({bottom[i], bottom[n], top[n]});
    b.faces.push_back({bottom[i], top[n], top[i]});
    b.faces.push_back({cb, bottom[n], bottom[i]});
    b.faces.push_back({ct, top[i], top[n]});
  }
}

void add_segment(Builder& b, const HandBuildOptions& opt, int finger, int segment, const Vec3& from,
                 const Vec3& to, double radius, int joint, int parent) {
  const Vec3 axis = (to - from).normalized();
  const Vec3 start = from + kJointGap * axis;
  const Vec3 end = segment == 2 ? to : Vec3(to - kJointGap * axis);
  const Vec3 e1 = Vec3::UnitZ().cross(axis).normalized();
  const Vec3 e2 = axis.cross(e1);

  auto radial_shape = [&](int v, const Vec3& dir) {
    b.shape_offset(v, 0, dir);
    b.shape_offset(v, 1 + finger, dir);
    if (segment == 0) b.shape_offset(v, 8, dir);
    if (segment == 2) b.shape_offset(v, 9, dir);
  };

  std::vector<std::vector<int>> rings(opt.rings, std::vector<int>(opt.sides));
  for (int k = 0; k < opt.rings; ++k) {
    const double s = static_cast<double>(k) / (opt.rings - 1);
    const Vec3 center = start + s * (end - start);
    const double parent_weight = 0.5 * std::max(0.0, 1.0 - s / kBlendSpan);
    for (int i = 0; i < opt.sides; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / opt.sides;
      const Vec3 dir = std::cos(phi) * e1 + std::sin(phi) * e2;
      rings[k][i] = b.add(center + radius * dir, blend(parent, joint, parent_weight));
      radial_shape(rings[k][i], dir);
    }
  }
  const int c0 = b.add(start, blend(parent, joint, 0.5));
  const int c1 = b.add(end, {{joint, 1.0}});
  for (int k = 0; k + 1 < opt.rings; ++k) {
    for (int i = 0; i < opt.sides; ++i) {
      const int n = (i + 1) % opt.sides;
      b.faces.push_back({rings[k][i], rings[k][n], rings[k + 1][n]});
      b.faces.push_back({rings[k][i], rings[k + 1][n], rings[k + 1][i]});
    }
  }
  for (int i = 0; i < opt.sides; ++i) {
    const int n = (i + 1) % opt.sides;
    b.faces.push_back({c0, rings[0][n], rings[0][i]});
    b.faces.push_back({c1, rings[opt.rings - 1][i], rings[opt.rings - 1][n]});
  }
}

}  // namespace

HandModel make_default_hand(const HandBuildOptions& options) {
  if (options.sides < 3 || options.rings < 2) throw Error("hand needs >= 3 sides and >= 2 rings");
  if (options.beta.size() != kShapeCount) throw Error("beta must have 10 coefficients");

  std::array<int, kJointCount> parents{};
  std::array<Vec3, kJointCount> joints{};
  parents[0] = -1;
  joints[0] = Vec3::Zero();
  for (int f = 0; f < 5; ++f) {
    const auto& spec = kFingers[f];
    const Vec3 dir = spec.direction.normalized();
    Vec3 p = spec.base;
    for (int s = 0; s < 4; ++s) {
      const int j = 1 + 4 * f + s;
      parents[j] = s == 0 ? 0 : j - 1;
      joints[j] = p;
      if (s < 3) p += spec.lengths[s] * dir;
    }
  }

  Builder b;
  add_palm(b);
  for (int f = 0; f < 5; ++f) {
    for (int s = 0; s < 3; ++s) {
      const int j = 1 + 4 * f + s;
      add_segment(b, options, f, s, joints[j], joints[j + 1], kFingers[f].radii[s], j, parents[j]);
    }
  }

  const Eigen::Index nv = static_cast<Eigen::Index>(b.vertices.size());
  Eigen::MatrixXd shape_basis(3 * nv, kShapeCount);
  for (Eigen::Index v = 0; v < nv; ++v)
    for (int c = 0; c < kShapeCount; ++c)
      for (int k = 0; k < 3; ++k) shape_basis(3 * v + k, c) = b.shape[v][3 * c + k];

  return HandModel(TriMesh(std::move(b.vertices), std::move(b.faces)), parents, joints,
                   std::move(b.weights), Eigen::MatrixXd::Identity(kPoseParamCount, kPoseParamCount),
                   std::move(shape_basis), options.beta);
}

}  // namespace dexfit
