#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dexfit/camera.hpp"
#include "dexfit/models.hpp"

namespace dexfit {

inline constexpr int kObjectKeypoints = 2;

struct Keypoint2D {
  Vec2 pixel = Vec2::Zero();
  bool visible = false;
};

using HandKeypoints = std::array<Keypoint2D, kJointCount>;
using ObjectKeypoints = std::array<Keypoint2D, kObjectKeypoints>;

/// 2D keypoint labels of one frame.
struct AnnotationSet {
  struct View {
    std::vector<HandKeypoints> hands;
    std::vector<ObjectKeypoints> objects;
  };
  std::vector<View> views;
  /// Per object and keypoint; fixed once established.
  std::vector<std::array<std::optional<SurfaceAnchor>, kObjectKeypoints>> anchors;
};

/// Everything a frame's energy depends on besides the pose.
struct Observations {
  PointCloud cloud;
  std::vector<CameraView> views;
  AnnotationSet annotations;
};

struct SceneModels {
  std::vector<HandModel> hands;
  std::vector<TriMesh> objects;  // rest meshes
};

struct Gradient {
  std::vector<Eigen::VectorXd> hands;
  std::vector<Vec6> objects;

  static Gradient zeros_like(const ScenePose& pose);
  Gradient& operator+=(const Gradient& other);
  Eigen::VectorXd flatten() const;
};

struct TermValue {
  double value = 0.0;
  Gradient gradient;
};

struct EnergyReport {
  double e_depth = 0.0;       // mm^2
  double e_kpt_hand = 0.0;    // px^2
  double e_kpt_object = 0.0;  // px^2
  double e_reg = 0.0;
  double e_total = 0.0;
};

struct EnergyEvaluation {
  EnergyReport report;
  Gradient gradient;
};

/// Mean squared point-to-scene distance in mm^2. Each point is assigned to
/// the nearest posed mesh (hands first, then objects, on ties).
TermValue e_depth(const ScenePose& pose, const PointCloud& cloud, const SceneModels& models);

struct TriangleGradient {
  Vec3 da, db, dc;
};

/// Gradient of |d - (u a + v b + w c)|^2 w.r.t. the corners, weights held fixed.
TriangleGradient barycentric_grad(const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c,
                                  const Vec3& bary);

TermValue e_kpt_hand(const ScenePose& pose, const AnnotationSet& annotations,
                     std::span<const CameraView> views, const SceneModels& models);

TermValue e_kpt_object(const ScenePose& pose, const AnnotationSet& annotations,
                       std::span<const CameraView> views, const SceneModels& models);

TermValue e_reg(const ScenePose& pose);

/// Sum of all terms. Keypoint terms are skipped for scenes without hands or
/// objects respectively.
EnergyEvaluation e_total(const ScenePose& pose, const Observations& obs, const SceneModels& models);

}  // namespace dexfit
