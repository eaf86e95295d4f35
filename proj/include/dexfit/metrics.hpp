#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "dexfit/camera.hpp"
#include "dexfit/energy.hpp"

namespace dexfit {

/// 21 joints in millimeters, joint 0 is the wrist.
using JointSet = std::array<Vec3, kJointCount>;

enum class AlignMode { absolute, root_relative, procrustes };

const char* to_string(AlignMode mode);

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Least-squares similarity mapping `source` onto `target`.
SimilarityTransform procrustes_align(const JointSet& source, const JointSet& target);

/// Per-joint L2 errors after the chosen alignment of pred onto gt.
std::array<double, kJointCount> joint_errors(const JointSet& pred, const JointSet& gt,
                                             AlignMode mode);

double mpjpe(const JointSet& pred, const JointSet& gt, AlignMode mode);

/// Area under the PCK curve over thresholds max_mm * k / steps, k = 1..steps,
/// counting an error as correct when it is strictly below the threshold.
double pck_auc(std::span<const double> errors_mm, double max_mm = 50.0, int steps = 100);

struct JointReprojection {
  std::optional<double> mean;  // empty when the joint is never visible
  std::optional<double> stddev;
  int count = 0;
};

/// One frame's inputs for reprojection statistics.
struct ReprojectionSample {
  std::vector<Vec3> joints;  // world joints of one hand, meters
  const AnnotationSet* annotations;
  int hand = 0;
};

/// Per-joint mean and population standard deviation of the pixel distance
/// between projected joints and visible labels, pooled over views and samples.
std::array<JointReprojection, kJointCount> reprojection_error(
    std::span<const ReprojectionSample> samples, std::span<const CameraView> views);

}  // namespace dexfit
