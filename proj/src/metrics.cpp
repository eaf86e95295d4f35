#include "dexfit/metrics.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace dexfit {

const char* to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::absolute: return "absolute";
    case AlignMode::root_relative: return "root_relative";
    case AlignMode::procrustes: return "procrustes";
  }
  return "?";
}

SimilarityTransform procrustes_align(const JointSet& source, const JointSet& target) {
  Eigen::Matrix<double, 3, kJointCount> src, dst;
  for (int j = 0; j < kJointCount; ++j) {
    src.col(j) = source[j];
    dst.col(j) = target[j];
  }
  // Umeyama: SVD of the cross-covariance with reflection correction and scale.
  const Eigen::Matrix4d t = Eigen::umeyama(src, dst, true);
  SimilarityTransform out;
  const Mat3 sr = t.topLeftCorner<3, 3>();
  out.scale = std::cbrt(sr.determinant());
  out.rotation = sr / out.scale;
  out.translation = t.topRightCorner<3, 1>();
  return out;
}

std::array<double, kJointCount> joint_errors(const JointSet& pred, const JointSet& gt,
                                             AlignMode mode) {
  JointSet aligned = pred;
  if (mode == AlignMode::root_relative) {
    const Vec3 shift = gt[0] - pred[0];
    for (auto& p : aligned) p += shift;
  } else if (mode == AlignMode::procrustes) {
    const SimilarityTransform s = procrustes_align(pred, gt);
    for (auto& p : aligned) p = s.apply(p);
  }
  std::array<double, kJointCount> err{};
  for (int j = 0; j < kJointCount; ++j) err[j] = (aligned[j] - gt[j]).norm();
  return err;
}

double mpjpe(const JointSet& pred, const JointSet& gt, AlignMode mode) {
  double sum = 0.0;
  for (double e : joint_errors(pred, gt, mode)) sum += e;
  return sum / kJointCount;
}

double pck_auc(std::span<const double> errors_mm, double max_mm, int steps) {
  if (errors_mm.empty()) throw Error("pck_auc needs at least one error");
  if (steps < 1 || !(max_mm > 0.0)) throw Error("invalid PCK threshold grid");
  for (double e : errors_mm)
    if (!(e >= 0.0)) throw Error("errors must be non-negative");
  double area = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double tau = max_mm * k / steps;
    std::size_t below = 0;
    for (double e : errors_mm) below += e < tau ? 1 : 0;
    area += static_cast<double>(below) / static_cast<double>(errors_mm.size());
  }
  return area / steps;
}

std::array<JointReprojection, kJointCount> reprojection_error(
    std::span<const ReprojectionSample> samples, std::span<const CameraView> views) {
  std::array<std::vector<double>, kJointCount> dist;
  for (const auto& s : samples) {
    if (s.joints.size() != kJointCount) throw Error("reprojection sample needs 21 joints");
    if (s.annotations->views.size() != views.size())
      throw Error("annotations do not match the camera count");
    for (std::size_t c = 0; c < views.size(); ++c) {
      const auto& labels = s.annotations->views[c].hands.at(s.hand);
      for (int j = 0; j < kJointCount; ++j) {
        if (!labels[j].visible) continue;
        dist[j].push_back((views[c].project(s.joints[j]) - labels[j].pixel).norm());
      }
    }
  }
  std::array<JointReprojection, kJointCount> out;
  for (int j = 0; j < kJointCount; ++j) {
    const auto& d = dist[j];
    out[j].count = static_cast<int>(d.size());
    if (d.empty()) continue;
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double x : d) var += (x - mean) * (x - mean);
    out[j].mean = mean;
    out[j].stddev = std::sqrt(var / static_cast<double>(d.size()));
  }
  return out;
}

}  // namespace dexfit
