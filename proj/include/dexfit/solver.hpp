#pragma once

#include <vector>

#include "dexfit/energy.hpp"

namespace dexfit {

struct SolveConfig {
  double learning_rate = 0.01;
  int iterations = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

/// Adam moments for a flat parameter vector.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(Eigen::Index n, const SolveConfig& config);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad);

struct FrameSolution {
  ScenePose init;
  ScenePose pose;
  /// trace[i] is the energy at the start of iteration i; the last entry is
  /// the energy of the returned pose.
  std::vector<EnergyReport> trace;
};

/// Runs exactly `config.iterations` Adam steps from `init`. Object rotations
/// are wrapped back to magnitude <= pi after every step.
FrameSolution solve_frame(const Observations& obs, const SceneModels& models,
                          const ScenePose& init, const SolveConfig& config);

/// Solves frames in order, starting each frame from the previous solution.
/// Object keypoints without an anchor are anchored at the first frame where
/// they are labeled, using the pose the frame is initialized with.
std::vector<FrameSolution> solve_sequence(std::vector<Observations> frames,
                                          const SceneModels& models, const ScenePose& first_init,
                                          const SolveConfig& config);

/// Fills missing anchors of `annotations` by back-projecting each visible
/// object keypoint onto the object posed at `pose`.
void establish_anchors(AnnotationSet& annotations, std::span<const CameraView> views,
                       const SceneModels& models, const ScenePose& pose);

}  // namespace dexfit
