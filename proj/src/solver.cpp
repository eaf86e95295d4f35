#include "dexfit/solver.hpp"

#include <cmath>

#include "dexfit/rotation.hpp"

namespace dexfit {

void SolveConfig::validate() const {
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw Error("Adam betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw Error("eps must be positive");
}

AdamState AdamState::for_size(Eigen::Index n, const SolveConfig& config) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  s.learning_rate = config.learning_rate;
  s.beta1 = config.beta1;
  s.beta2 = config.beta2;
  s.eps = config.eps;
  return s;
}

void adam_step(AdamState& s, Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != grad.size() || s.m.size() != params.size() || s.v.size() != params.size())
    throw Error("Adam shape mismatch");
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grad;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    params[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

FrameSolution solve_frame(const Observations& obs, const SceneModels& models,
                          const ScenePose& init, const SolveConfig& config) {
  config.validate();
  FrameSolution out;
  out.init = init;
  ScenePose pose = init;
  Eigen::VectorXd params = pose.flatten();
  AdamState state = AdamState::for_size(params.size(), config);
  out.trace.reserve(config.iterations + 1);
  for (int it = 0; it < config.iterations; ++it) {
    const EnergyEvaluation eval = e_total(pose, obs, models);
    out.trace.push_back(eval.report);
    adam_step(state, params, eval.gradient.flatten());
    pose = pose.unflatten(params);
    for (auto& o : pose.objects) o.rotation = canonical_axis_angle(o.rotation);
    params = pose.flatten();
  }
  out.trace.push_back(e_total(pose, obs, models).report);
  out.pose = std::move(pose);
  return out;
}

void establish_anchors(AnnotationSet& annotations, std::span<const CameraView> views,
                       const SceneModels& models, const ScenePose& pose) {
  annotations.anchors.resize(models.objects.size());
  for (std::size_t o = 0; o < models.objects.size(); ++o) {
    bool missing = false;
    for (const auto& a : annotations.anchors[o]) missing |= !a.has_value();
    if (!missing) continue;
    const IndexedMesh posed(rigid_forward(pose.objects[o], models.objects[o]).mesh);
    for (int k = 0; k < kObjectKeypoints; ++k) {
      if (annotations.anchors[o][k]) continue;
      for (std::size_t c = 0; c < views.size(); ++c) {
        const auto& label = annotations.views[c].objects[o][k];
        if (!label.visible) continue;
        annotations.anchors[o][k] = anchor_keypoint(views[c], label.pixel, posed);
        break;
      }
    }
  }
}

std::vector<FrameSolution> solve_sequence(std::vector<Observations> frames,
                                          const SceneModels& models, const ScenePose& first_init,
                                          const SolveConfig& config) {
  if (frames.empty()) throw Error("sequence has no frames");
  std::vector<FrameSolution> out;
  out.reserve(frames.size());
  std::vector<std::array<std::optional<SurfaceAnchor>, kObjectKeypoints>> anchors;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const ScenePose& init = t == 0 ? first_init : out.back().pose;
    try {
      auto& ann = frames[t].annotations;
      // Anchors carry over; a frame's own anchors win where it has them.
      ann.anchors.resize(models.objects.size());
      anchors.resize(models.objects.size());
      for (std::size_t o = 0; o < anchors.size(); ++o)
        for (int k = 0; k < kObjectKeypoints; ++k)
          if (!ann.anchors[o][k]) ann.anchors[o][k] = anchors[o][k];
      establish_anchors(ann, frames[t].views, models, init);
      anchors = ann.anchors;
      out.push_back(solve_frame(frames[t], models, init, config));
    } catch (const std::exception& e) {
      throw Error("frame " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace dexfit
