#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dexfit {

struct GradCheckResult {
  std::string name;
  double max_rel_error = 0.0;
  int checks = 0;
};

/// Relative error of an analytic derivative against central differences:
/// max_i |a_i - n_i| / max(|a|_inf, |n|_inf), 0 when both vanish.
double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

/**
 * Central-difference checks of every analytic derivative over `scenes`
 * random scenes: E_depth, E_kpt (hand, object), E_reg, the hand Jacobian
 * (vertices and joints) and the rigid-object Jacobian.
 */
std::vector<GradCheckResult> run_gradient_checks(int scenes, std::uint64_t seed, double step = 1e-6);

inline constexpr double kGradTolerance = 1e-4;

}  // namespace dexfit
