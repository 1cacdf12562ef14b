#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "jrsim/mlp.hpp"

namespace jrsim {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// One reparameterized draw a = tanh(mean + exp(log_std) * noise).
struct SquashedSample {
  Eigen::VectorXd action;
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;   // after clamping
  Eigen::VectorXd noise;
  Eigen::VectorXd clamped;   // 1 where log_std hit a bound (no gradient)
  double log_prob = 0.0;
};

/// log(1 - tanh(u)^2), stable for large |u|.
double log1m_tanh2(double u);

/// Splits a 2A head output into mean and log-std and squashes one draw.
SquashedSample squash(const Eigen::VectorXd& head, const Eigen::VectorXd& noise);

/// Samples with standard-normal noise drawn from `noise_seed`.
SquashedSample policy_sample(const Mlp& net, const Eigen::VectorXd& state,
                             std::uint64_t noise_seed);

/// tanh(mean): the noise-free action.
Eigen::VectorXd deterministic_action(const Mlp& net, const Eigen::VectorXd& state);

/// Gradients of log_prob with respect to mean and log_std at fixed noise,
/// stacked as a 2A vector matching the head layout.
Eigen::VectorXd log_prob_head_grad(const SquashedSample& s);

/// Chain rule from dL/da to the 2A head through the reparameterization.
Eigen::VectorXd action_head_grad(const SquashedSample& s, const Eigen::VectorXd& dL_da);

}  // namespace jrsim
