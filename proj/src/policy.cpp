#include "jrsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jrsim/rng.hpp"

namespace jrsim {

namespace {
const double kInside = std::nextafter(1.0, 0.0);
}  // namespace

double log1m_tanh2(double u) {
  // 1 - tanh^2 u = 4 / (e^u + e^-u)^2
  const double softplus = std::log1p(std::exp(-2.0 * std::abs(u)));
  return 2.0 * (std::numbers::ln2 - std::abs(u) - softplus);
}

SquashedSample squash(const Eigen::VectorXd& head, const Eigen::VectorXd& noise) {
  const Eigen::Index A = head.size() / 2;
  if (head.size() != 2 * A || noise.size() != A)
    throw ShapeError("policy head must be twice the action size");
  SquashedSample s;
  s.mean = head.head(A);
  s.log_std.resize(A);
  s.clamped = Eigen::VectorXd::Zero(A);
  for (Eigen::Index i = 0; i < A; ++i) {
    const double raw = head[A + i];
    if (raw < kLogStdMin || raw > kLogStdMax) s.clamped[i] = 1.0;
    s.log_std[i] = std::clamp(raw, kLogStdMin, kLogStdMax);
  }
  s.noise = noise;
  s.action.resize(A);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  s.log_prob = 0.0;
  for (Eigen::Index i = 0; i < A; ++i) {
    const double u = s.mean[i] + std::exp(s.log_std[i]) * noise[i];
    // tanh rounds to exactly +-1 beyond |u| ~ 19; keep actions strictly inside.
    s.action[i] = std::clamp(std::tanh(u), -kInside, kInside);
    s.log_prob += -0.5 * noise[i] * noise[i] - s.log_std[i] - half_log_2pi - log1m_tanh2(u);
  }
  return s;
}

SquashedSample policy_sample(const Mlp& net, const Eigen::VectorXd& state,
                             std::uint64_t noise_seed) {
  const Eigen::VectorXd head = net.forward(state);
  Rng rng(noise_seed);
  Eigen::VectorXd xi(head.size() / 2);
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
  return squash(head, xi);
}

Eigen::VectorXd deterministic_action(const Mlp& net, const Eigen::VectorXd& state) {
  const Eigen::VectorXd head = net.forward(state);
  return head.head(head.size() / 2).array().tanh().matrix();
}

Eigen::VectorXd log_prob_head_grad(const SquashedSample& s) {
  const Eigen::Index A = s.action.size();
  Eigen::VectorXd g(2 * A);
  for (Eigen::Index i = 0; i < A; ++i) {
    const double a = s.action[i];
    const double sigma_xi = std::exp(s.log_std[i]) * s.noise[i];
    g[i] = 2.0 * a;
    g[A + i] = s.clamped[i] != 0.0 ? 0.0 : -1.0 + 2.0 * a * sigma_xi;
  }
  return g;
}

Eigen::VectorXd action_head_grad(const SquashedSample& s, const Eigen::VectorXd& dL_da) {
  const Eigen::Index A = s.action.size();
  Eigen::VectorXd g(2 * A);
  for (Eigen::Index i = 0; i < A; ++i) {
    const double a = s.action[i];
    const double du = dL_da[i] * (1.0 - a * a);
    g[i] = du;
    g[A + i] = s.clamped[i] != 0.0 ? 0.0 : du * std::exp(s.log_std[i]) * s.noise[i];
  }
  return g;
}

}  // namespace jrsim
