#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jrsim/env.hpp"
#include "jrsim/mlp.hpp"
#include "jrsim/policy.hpp"
#include "jrsim/replay.hpp"

namespace jrsim {

enum class Method { sac, ddpg, maddpg, disjoint, random };

std::string method_name(Method m);
/// Throws std::invalid_argument for unknown names.
Method parse_method(const std::string& name);

struct AgentHyper {
  std::vector<int> hidden{64, 64};
  double lambda = 0.2;        // entropy temperature
  double discount = 0.9;
  double target_coeff = 0.05;
  std::size_t batch = 32;
  std::size_t capacity = 100000;
  std::size_t warmup = 1000;  // uniformly random steps before any update
  int grad_steps = 1;         // per environment step
  LrSchedule actor_lr{1e-5, 1e-4, 1.0};
  LrSchedule critic_lr{1e-4, 1e-4, 0.6};
  double explore_std = 1.0;   // DDPG-family Gaussian noise scale
  double eps_decay = 0.9994;  // per environment step
  double divergence_limit = 1e6;
  int eval_episodes = 3;      // deterministic-policy evaluation after training
  double disjoint_radio_delay = 0.010;  // s
  double disjoint_stage1_share = 0.5;   // fraction of episodes spent on the radio stage
  bool freeze_core = false;   // MA-DDPG: never update the core actor
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

struct CurveRow {
  int episode = 0;
  double mean_reward = 0.0;
  double mean_ee = 0.0;  // joint energy efficiency
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double admitted = 0.0;  // mean admitted users per step
};

struct EvalSummary {
  double mean_ee = 0.0;
  double mean_reward = 0.0;
  double mean_admitted = 0.0;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  EvalSummary final_eval;  // noise-free policy on fixed evaluation channels
  std::vector<std::pair<std::string, Mlp>> networks;

  /// Mean of mean_reward over the last n curve rows.
  double tail_reward(std::size_t n) const;
};

// ---- building blocks ------------------------------------------------------

/// Rows [S; A] per column.
Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom);

/// theta' <- coeff * theta + (1 - coeff) * theta'.
void target_update(const Mlp& online, Mlp& target, double coeff);

/// One regression step of a scalar critic toward `y` on inputs X (one
/// sample per column), minimizing mean 0.5 (Q - y)^2. Uses Adam when `opt`
/// is given, plain gradient descent otherwise. Returns the pre-update loss.
double critic_step(Mlp& critic, Adam* opt, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double lr);

/// Q values and dQ/da for a batch of (state, action) columns.
using QGradFn = std::function<void(const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                                   Eigen::VectorXd& q, Eigen::MatrixXd& dq_da)>;

/// Q and dQ/da from a critic taking [s; a].
void critic_q_grad(const Mlp& critic, const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                   Eigen::VectorXd& q, Eigen::MatrixXd& dq_da);

/// Reparameterized step on mean(lambda log pi(a|s) - Q(s, a)); noise comes
/// from `rng`. Returns the pre-update loss.
double sac_actor_update(Mlp& actor, Adam* opt, const Eigen::MatrixXd& S, const QGradFn& q,
                        double lambda, double lr, Rng& rng);

/// Deterministic actor step on mean(-Q(s, tanh(f(s)))). Returns pre-update loss.
double ddpg_actor_update(Mlp& actor, Adam* opt, const Eigen::MatrixXd& S, const QGradFn& q,
                         double lr);

/// Sample estimate E_{a~pi}[Q(s,a) - lambda log pi(a|s)] over `samples` draws.
double soft_value(const std::function<double(const Eigen::VectorXd&)>& q_of_action,
                  const Mlp& actor, const Eigen::VectorXd& state, double lambda, int samples,
                  std::uint64_t seed);

/// Exact soft value lambda * log sum exp(Q / lambda) over a finite action set.
double soft_value_discrete(const std::vector<double>& q, double lambda);

/// tanh applied to a deterministic actor's output.
Eigen::VectorXd tanh_policy(const Mlp& actor, const Eigen::VectorXd& state);

// ---- learners -------------------------------------------------------------

/// An off-policy learner acting on its own slice of the environment action.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual Eigen::Index action_dim() const = 0;
  /// Exploratory action once updates have started; `step` counts env steps.
  virtual Eigen::VectorXd explore(const Eigen::VectorXd& s, long long step, Rng& rng) = 0;
  /// Noise-free action.
  virtual Eigen::VectorXd greedy(const Eigen::VectorXd& s) const = 0;
  virtual UpdateStats update(const Batch& b, Rng& rng) = 0;
  virtual std::vector<std::pair<std::string, Mlp>> networks() const = 0;
};

/// Twin critics with min-combined targets, fixed temperature.
class SacLearner : public Learner {
 public:
  SacLearner(Eigen::Index state_dim, Eigen::Index action_dim, const AgentHyper& h, Rng& init);

  Eigen::Index action_dim() const override { return action_dim_; }
  Eigen::VectorXd explore(const Eigen::VectorXd& s, long long step, Rng& rng) override;
  Eigen::VectorXd greedy(const Eigen::VectorXd& s) const override;
  UpdateStats update(const Batch& b, Rng& rng) override;
  std::vector<std::pair<std::string, Mlp>> networks() const override;

  /// Critic half of update(); returns the mean of both critic losses.
  double update_critics(const Batch& b, Rng& rng);

  Mlp actor, q1, q2, target1, target2;
  Adam actor_opt, q1_opt, q2_opt;
  long long updates = 0;

 private:
  Eigen::Index action_dim_;
  AgentHyper h_;
};

class DdpgLearner : public Learner {
 public:
  DdpgLearner(Eigen::Index state_dim, Eigen::Index action_dim, const AgentHyper& h, Rng& init);

  Eigen::Index action_dim() const override { return action_dim_; }
  Eigen::VectorXd explore(const Eigen::VectorXd& s, long long step, Rng& rng) override;
  Eigen::VectorXd greedy(const Eigen::VectorXd& s) const override;
  UpdateStats update(const Batch& b, Rng& rng) override;
  std::vector<std::pair<std::string, Mlp>> networks() const override;

  Mlp actor, critic, target_actor, target_critic;
  Adam actor_opt, critic_opt;
  long long updates = 0;

 private:
  Eigen::Index action_dim_;
  AgentHyper h_;
};

/// Radio and core actors, each emitting its slice, trained against one
/// global critic on the joint action.
class MaddpgLearner : public Learner {
 public:
  MaddpgLearner(Eigen::Index state_dim, Eigen::Index radio_dim, Eigen::Index core_dim,
                const AgentHyper& h, Rng& init);

  Eigen::Index action_dim() const override { return radio_dim_ + core_dim_; }
  Eigen::VectorXd explore(const Eigen::VectorXd& s, long long step, Rng& rng) override;
  Eigen::VectorXd greedy(const Eigen::VectorXd& s) const override;
  UpdateStats update(const Batch& b, Rng& rng) override;
  std::vector<std::pair<std::string, Mlp>> networks() const override;

  Mlp radio_actor, core_actor, critic, target_radio, target_core, target_critic;
  Adam radio_opt, core_opt, critic_opt;
  long long updates = 0;

 private:
  Eigen::Index radio_dim_, core_dim_;
  AgentHyper h_;
};

/// Exploration scale eps_t = decay^t.
double exploration_scale(double decay, long long step);

// ---- trainers -------------------------------------------------------------

/// Runs one training stage. `compose` maps the learner's action to the full
/// environment action. With learner == nullptr every action is uniform random.
struct StageContext {
  Environment* env = nullptr;
  Learner* learner = nullptr;
  std::function<Eigen::VectorXd(const Eigen::VectorXd& s, const Eigen::VectorXd& a)> compose;
  Eigen::Index random_dim = 0;  // action size when learner is null
};

struct TrainState {
  std::unique_ptr<ReplayMemory> memory;
  long long env_steps = 0;
  Rng act_rng{0};
  Rng sample_rng{0};
};

/// Replay memory (optional) and the action/sampling streams for `seed`.
TrainState make_train_state(const AgentHyper& h, Eigen::Index state_dim, Eigen::Index action_dim,
                            std::uint64_t seed, bool with_memory = true);

void run_stage(StageContext& ctx, TrainState& st, const AgentHyper& h, int first_episode,
               int episodes, std::uint64_t seed, std::vector<CurveRow>& curve);

/// Mean joint EE / reward of a fixed policy over evaluation channels that do
/// not depend on the training seed.
EvalSummary evaluate_policy(Environment& env,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& policy,
                            int episodes);

TrainResult sac_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed);
TrainResult ddpg_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed);
TrainResult maddpg_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed);
TrainResult disjoint_train(Environment& env, const AgentHyper& h, int episodes,
                           std::uint64_t seed);
TrainResult random_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed);

TrainResult train(Method m, Environment& env, const AgentHyper& h, int episodes,
                  std::uint64_t seed);

}  // namespace jrsim
