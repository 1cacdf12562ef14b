#include "jrsim/agents.hpp"

namespace jrsim {

namespace {
constexpr std::uint64_t kInitStream = 0xDD96;

std::vector<int> layer_sizes(Eigen::Index in, const std::vector<int>& hidden, Eigen::Index out) {
  std::vector<int> s{static_cast<int>(in)};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(static_cast<int>(out));
  return s;
}
}  // namespace

DdpgLearner::DdpgLearner(Eigen::Index state_dim, Eigen::Index action_dim, const AgentHyper& h,
                         Rng& init)
    : actor(Mlp::glorot(layer_sizes(state_dim, h.hidden, action_dim), init)),
      critic(Mlp::glorot(layer_sizes(state_dim + action_dim, h.hidden, 1), init)),
      target_actor(actor),
      target_critic(critic),
      action_dim_(action_dim),
      h_(h) {}

Eigen::VectorXd DdpgLearner::explore(const Eigen::VectorXd& s, long long step, Rng& rng) {
  Eigen::VectorXd a = tanh_policy(actor, s);
  const double eps = exploration_scale(h_.eps_decay, step) * h_.explore_std;
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = std::clamp(a[i] + eps * rng.normal(), -1.0, 1.0);
  return a;
}

Eigen::VectorXd DdpgLearner::greedy(const Eigen::VectorXd& s) const { return tanh_policy(actor, s); }

UpdateStats DdpgLearner::update(const Batch& b, Rng&) {
  UpdateStats st;
  const Eigen::MatrixXd next_a = target_actor.forward(b.next_states).array().tanh().matrix();
  const Eigen::VectorXd tq =
      target_critic.forward(stack_rows(b.next_states, next_a)).row(0).transpose();
  const Eigen::VectorXd y = b.rewards + h_.discount * tq;
  st.critic_loss = critic_step(critic, &critic_opt, stack_rows(b.states, b.actions), y,
                               h_.critic_lr.at(updates));
  const QGradFn qfn = [this](const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                             Eigen::VectorXd& q, Eigen::MatrixXd& dq) {
    critic_q_grad(critic, S, A, q, dq);
  };
  st.actor_loss = ddpg_actor_update(actor, &actor_opt, b.states, qfn, h_.actor_lr.at(updates));
  target_update(critic, target_critic, h_.target_coeff);
  target_update(actor, target_actor, h_.target_coeff);
  ++updates;
  return st;
}

std::vector<std::pair<std::string, Mlp>> DdpgLearner::networks() const {
  return {{"actor", actor}, {"critic", critic}};
}

TrainResult ddpg_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed) {
  const auto S = static_cast<Eigen::Index>(env.state_size());
  const auto A = static_cast<Eigen::Index>(env.action_size());
  Rng init(mix_seed(seed, kInitStream));
  DdpgLearner agent(S, A, h, init);
  TrainState st = make_train_state(h, S, A, seed);
  StageContext ctx;
  ctx.env = &env;
  ctx.learner = &agent;
  TrainResult res;
  run_stage(ctx, st, h, 0, episodes, seed, res.curve);
  res.final_eval = evaluate_policy(env, [&](const Eigen::VectorXd& s) { return agent.greedy(s); },
                                   h.eval_episodes);
  res.networks = agent.networks();
  return res;
}

}  // namespace jrsim
