#include "jrsim/agents.hpp"

namespace jrsim {

namespace {
constexpr std::uint64_t kInitStream = 0x3ADD96;

std::vector<int> layer_sizes(Eigen::Index in, const std::vector<int>& hidden, Eigen::Index out) {
  std::vector<int> s{static_cast<int>(in)};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(static_cast<int>(out));
  return s;
}
}  // namespace

MaddpgLearner::MaddpgLearner(Eigen::Index state_dim, Eigen::Index radio_dim,
                             Eigen::Index core_dim, const AgentHyper& h, Rng& init)
    : radio_actor(Mlp::glorot(layer_sizes(state_dim, h.hidden, radio_dim), init)),
      core_actor(Mlp::glorot(layer_sizes(state_dim, h.hidden, core_dim), init)),
      critic(Mlp::glorot(layer_sizes(state_dim + radio_dim + core_dim, h.hidden, 1), init)),
      target_radio(radio_actor),
      target_core(core_actor),
      target_critic(critic),
      radio_dim_(radio_dim),
      core_dim_(core_dim),
      h_(h) {}

Eigen::VectorXd MaddpgLearner::explore(const Eigen::VectorXd& s, long long step, Rng& rng) {
  Eigen::VectorXd a = greedy(s);
  const double eps = exploration_scale(h_.eps_decay, step) * h_.explore_std;
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = std::clamp(a[i] + eps * rng.normal(), -1.0, 1.0);
  return a;
}

Eigen::VectorXd MaddpgLearner::greedy(const Eigen::VectorXd& s) const {
  Eigen::VectorXd a(radio_dim_ + core_dim_);
  a << tanh_policy(radio_actor, s), tanh_policy(core_actor, s);
  return a;
}

UpdateStats MaddpgLearner::update(const Batch& b, Rng&) {
  UpdateStats st;
  const Eigen::MatrixXd next_a =
      stack_rows(target_radio.forward(b.next_states).array().tanh().matrix(),
                 target_core.forward(b.next_states).array().tanh().matrix());
  const Eigen::VectorXd tq =
      target_critic.forward(stack_rows(b.next_states, next_a)).row(0).transpose();
  const Eigen::VectorXd y = b.rewards + h_.discount * tq;
  st.critic_loss = critic_step(critic, &critic_opt, stack_rows(b.states, b.actions), y,
                               h_.critic_lr.at(updates));

  const double lr = h_.actor_lr.at(updates);
  // Each agent sees the other's current action held fixed.
  const Eigen::MatrixXd core_now = core_actor.forward(b.states).array().tanh().matrix();
  const QGradFn radio_q = [&](const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                              Eigen::VectorXd& q, Eigen::MatrixXd& dq) {
    Eigen::MatrixXd full;
    critic_q_grad(critic, S, stack_rows(A, core_now), q, full);
    dq = full.topRows(radio_dim_);
  };
  st.actor_loss = ddpg_actor_update(radio_actor, &radio_opt, b.states, radio_q, lr);

  if (!h_.freeze_core) {
    const Eigen::MatrixXd radio_now = radio_actor.forward(b.states).array().tanh().matrix();
    const QGradFn core_q = [&](const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                               Eigen::VectorXd& q, Eigen::MatrixXd& dq) {
      Eigen::MatrixXd full;
      critic_q_grad(critic, S, stack_rows(radio_now, A), q, full);
      dq = full.bottomRows(core_dim_);
    };
    st.actor_loss =
        0.5 * (st.actor_loss + ddpg_actor_update(core_actor, &core_opt, b.states, core_q, lr));
    target_update(core_actor, target_core, h_.target_coeff);
  }
  target_update(radio_actor, target_radio, h_.target_coeff);
  target_update(critic, target_critic, h_.target_coeff);
  ++updates;
  return st;
}

std::vector<std::pair<std::string, Mlp>> MaddpgLearner::networks() const {
  return {{"radio_actor", radio_actor}, {"core_actor", core_actor}, {"critic", critic}};
}

TrainResult maddpg_train(Environment& env, const AgentHyper& h, int episodes,
                         std::uint64_t seed) {
  const auto S = static_cast<Eigen::Index>(env.state_size());
  const auto R = static_cast<Eigen::Index>(env.layout().radio_size());
  const auto C = static_cast<Eigen::Index>(env.layout().core_size());
  Rng init(mix_seed(seed, kInitStream));
  MaddpgLearner agent(S, R, C, h, init);
  TrainState st = make_train_state(h, S, R + C, seed);
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
