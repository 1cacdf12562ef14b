#include "jrsim/agents.hpp"

namespace jrsim {

namespace {
constexpr std::uint64_t kInitStream = 0x5AC1;

std::vector<int> layer_sizes(Eigen::Index in, const std::vector<int>& hidden, Eigen::Index out) {
  std::vector<int> s{static_cast<int>(in)};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(static_cast<int>(out));
  return s;
}
}  // namespace

SacLearner::SacLearner(Eigen::Index state_dim, Eigen::Index action_dim, const AgentHyper& h,
                       Rng& init)
    : actor(Mlp::glorot(layer_sizes(state_dim, h.hidden, 2 * action_dim), init)),
      q1(Mlp::glorot(layer_sizes(state_dim + action_dim, h.hidden, 1), init)),
      q2(Mlp::glorot(layer_sizes(state_dim + action_dim, h.hidden, 1), init)),
      target1(q1),
      target2(q2),
      action_dim_(action_dim),
      h_(h) {}

Eigen::VectorXd SacLearner::explore(const Eigen::VectorXd& s, long long, Rng& rng) {
  return policy_sample(actor, s, rng.next_u64()).action;
}

Eigen::VectorXd SacLearner::greedy(const Eigen::VectorXd& s) const {
  return deterministic_action(actor, s);
}

double SacLearner::update_critics(const Batch& b, Rng& rng) {
  const Eigen::Index B = b.size();
  const Eigen::MatrixXd heads = actor.forward(b.next_states);
  Eigen::MatrixXd next_a(action_dim_, B);
  Eigen::VectorXd next_logp(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    Eigen::VectorXd xi(action_dim_);
    for (Eigen::Index k = 0; k < action_dim_; ++k) xi[k] = rng.normal();
    const SquashedSample smp = squash(heads.col(i), xi);
    next_a.col(i) = smp.action;
    next_logp[i] = smp.log_prob;
  }
  const Eigen::MatrixXd next_x = stack_rows(b.next_states, next_a);
  const Eigen::VectorXd t1 = target1.forward(next_x).row(0).transpose();
  const Eigen::VectorXd t2 = target2.forward(next_x).row(0).transpose();
  const Eigen::VectorXd soft_v = t1.cwiseMin(t2) - h_.lambda * next_logp;
  const Eigen::VectorXd y = b.rewards + h_.discount * soft_v;

  const Eigen::MatrixXd x = stack_rows(b.states, b.actions);
  const double lr = h_.critic_lr.at(updates);
  const double l1 = critic_step(q1, &q1_opt, x, y, lr);
  const double l2 = critic_step(q2, &q2_opt, x, y, lr);
  return 0.5 * (l1 + l2);
}

UpdateStats SacLearner::update(const Batch& b, Rng& rng) {
  UpdateStats st;
  st.critic_loss = update_critics(b, rng);
  const QGradFn twin_min = [this](const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                                  Eigen::VectorXd& q, Eigen::MatrixXd& dq) {
    Eigen::VectorXd qa, qb;
    Eigen::MatrixXd da, db;
    critic_q_grad(q1, S, A, qa, da);
    critic_q_grad(q2, S, A, qb, db);
    q = qa;
    dq = da;
    for (Eigen::Index i = 0; i < q.size(); ++i)
      if (qb[i] < qa[i]) {
        q[i] = qb[i];
        dq.col(i) = db.col(i);
      }
  };
  st.actor_loss =
      sac_actor_update(actor, &actor_opt, b.states, twin_min, h_.lambda, h_.actor_lr.at(updates), rng);
  target_update(q1, target1, h_.target_coeff);
  target_update(q2, target2, h_.target_coeff);
  ++updates;
  return st;
}

std::vector<std::pair<std::string, Mlp>> SacLearner::networks() const {
  return {{"actor", actor}, {"critic1", q1}, {"critic2", q2}};
}

TrainResult sac_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed) {
  const auto S = static_cast<Eigen::Index>(env.state_size());
  const auto A = static_cast<Eigen::Index>(env.action_size());
  Rng init(mix_seed(seed, kInitStream));
  SacLearner sac(S, A, h, init);
  TrainState st = make_train_state(h, S, A, seed);
  StageContext ctx;
  ctx.env = &env;
  ctx.learner = &sac;
  TrainResult res;
  run_stage(ctx, st, h, 0, episodes, seed, res.curve);
  res.final_eval =
      evaluate_policy(env, [&](const Eigen::VectorXd& s) { return sac.greedy(s); }, h.eval_episodes);
  res.networks = sac.networks();
  return res;
}

}  // namespace jrsim
