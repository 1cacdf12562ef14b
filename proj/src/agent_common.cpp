#include <cmath>
#include <numeric>

#include "jrsim/agents.hpp"

namespace jrsim {

namespace {
constexpr std::uint64_t kActStream = 0xAC7104;
constexpr std::uint64_t kSampleStream = 0x5A3B1E;
constexpr std::uint64_t kEvalSeed = 0xE7A1DA7A;
}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::sac: return "sac";
    case Method::ddpg: return "ddpg";
    case Method::maddpg: return "maddpg";
    case Method::disjoint: return "disjoint";
    case Method::random: return "random";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::sac, Method::ddpg, Method::maddpg, Method::disjoint, Method::random})
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected sac, ddpg, maddpg, disjoint or random)");
}

double TrainResult::tail_reward(std::size_t n) const {
  if (curve.empty()) return 0.0;
  const std::size_t k = std::min(n, curve.size());
  double s = 0.0;
  for (std::size_t i = curve.size() - k; i < curve.size(); ++i) s += curve[i].mean_reward;
  return s / static_cast<double>(k);
}

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

void target_update(const Mlp& online, Mlp& target, double coeff) {
  target.params() = coeff * online.params() + (1.0 - coeff) * target.params();
}

double critic_step(Mlp& critic, Adam* opt, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double lr) {
  Mlp::Tape tape;
  const Eigen::VectorXd q = critic.forward(X, tape).row(0).transpose();
  const Eigen::VectorXd err = q - y;
  const double n = static_cast<double>(y.size());
  const double loss = 0.5 * err.squaredNorm() / n;
  const Eigen::VectorXd grad = critic.backward(tape, err.transpose() / n);
  if (opt)
    opt->step(critic.params(), grad, lr);
  else
    sgd_step(critic.params(), grad, lr);
  return loss;
}

void critic_q_grad(const Mlp& critic, const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                   Eigen::VectorXd& q, Eigen::MatrixXd& dq_da) {
  Mlp::Tape tape;
  q = critic.forward(stack_rows(S, A), tape).row(0).transpose();
  Eigen::MatrixXd dX;
  critic.backward(tape, Eigen::MatrixXd::Ones(1, S.cols()), &dX);
  dq_da = dX.bottomRows(A.rows());
}

double sac_actor_update(Mlp& actor, Adam* opt, const Eigen::MatrixXd& S, const QGradFn& qfn,
                        double lambda, double lr, Rng& rng) {
  Mlp::Tape tape;
  const Eigen::MatrixXd heads = actor.forward(S, tape);
  const Eigen::Index A = heads.rows() / 2;
  const Eigen::Index B = S.cols();
  std::vector<SquashedSample> samples;
  samples.reserve(static_cast<std::size_t>(B));
  Eigen::MatrixXd actions(A, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    Eigen::VectorXd xi(A);
    for (Eigen::Index i = 0; i < A; ++i) xi[i] = rng.normal();
    samples.push_back(squash(heads.col(b), xi));
    actions.col(b) = samples.back().action;
  }
  Eigen::VectorXd q;
  Eigen::MatrixXd dq;
  qfn(S, actions, q, dq);
  double loss = 0.0;
  Eigen::MatrixXd d_head(2 * A, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto& s = samples[static_cast<std::size_t>(b)];
    loss += lambda * s.log_prob - q[b];
    d_head.col(b) = (lambda * log_prob_head_grad(s) + action_head_grad(s, -dq.col(b))) /
                    static_cast<double>(B);
  }
  const Eigen::VectorXd grad = actor.backward(tape, d_head);
  if (opt)
    opt->step(actor.params(), grad, lr);
  else
    sgd_step(actor.params(), grad, lr);
  return loss / static_cast<double>(B);
}

double ddpg_actor_update(Mlp& actor, Adam* opt, const Eigen::MatrixXd& S, const QGradFn& qfn,
                         double lr) {
  Mlp::Tape tape;
  const Eigen::MatrixXd actions = actor.forward(S, tape).array().tanh().matrix();
  Eigen::VectorXd q;
  Eigen::MatrixXd dq;
  qfn(S, actions, q, dq);
  const double B = static_cast<double>(S.cols());
  const Eigen::MatrixXd d_out =
      (-dq.array() * (1.0 - actions.array().square())).matrix() / B;
  const Eigen::VectorXd grad = actor.backward(tape, d_out);
  if (opt)
    opt->step(actor.params(), grad, lr);
  else
    sgd_step(actor.params(), grad, lr);
  return -q.mean();
}

double soft_value(const std::function<double(const Eigen::VectorXd&)>& q_of_action,
                  const Mlp& actor, const Eigen::VectorXd& state, double lambda, int samples,
                  std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("soft_value needs at least one sample");
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto s = policy_sample(actor, state, mix_seed(seed, static_cast<std::uint64_t>(i)));
    total += q_of_action(s.action) - lambda * s.log_prob;
  }
  return total / samples;
}

double soft_value_discrete(const std::vector<double>& q, double lambda) {
  if (q.empty() || !(lambda > 0.0)) throw std::invalid_argument("soft_value_discrete");
  double mx = q.front();
  for (double v : q) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : q) s += std::exp((v - mx) / lambda);
  return mx + lambda * std::log(s);
}

Eigen::VectorXd tanh_policy(const Mlp& actor, const Eigen::VectorXd& state) {
  return actor.forward(state).array().tanh().matrix();
}

double exploration_scale(double decay, long long step) {
  return std::pow(decay, static_cast<double>(step));
}

void run_stage(StageContext& ctx, TrainState& st, const AgentHyper& h, int first_episode,
               int episodes, std::uint64_t seed, std::vector<CurveRow>& curve) {
  Environment& env = *ctx.env;
  const Eigen::Index dim = ctx.learner ? ctx.learner->action_dim() : ctx.random_dim;
  const bool can_learn = ctx.learner && h.grad_steps > 0;
  for (int e = first_episode; e < first_episode + episodes; ++e) {
    Eigen::VectorXd s = env.reset(mix_seed(seed, static_cast<std::uint64_t>(e)));
    CurveRow row;
    row.episode = e;
    int updates = 0;
    const int H = env.episode_length();
    for (int t = 0; t < H; ++t) {
      Eigen::VectorXd a(dim);
      if (can_learn && st.env_steps >= static_cast<long long>(h.warmup)) {
        a = ctx.learner->explore(s, st.env_steps, st.act_rng);
      } else {
        for (Eigen::Index i = 0; i < dim; ++i) a[i] = st.act_rng.uniform(-1.0, 1.0);
      }
      const Eigen::VectorXd full = ctx.compose ? ctx.compose(s, a) : a;
      StepOutcome out = env.step(full);
      if (st.memory) st.memory->push(s, a, out.reward, out.next_state);
      ++st.env_steps;
      row.mean_reward += out.reward;
      row.mean_ee += out.info.ee;
      row.admitted += out.info.admitted_count();

      if (can_learn && st.env_steps >= static_cast<long long>(h.warmup) &&
          st.memory->size() >= h.batch) {
        for (int g = 0; g < h.grad_steps; ++g) {
          const Batch b = st.memory->sample(h.batch, st.sample_rng);
          const UpdateStats u = ctx.learner->update(b, st.sample_rng);
          if (!std::isfinite(u.critic_loss) || u.critic_loss > h.divergence_limit ||
              !std::isfinite(u.actor_loss))
            throw DivergenceError("critic loss " + format_double(u.critic_loss) +
                                  " exceeded the divergence limit in episode " +
                                  std::to_string(e));
          row.critic_loss += u.critic_loss;
          row.actor_loss += u.actor_loss;
          ++updates;
        }
      }
      s = std::move(out.next_state);
    }
    row.mean_reward /= H;
    row.mean_ee /= H;
    row.admitted /= H;
    if (updates > 0) {
      row.critic_loss /= updates;
      row.actor_loss /= updates;
    }
    curve.push_back(row);
  }
}

EvalSummary evaluate_policy(Environment& env,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& policy,
                            int episodes) {
  EvalSummary out;
  long long steps = 0;
  for (int i = 0; i < episodes; ++i) {
    Eigen::VectorXd s = env.reset(mix_seed(kEvalSeed, static_cast<std::uint64_t>(i)));
    for (int t = 0; t < env.episode_length(); ++t) {
      StepOutcome o = env.step(policy(s));
      out.mean_ee += o.info.ee;
      out.mean_reward += o.reward;
      out.mean_admitted += o.info.admitted_count();
      ++steps;
      s = std::move(o.next_state);
    }
  }
  if (steps > 0) {
    out.mean_ee /= static_cast<double>(steps);
    out.mean_reward /= static_cast<double>(steps);
    out.mean_admitted /= static_cast<double>(steps);
  }
  return out;
}

TrainState make_train_state(const AgentHyper& h, Eigen::Index state_dim, Eigen::Index action_dim,
                            std::uint64_t seed, bool with_memory) {
  TrainState st;
  if (with_memory) st.memory = std::make_unique<ReplayMemory>(h.capacity, state_dim, action_dim);
  st.act_rng = Rng(mix_seed(seed, kActStream));
  st.sample_rng = Rng(mix_seed(seed, kSampleStream));
  return st;
}

TrainResult random_train(Environment& env, const AgentHyper& h, int episodes, std::uint64_t seed) {
  TrainResult res;
  TrainState st = make_train_state(h, 0, 0, seed, false);
  StageContext ctx;
  ctx.env = &env;
  ctx.random_dim = static_cast<Eigen::Index>(env.action_size());
  run_stage(ctx, st, h, 0, episodes, seed, res.curve);
  Rng eval_rng(mix_seed(seed, kActStream + 1));
  const Eigen::Index A = ctx.random_dim;
  res.final_eval = evaluate_policy(
      env,
      [&](const Eigen::VectorXd&) {
        Eigen::VectorXd a(A);
        for (Eigen::Index i = 0; i < A; ++i) a[i] = eval_rng.uniform(-1.0, 1.0);
        return a;
      },
      h.eval_episodes);
  return res;
}

TrainResult train(Method m, Environment& env, const AgentHyper& h, int episodes,
                  std::uint64_t seed) {
  switch (m) {
    case Method::sac: return sac_train(env, h, episodes, seed);
    case Method::ddpg: return ddpg_train(env, h, episodes, seed);
    case Method::maddpg: return maddpg_train(env, h, episodes, seed);
    case Method::disjoint: return disjoint_train(env, h, episodes, seed);
    case Method::random: return random_train(env, h, episodes, seed);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace jrsim
