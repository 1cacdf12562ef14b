#include "jrsim/agents.hpp"

#include <cmath>

namespace jrsim {

namespace {
constexpr std::uint64_t kRadioInit = 0xD1501;
constexpr std::uint64_t kCoreInit = 0xD1502;
constexpr std::uint64_t kCoreStage = 0xD15C0;

struct RestoreOptions {
  Environment& env;
  EvalOptions saved;
  ~RestoreOptions() { env.set_options(saved); }
};
}  // namespace

TrainResult disjoint_train(Environment& env, const AgentHyper& h, int episodes,
                           std::uint64_t seed) {
  const EvalOptions saved = env.options();
  RestoreOptions restore{env, saved};
  const auto S = static_cast<Eigen::Index>(env.state_size());
  const auto R = static_cast<Eigen::Index>(env.layout().radio_size());
  const auto C = static_cast<Eigen::Index>(env.layout().core_size());
  const int radio_episodes =
      std::clamp(static_cast<int>(std::lround(episodes * h.disjoint_stage1_share)), 0, episodes);
  TrainResult res;

  EvalOptions opt = saved;
  opt.radio_delay = h.disjoint_radio_delay;

  // Stage 1: radio allocation alone, rate over radio energy.
  opt.mode = ObjectiveMode::radio_only;
  env.set_options(opt);
  Rng radio_init(mix_seed(seed, kRadioInit));
  SacLearner radio(S, R, h, radio_init);
  TrainState st1 = make_train_state(h, S, R, seed);
  StageContext c1;
  c1.env = &env;
  c1.learner = &radio;
  c1.compose = [C](const Eigen::VectorXd&, const Eigen::VectorXd& a) {
    Eigen::VectorXd full(a.size() + C);
    full << a, Eigen::VectorXd::Zero(C);
    return full;
  };
  run_stage(c1, st1, h, 0, radio_episodes, seed, res.curve);

  // Stage 2: placement against CPU energy with the stage-1 radio decisions fixed.
  opt.mode = ObjectiveMode::core_only;
  env.set_options(opt);
  Rng core_init(mix_seed(seed, kCoreInit));
  SacLearner core(S, C, h, core_init);
  TrainState st2 = make_train_state(h, S, C, mix_seed(seed, kCoreStage));
  StageContext c2;
  c2.env = &env;
  c2.learner = &core;
  const auto joint_action = [&](const Eigen::VectorXd& s, const Eigen::VectorXd& core_a) {
    Eigen::VectorXd full(R + C);
    full << radio.greedy(s), core_a;
    return full;
  };
  c2.compose = joint_action;
  run_stage(c2, st2, h, radio_episodes, episodes - radio_episodes, seed, res.curve);

  opt.mode = ObjectiveMode::joint;
  env.set_options(opt);
  res.final_eval = evaluate_policy(
      env, [&](const Eigen::VectorXd& s) { return joint_action(s, core.greedy(s)); },
      h.eval_episodes);

  for (auto& [name, net] : radio.networks()) res.networks.emplace_back("radio_" + name, net);
  for (auto& [name, net] : core.networks()) res.networks.emplace_back("core_" + name, net);
  return res;
}

}  // namespace jrsim
