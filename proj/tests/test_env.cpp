#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "jrsim/env.hpp"
#include "jrsim/presets.hpp"
#include "jrsim/rng.hpp"

using namespace jrsim;

namespace {

ChannelState flat_channel(const NetworkConfig& cfg, double g) {
  ChannelState ch;
  ch.dims = RadioDims::of(cfg);
  ch.gains.assign(ch.dims.size(), g);
  ch.user_positions.assign(static_cast<std::size_t>(cfg.num_users), Point{});
  return ch;
}

Eigen::VectorXd random_action(std::size_t n, Rng& rng) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1.0, 1.0);
  return a;
}

// Tiny layout: power [u0k0 u0k1 u1k0 u1k1] | subcarrier k0 [u0 u1 off], k1 [u0 u1 off]
// | placement (u0,m0) (u0,m1) (u1,m0) (u1,m1), four VM logits each.
constexpr int kSub0 = 4;
constexpr int kSub1 = 7;
int nf_slot(int u, int m) { return 10 + 4 * (2 * u + m); }

Eigen::VectorXd tiny_action() { return Eigen::VectorXd::Constant(26, -1.0); }

// CPU energy of a set of NF durations per server, both servers 20 W active / 10 W idle.
double cpu_energy_of(double busy0, double busy1) {
  return 20.0 * (busy0 + busy1) + 10.0 * (1.0 - busy0) + 10.0 * (1.0 - busy1);
}

}  // namespace

TEST_CASE("reset is deterministic with the documented state length") {
  Environment env(tiny_config());
  const auto s1 = env.reset(42);
  const auto s2 = env.reset(42);
  CHECK(s1 == s2);
  CHECK(s1.size() == 4);
  CHECK_FALSE(env.reset(43) == s1);

  Environment big(builtin_config());
  const auto s = big.reset(0);
  CHECK(static_cast<std::size_t>(s.size()) == big.config().num_users * 4u * 10u);
  CHECK(s.allFinite());
  CHECK(s.mean() >= -3.0);
  CHECK(s.mean() <= 3.0);
  CHECK(s.mean() == doctest::Approx(0.0).epsilon(0.5));
}

TEST_CASE("tiny action layout") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  CHECK(l.size() == 26);
  CHECK(l.radio_size() == 10);
  CHECK(l.core_size() == 16);
  CHECK(l.subcarrier_block(0, 0) == kSub0);
  CHECK(l.subcarrier_block(0, 1) == kSub1);
  for (int u = 0; u < 2; ++u)
    for (int m = 0; m < 2; ++m) {
      CHECK(l.nf_offset[u][m] == static_cast<std::size_t>(nf_slot(u, m)));
      CHECK(l.nf_vms[u][m] == std::vector<int>{0, 1, 2, 3});
    }
  CHECK_THROWS_AS(decode_action(Eigen::VectorXd::Zero(25), cfg, l), std::invalid_argument);
}

TEST_CASE("decode: equal logits break ties to the lowest index") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  const auto d = decode_action(Eigen::VectorXd::Constant(26, 0.3), cfg, l);
  CHECK(d.radio.assigned(0, 0, 0));
  CHECK(d.radio.assigned(0, 0, 1));
  CHECK_FALSE(d.radio.assigned(1, 0, 0));
  CHECK(d.radio.p(0, 0, 0) == doctest::Approx(0.3 * cfg.max_power_per_bs));
  for (int u = 0; u < 2; ++u)
    for (int m = 0; m < 2; ++m) CHECK(*d.placement.binding(u, m) == Binding{0, 0});
}

TEST_CASE("decode: off everywhere gives an empty radio action") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = Eigen::VectorXd::Constant(26, 0.9);
  a[kSub0 + 2] = 1.0;
  a[kSub1 + 2] = 1.0;
  const auto d = decode_action(a, cfg, l);
  for (auto r : d.radio.rho) CHECK(r == 0);
  for (double p : d.radio.power) CHECK(p == 0.0);
  CHECK(check_c1(d.radio));
  CHECK(check_c2(d.radio, cfg));
}

TEST_CASE("decode: hand-tabulated tiny vector") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = tiny_action();
  a[2] = 0.25;         // p(u1, k0) weight
  a[1] = 0.5;          // p(u0, k1) weight
  a[0] = 0.9;          // u0 not on k0, ignored
  a[kSub0 + 1] = 0.9;  // k0 -> u1
  a[kSub1 + 0] = 0.2;  // k1 -> u0
  a[nf_slot(0, 0) + 2] = 0.1;
  a[nf_slot(0, 1) + 3] = 0.1;
  a[nf_slot(1, 0) + 0] = 0.1;
  a[nf_slot(1, 1) + 1] = 0.1;
  const auto d = decode_action(a, cfg, l);
  CHECK(d.radio.rho == std::vector<std::uint8_t>{0, 1, 1, 0});
  CHECK(d.radio.power == std::vector<double>{0.0, 20.0, 10.0, 0.0});
  CHECK(*d.placement.binding(0, 0) == Binding{1, 2});
  CHECK(*d.placement.binding(0, 1) == Binding{1, 3});
  CHECK(*d.placement.binding(1, 0) == Binding{0, 0});
  CHECK(*d.placement.binding(1, 1) == Binding{0, 1});

  // Weights summing past one are rescaled onto the budget.
  a[1] = 0.8;
  a[2] = 0.6;
  const auto r = decode_action(a, cfg, l);
  CHECK(r.radio.power[1] == doctest::Approx(40.0 * 0.8 / 1.4).epsilon(1e-15));
  CHECK(r.radio.power[2] == doctest::Approx(40.0 * 0.6 / 1.4).epsilon(1e-15));
  CHECK(r.radio.power[1] + r.radio.power[2] <= 40.0);
}

TEST_CASE("admission: an all-feasible decision admits everyone") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = tiny_action();
  a[kSub0 + 0] = 1.0;
  a[kSub1 + 1] = 1.0;
  a[0] = 0.4;
  a[3] = 0.4;
  a[nf_slot(0, 0) + 0] = 1.0;
  a[nf_slot(0, 1) + 0] = 1.0;
  a[nf_slot(1, 0) + 2] = 1.0;
  a[nf_slot(1, 1) + 2] = 1.0;
  const auto ev = evaluate_decision(cfg, flat_channel(cfg, 1e-10), decode_action(a, cfg, l));
  CHECK(ev.admitted_count() == 2);
  CHECK(ev.dropped.empty());
  CHECK(ev.flags.all());
}

TEST_CASE("admission: a user below its rate floor is the only one dropped") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = tiny_action();
  a[kSub0 + 0] = 1.0;
  a[kSub1 + 1] = 1.0;
  a[0] = 0.4;
  a[3] = 0.4;
  a[nf_slot(0, 0) + 0] = 1.0;
  a[nf_slot(0, 1) + 0] = 1.0;
  a[nf_slot(1, 0) + 2] = 1.0;
  a[nf_slot(1, 1) + 2] = 1.0;
  auto ch = flat_channel(cfg, 1e-10);
  ch.gains[ch.dims.index(1, 0, 1)] = 1e-30;
  const auto ev = evaluate_decision(cfg, ch, decode_action(a, cfg, l));
  CHECK(ev.dropped == std::vector<int>{1});
  CHECK(ev.admitted == std::vector<bool>{true, false});
  CHECK(ev.decision.radio.power[3] == 0.0);
  CHECK_FALSE(ev.decision.placement.user_active(1));
}

TEST_CASE("admission: oversubscribing one server drops the smaller contribution first") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = tiny_action();
  a[kSub0 + 0] = 1.0;
  a[kSub1 + 1] = 1.0;
  a[0] = 0.4;
  a[3] = 0.4;
  for (int u = 0; u < 2; ++u)
    for (int m = 0; m < 2; ++m) a[nf_slot(u, m) + 1] = 1.0;  // everything on VM 1, server 0
  const auto d = decode_action(a, cfg, l);
  const auto ch = flat_channel(cfg, 1e-10);
  CHECK_FALSE(check_c5(d.placement, cfg));

  // Contributions by hand: equal rates and powers, so the heavier chain loses.
  const auto rates = user_rates(cfg, ch, d.radio);
  CHECK(rates[0] == rates[1]);
  const double cpu0 = 20.0 * (64e3 * 0.00092 / 1e4 + 64e3 * 0.0133 / 1e4);
  const double cpu1 = 20.0 * (100e3 * 0.0009 / 1e4 + 100e3 * 0.0107 / 1e4);
  CHECK(user_contribution(cfg, d, rates, 0) == doctest::Approx(rates[0] / (16.0 + cpu0)));
  CHECK(user_contribution(cfg, d, rates, 1) == doctest::Approx(rates[1] / (16.0 + cpu1)));

  const auto ev = evaluate_decision(cfg, ch, d);
  CHECK(ev.dropped == std::vector<int>{1});
  CHECK(ev.flags.c5);
}

TEST_CASE("step: hand-computed single-user reward") {
  const auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = tiny_action();
  a[kSub0 + 0] = 1.0;
  a[kSub1 + 0] = 1.0;
  a[0] = 0.25;
  a[1] = 0.5;
  a[nf_slot(0, 0) + 0] = 1.0;  // NAT on server 0
  a[nf_slot(0, 1) + 3] = 1.0;  // TM on server 1
  a[nf_slot(1, 0) + 0] = 1.0;
  a[nf_slot(1, 1) + 0] = 1.0;
  auto ch = flat_channel(cfg, 1e-12);
  ch.gains[ch.dims.index(0, 0, 1)] = 3e-12;
  const auto ev = evaluate_decision(cfg, ch, decode_action(a, cfg, l));

  const double noise = std::pow(10.0, -150.0 / 10.0) * 1e-3 * 20e3;
  const double rate = std::log2(1.0 + 10.0 * 1e-12 / noise) + std::log2(1.0 + 20.0 * 3e-12 / noise);
  const double nat = 64e3 * 0.00092 / 1e4;
  const double tm = 64e3 * 0.0133 / 1e4;
  const double e_radio = 30.0 + 0.5;
  const double e_cpu = cpu_energy_of(nat, tm);
  const double expect = 10.0 * rate / (e_radio + e_cpu);

  CHECK(ev.admitted == std::vector<bool>{true, false});
  CHECK(ev.sum_rate == doctest::Approx(rate).epsilon(1e-13));
  CHECK(ev.energy.radio == doctest::Approx(e_radio).epsilon(1e-13));
  CHECK(ev.energy.cpu == doctest::Approx(e_cpu).epsilon(1e-13));
  CHECK(ev.reward == doctest::Approx(expect).epsilon(1e-12));
  const double transfer = 64e3 / 1e7;
  CHECK(ev.delay.total[0] == doctest::Approx(nat + transfer + tm + transfer).epsilon(1e-13));
}

TEST_CASE("step: the zero action earns nothing") {
  Environment env(tiny_config());
  env.reset(3);
  const auto out = env.step(Eigen::VectorXd::Zero(26));
  CHECK(out.reward == 0.0);
  CHECK(out.info.sum_rate == 0.0);
  CHECK(out.info.admitted_count() == 0);
  CHECK(out.info.energy.total_weighted > 0.0);
}

TEST_CASE("step is deterministic and advances the episode") {
  Environment a(tiny_config()), b(tiny_config());
  Rng rng(4);
  const auto act = random_action(26, rng);
  a.reset(9);
  b.reset(9);
  const auto oa = a.step(act);
  const auto ob = b.step(act);
  CHECK(oa.reward == ob.reward);
  CHECK(oa.next_state == ob.next_state);
  CHECK(oa.info.decision == ob.info.decision);
  CHECK(a.time() == 1);
  CHECK_FALSE(oa.done);
  for (int t = 1; t < a.episode_length() - 1; ++t) CHECK_FALSE(a.step(act).done);
  CHECK(a.step(act).done);
}

TEST_CASE("trace writes one JSON record per step") {
  Environment env(tiny_config());
  std::stringstream ss;
  env.set_trace(&ss);
  env.reset(1);
  Rng rng(2);
  for (int t = 0; t < 3; ++t) env.step(random_action(26, rng));
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("t").get<int>() == n);
    CHECK(j.contains("state_digest"));
    CHECK(j.contains("reward"));
    CHECK(j.contains("admitted"));
    CHECK(j.at("delays").size() == 2);
    ++n;
  }
  CHECK(n == 3);
}

TEST_CASE("property: decoded actions satisfy C1, C2 and C4 by construction") {
  for (const auto& cfg : {tiny_config(), builtin_config()}) {
    const auto l = ActionLayout::of(cfg);
    Rng rng(100);
    for (int i = 0; i < 5000; ++i) {
      Eigen::VectorXd a = random_action(l.size(), rng);
      if (i % 7 == 0) a = a.array().sign();  // saturated corners
      const auto d = decode_action(a, cfg, l);
      CHECK(check_c1(d.radio));
      CHECK(check_c2(d.radio, cfg));
      CHECK(check_c4(d.placement, cfg));
      for (std::size_t k = 0; k < d.radio.power.size(); ++k)
        if (!d.radio.rho[k]) CHECK(d.radio.power[k] == 0.0);
    }
  }
}

TEST_CASE("property: admitted sets satisfy every constraint and reward recomputes exactly") {
  auto cfg = tiny_config();
  Environment env(cfg);
  Rng rng(7);
  env.reset(11);
  for (int i = 0; i < 3000; ++i) {
    if (i % cfg.episode_length == 0) env.reset(rng.next_u64());
    const auto out = env.step(random_action(env.action_size(), rng));
    const auto& ev = out.info;
    CHECK(ev.flags.all());
    double sum = 0.0;
    for (int u = 0; u < cfg.num_users; ++u) {
      if (!ev.admitted[u]) continue;
      sum += ev.rates[u];
      CHECK(ev.rates[u] >= cfg.service_of(u).rate_min);
    }
    CHECK(sum == ev.sum_rate);
    CHECK(out.reward == reward(sum, total_energy(ev.energy.radio, ev.energy.cpu, cfg.mu1, cfg.mu2),
                               cfg.reward_scale));
  }
}

TEST_CASE("property: admission is idempotent and never readmits a dropped user") {
  const auto cfg = builtin_config();
  const auto l = ActionLayout::of(cfg);
  Rng rng(19);
  for (int i = 0; i < 300; ++i) {
    const auto ch = sample_channel(cfg, rng.next_u64());
    const auto ev = evaluate_decision(cfg, ch, decode_action(random_action(l.size(), rng), cfg, l));
    for (int u : ev.dropped) CHECK_FALSE(ev.admitted[u]);
    CHECK(ev.admitted_count() + static_cast<int>(ev.dropped.size()) == cfg.num_users);
    const auto again = evaluate_decision(cfg, ch, ev.decision);
    for (int u = 0; u < cfg.num_users; ++u)
      if (ev.admitted[u]) CHECK(again.admitted[u]);
    CHECK(again.sum_rate == ev.sum_rate);
    CHECK(again.reward == ev.reward);
  }
}

TEST_CASE("objective modes") {
  auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Rng rng(21);
  const auto ch = sample_channel(cfg, 5);
  for (int i = 0; i < 200; ++i) {
    const auto d = decode_action(random_action(l.size(), rng), cfg, l);
    const auto joint = evaluate_decision(cfg, ch, d);
    const auto radio = evaluate_decision(cfg, ch, d, {ObjectiveMode::radio_only, 0.0, {}});
    const auto core = evaluate_decision(cfg, ch, d, {ObjectiveMode::core_only, 0.0, {}});
    CHECK(radio.ee == joint.ee);
    CHECK(core.ee == joint.ee);
    double raw = 0.0;
    for (double r : user_rates(cfg, ch, d.radio)) raw += r;
    const double e = radio_energy(d.radio, cfg.time_unit, cfg.circuit_power_per_bs);
    CHECK(radio.reward == doctest::Approx(raw > 0.0 ? cfg.reward_scale * raw / e : 0.0));
    CHECK(core.reward ==
          doctest::Approx(cfg.reward_scale * core.sum_rate / (cfg.mu2 * core.energy.cpu)));
  }
}

TEST_CASE("radio delay tightens deadlines") {
  auto cfg = tiny_config();
  const auto l = ActionLayout::of(cfg);
  Eigen::VectorXd a = tiny_action();
  a[kSub0 + 0] = 1.0;
  a[kSub1 + 0] = 1.0;
  a[0] = 0.5;
  a[1] = 0.5;
  a[nf_slot(0, 0) + 0] = 1.0;
  a[nf_slot(0, 1) + 0] = 1.0;
  const auto d = decode_action(a, cfg, l);
  const auto ch = flat_channel(cfg, 1e-10);
  // Chain NAT + TM on one VM takes about 0.091 s against a 0.105 s deadline.
  CHECK(evaluate_decision(cfg, ch, d, {ObjectiveMode::joint, 0.010, {}}).admitted[0]);
  CHECK_FALSE(evaluate_decision(cfg, ch, d, {ObjectiveMode::joint, 0.020, {}}).admitted[0]);
}
