#include "jrsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "jrsim/rng.hpp"

namespace jrsim {

ActionLayout ActionLayout::of(const NetworkConfig& cfg) {
  ActionLayout l;
  l.dims = RadioDims::of(cfg);
  l.power_offset = 0;
  l.subcarrier_offset = l.dims.size();
  l.placement_offset = l.subcarrier_offset + static_cast<std::size_t>(cfg.num_bs) *
                                                 static_cast<std::size_t>(cfg.num_subcarriers) *
                                                 static_cast<std::size_t>(cfg.num_users + 1);
  std::size_t off = l.placement_offset;
  l.nf_offset.resize(static_cast<std::size_t>(cfg.num_users));
  l.nf_vms.resize(static_cast<std::size_t>(cfg.num_users));
  for (int u = 0; u < cfg.num_users; ++u) {
    const auto& chain = cfg.service_of(u).chain;
    for (const auto& f : chain) {
      std::vector<int> vms;
      for (int v = 0; v < cfg.num_vms(); ++v)
        if (cfg.vm_capable(v, f)) vms.push_back(v);
      l.nf_offset[u].push_back(off);
      off += vms.size();
      l.nf_vms[u].push_back(std::move(vms));
    }
  }
  l.total = off;
  return l;
}

AllocationDecision decode_action(const Eigen::VectorXd& a, const NetworkConfig& cfg,
                                 const ActionLayout& layout) {
  if (static_cast<std::size_t>(a.size()) != layout.size())
    throw std::invalid_argument("action length " + std::to_string(a.size()) + ", expected " +
                                std::to_string(layout.size()));
  const RadioDims d = layout.dims;
  AllocationDecision out{RadioAction::zeros(d), Placement::empty_for(cfg)};

  for (int j = 0; j < d.bss; ++j) {
    double weight_sum = 0.0;
    std::vector<std::size_t> links;
    for (int k = 0; k < d.subcarriers; ++k) {
      const std::size_t base = layout.subcarrier_block(j, k);
      int best = d.users;  // "off"
      double best_v = -std::numeric_limits<double>::infinity();
      for (int u = 0; u <= d.users; ++u) {
        if (u < d.users && cfg.user_requests[u].bs != j) continue;
        const double v = a[static_cast<Eigen::Index>(base + static_cast<std::size_t>(u))];
        if (v > best_v) {
          best_v = v;
          best = u;
        }
      }
      if (best == d.users) continue;
      const std::size_t idx = d.index(best, j, k);
      out.radio.rho[idx] = 1;
      const double w = std::max(a[static_cast<Eigen::Index>(layout.power_offset + idx)], 0.0);
      out.radio.power[idx] = w;
      weight_sum += w;
      links.push_back(idx);
    }
    // Sum in (u, k) order, the order check_c2 uses, so both see the same rounding.
    std::sort(links.begin(), links.end());
    double scale = cfg.max_power_per_bs / std::max(weight_sum, 1.0);
    auto apply = [&] {
      double sum = 0.0;
      for (auto idx : links) sum += out.radio.power[idx] * scale;
      return sum;
    };
    // Rounding can push the rescaled sum a few ulps over the budget.
    while (apply() > cfg.max_power_per_bs) scale = std::nextafter(scale, 0.0);
    for (auto idx : links) out.radio.power[idx] *= scale;
  }

  for (int u = 0; u < d.users; ++u) {
    for (std::size_t m = 0; m < layout.nf_vms[u].size(); ++m) {
      const auto& vms = layout.nf_vms[u][m];
      if (vms.empty()) continue;
      std::size_t best = 0;
      for (std::size_t i = 1; i < vms.size(); ++i)
        if (a[static_cast<Eigen::Index>(layout.nf_offset[u][m] + i)] >
            a[static_cast<Eigen::Index>(layout.nf_offset[u][m] + best)])
          best = i;
      const int vm = vms[best];
      out.placement.bind(u, static_cast<int>(m), {cfg.vms[vm].host_server, vm});
    }
  }
  return out;
}

int Evaluation::admitted_count() const {
  return static_cast<int>(std::count(admitted.begin(), admitted.end(), true));
}

double user_contribution(const NetworkConfig& cfg, const AllocationDecision& d,
                         const std::vector<double>& rates, int u) {
  double tx = 0.0;
  for (int j = 0; j < d.radio.dims.bss; ++j)
    for (int k = 0; k < d.radio.dims.subcarriers; ++k)
      if (d.radio.assigned(u, j, k)) tx += d.radio.p(u, j, k);
  double cpu = 0.0;
  for (int m = 0; m < d.placement.chain_length(u); ++m)
    if (const Binding* b = d.placement.binding(u, m))
      cpu += cfg.servers[b->server].power_active_cpu * nf_duration(cfg, u, m);
  const double denom = cfg.mu1 * cfg.time_unit * tx + cfg.mu2 * cpu;
  if (denom > 0.0) return rates[u] / denom;
  return rates[u] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

namespace {

void drop_user(AllocationDecision& d, int u) {
  const RadioDims& dims = d.radio.dims;
  for (int j = 0; j < dims.bss; ++j)
    for (int k = 0; k < dims.subcarriers; ++k) {
      const std::size_t idx = dims.index(u, j, k);
      d.radio.rho[idx] = 0;
      d.radio.power[idx] = 0.0;
    }
  d.placement.clear_user(u);
}

/// Admitted users whose current decision breaks one of the admission rules.
std::vector<int> violators(const NetworkConfig& cfg, const AllocationDecision& d,
                           const std::vector<bool>& admitted, const std::vector<double>& rates,
                           const DelayReport& delay, const std::vector<double>& busy) {
  const int U = cfg.num_users;
  std::vector<bool> bad(static_cast<std::size_t>(U), false);
  const auto& pl = d.placement;

  for (int u = 0; u < U; ++u) {
    if (!admitted[u]) continue;
    if (rates[u] < cfg.service_of(u).rate_min) bad[u] = true;
    for (int m = 0; m < pl.chain_length(u); ++m)
      if (!pl.binding(u, m)) bad[u] = true;
  }

  const auto cpu = server_cpu_load(pl, cfg);
  const auto storage = server_storage_load(pl, cfg);
  std::vector<int> vm_count(static_cast<std::size_t>(cfg.num_vms()), 0);
  for (int u = 0; u < U; ++u)
    for (int m = 0; m < pl.chain_length(u); ++m)
      if (const Binding* b = pl.binding(u, m)) ++vm_count[b->vm];
  for (int u = 0; u < U; ++u) {
    if (!admitted[u]) continue;
    for (int m = 0; m < pl.chain_length(u); ++m) {
      const Binding* b = pl.binding(u, m);
      if (!b) continue;
      const auto& srv = cfg.servers[b->server];
      if (cpu[b->server] > srv.cpu_capacity || storage[b->server] > srv.storage_capacity ||
          busy[b->server] > cfg.time_unit || vm_count[b->vm] > cfg.max_nfs_per_vm)
        bad[u] = true;
    }
  }
  for (int u : delay.violations)
    if (admitted[u]) bad[u] = true;

  std::vector<int> out;
  for (int u = 0; u < U; ++u)
    if (bad[u]) out.push_back(u);
  return out;
}

}  // namespace

Evaluation evaluate_decision(const NetworkConfig& cfg, const ChannelState& ch,
                             AllocationDecision decision, const EvalOptions& opt) {
  Evaluation ev;
  const int U = cfg.num_users;

  // Stage-one radio objective: every user's raw rate against radio energy.
  double radio_only_reward = 0.0;
  if (opt.mode == ObjectiveMode::radio_only) {
    const auto raw = user_rates(cfg, ch, decision.radio);
    double s = 0.0;
    for (double r : raw) s += r;
    const double e = cfg.mu1 * radio_energy(decision.radio, cfg.time_unit, cfg.circuit_power_per_bs);
    radio_only_reward = cfg.reward_scale * energy_efficiency(s, {e, 0.0, e});
  }

  ev.admitted.assign(static_cast<std::size_t>(U), true);
  while (true) {
    ev.rates = user_rates(cfg, ch, decision.radio);
    // Users with a partially placed chain are not schedulable; they stay in
    // the violator set until dropped.
    Placement schedulable = decision.placement;
    for (int u = 0; u < U; ++u)
      for (int m = 0; m < schedulable.chain_length(u); ++m)
        if (!schedulable.binding(u, m)) {
          schedulable.clear_user(u);
          break;
        }
    ev.schedule = build_schedule(schedulable, cfg, opt.policy);
    ev.delay = total_delay(ev.schedule, schedulable, cfg, opt.radio_delay);
    const auto busy = server_busy_time(ev.schedule, cfg);
    const auto bad = violators(cfg, decision, ev.admitted, ev.rates, ev.delay, busy);
    if (bad.empty()) break;
    int victim = bad.front();
    double worst = user_contribution(cfg, decision, ev.rates, victim);
    for (int u : bad) {
      const double c = user_contribution(cfg, decision, ev.rates, u);
      if (c < worst) {
        worst = c;
        victim = u;
      }
    }
    ev.admitted[victim] = false;
    ev.dropped.push_back(victim);
    drop_user(decision, victim);
  }

  for (int u = 0; u < U; ++u)
    if (ev.admitted[u]) ev.sum_rate += ev.rates[u];
  const double e_radio = radio_energy(decision.radio, cfg.time_unit, cfg.circuit_power_per_bs);
  const double e_cpu = cpu_energy(ev.schedule, cfg).total();
  ev.energy = total_energy(e_radio, e_cpu, cfg.mu1, cfg.mu2);
  ev.ee = energy_efficiency(ev.sum_rate, ev.energy);

  ev.flags.c1 = check_c1(decision.radio);
  ev.flags.c2 = check_c2(decision.radio, cfg);
  for (int u = 0; u < U; ++u)
    if (ev.admitted[u] && ev.rates[u] < cfg.service_of(u).rate_min) ev.flags.c3 = false;
  ev.flags.c4 = check_c4(decision.placement, cfg);
  ev.flags.c5 = check_c5(decision.placement, cfg);
  ev.flags.c6 = check_c6(decision.placement, cfg);
  ev.flags.c7 = verify_schedule(ev.schedule, decision.placement, cfg);
  ev.flags.c8 = ev.delay.violations.empty();
  if (!ev.flags.c7) throw std::logic_error("schedule failed independent verification");

  const double penalty = cfg.rejection_penalty * static_cast<double>(ev.dropped.size());
  switch (opt.mode) {
    case ObjectiveMode::joint:
      ev.reward = reward(ev.sum_rate, ev.energy, cfg.reward_scale) - penalty;
      break;
    case ObjectiveMode::radio_only:
      ev.reward = radio_only_reward;
      break;
    case ObjectiveMode::core_only: {
      const double e = cfg.mu2 * e_cpu;
      ev.reward = cfg.reward_scale * energy_efficiency(ev.sum_rate, {0.0, e_cpu, e}) - penalty;
      break;
    }
  }
  ev.decision = std::move(decision);
  return ev;
}

StateNormalizer StateNormalizer::fit(const NetworkConfig& cfg, int draws) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < draws; ++i) {
    const auto ch = sample_channel(cfg, mix_seed(0x6E6F726DULL, static_cast<std::uint64_t>(i)));
    for (double g : ch.gains) {
      const double x = std::log10(std::max(g, std::numeric_limits<double>::min()));
      sum += x;
      sq += x * x;
      ++n;
    }
  }
  StateNormalizer s;
  s.mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - s.mean * s.mean;
  s.scale = var > 0.0 ? std::sqrt(var) : 1.0;
  return s;
}

Eigen::VectorXd StateNormalizer::apply(const ChannelState& ch) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(ch.gains.size()));
  for (std::size_t i = 0; i < ch.gains.size(); ++i)
    s[static_cast<Eigen::Index>(i)] =
        (std::log10(std::max(ch.gains[i], std::numeric_limits<double>::min())) - mean) / scale;
  return s;
}

ChannelState episode_channel(const NetworkConfig& cfg, std::uint64_t seed, int t) {
  return sample_channel(cfg, mix_seed(seed, static_cast<std::uint64_t>(t)));
}

Environment::Environment(NetworkConfig cfg, EvalOptions opt)
    : cfg_(std::move(cfg)),
      opt_(opt),
      layout_(ActionLayout::of(cfg_)),
      norm_(StateNormalizer::fit(cfg_)) {
  reset(0);
}

Eigen::VectorXd Environment::reset(std::uint64_t seed) {
  seed_ = seed;
  t_ = 0;
  channel_ = episode_channel(cfg_, seed_, t_);
  state_ = norm_.apply(channel_);
  return state_;
}

StepOutcome Environment::step(const Eigen::VectorXd& action) {
  StepOutcome out;
  out.info = evaluate_decision(cfg_, channel_, decode_action(action, cfg_, layout_), opt_);
  out.reward = out.info.reward;

  if (trace_) {
    nlohmann::json rec;
    rec["t"] = t_;
    rec["state_digest"] = fnv1a(state_.data(), static_cast<std::size_t>(state_.size()) * sizeof(double));
    rec["reward"] = out.reward;
    rec["ee"] = out.info.ee;
    rec["admitted"] = out.info.admitted_count();
    rec["energy_radio"] = out.info.energy.radio;
    rec["energy_cpu"] = out.info.energy.cpu;
    rec["delays"] = out.info.delay.total;
    *trace_ << rec.dump() << '\n';
  }

  ++t_;
  out.done = t_ >= cfg_.episode_length;
  channel_ = episode_channel(cfg_, seed_, t_);
  state_ = norm_.apply(channel_);
  out.next_state = state_;
  return out;
}

}  // namespace jrsim
