#include "jrsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "jrsim/presets.hpp"
#include "jrsim/rng.hpp"

namespace jrsim {

TinyInstance TinyInstance::reference() { return {tiny_config(), {0.0, 0.25, 0.5, 0.75, 1.0}}; }

void check_tiny(const TinyInstance& inst) {
  const auto& c = inst.cfg;
  auto fail = [](const std::string& what) { throw OracleError("not a tiny instance: " + what); };
  if (c.num_bs > 2) fail("more than 2 BSs");
  if (c.num_users > 3) fail("more than 3 users");
  if (c.num_subcarriers > 3) fail("more than 3 subcarriers");
  if (c.num_servers() > 2) fail("more than 2 servers");
  std::vector<int> per_server(static_cast<std::size_t>(c.num_servers()), 0);
  for (const auto& vm : c.vms)
    if (++per_server[vm.host_server] > 2) fail("more than 2 VMs on a server");
  for (const auto& s : c.services)
    if (s.chain.size() > 3) fail("chain longer than 3");
  if (inst.power_levels.empty()) fail("empty power grid");
  for (double l : inst.power_levels)
    if (l < 0.0 || l > 1.0) fail("power level outside [0, 1]");
}

namespace {

std::vector<int> served_users(const NetworkConfig& c, int j) {
  std::vector<int> out;
  for (int u = 0; u < c.num_users; ++u)
    if (c.user_requests[u].bs == j) out.push_back(u);
  return out;
}

std::vector<int> capable_vms(const NetworkConfig& c, const std::string& f) {
  std::vector<int> out;
  for (int v = 0; v < c.num_vms(); ++v) {
    const auto& cap = c.vms[v].capability;
    if (std::find(cap.begin(), cap.end(), f) != cap.end()) out.push_back(v);
  }
  return out;
}

/// Radix of every digit, radio digits first.
std::vector<std::uint64_t> radices(const TinyInstance& inst) {
  const auto& c = inst.cfg;
  std::vector<std::uint64_t> r;
  for (int j = 0; j < c.num_bs; ++j)
    for (int k = 0; k < c.num_subcarriers; ++k)
      r.push_back(1 + served_users(c, j).size() * inst.power_levels.size());
  for (int u = 0; u < c.num_users; ++u)
    for (const auto& f : c.service_of(u).chain)
      r.push_back(std::max<std::uint64_t>(1, capable_vms(c, f).size()));
  return r;
}

}  // namespace

std::uint64_t enumeration_size(const TinyInstance& inst) {
  std::uint64_t n = 1;
  for (auto r : radices(inst)) {
    if (n > std::numeric_limits<std::uint64_t>::max() / r) return std::numeric_limits<std::uint64_t>::max();
    n *= r;
  }
  return n;
}

GridDecision decode_grid(const TinyInstance& inst, std::uint64_t idx) {
  const auto& c = inst.cfg;
  const auto rad = radices(inst);
  std::vector<std::uint64_t> digit(rad.size());
  for (std::size_t i = rad.size(); i-- > 0;) {
    digit[i] = idx % rad[i];
    idx /= rad[i];
  }
  GridDecision g;
  const std::size_t L = inst.power_levels.size();
  std::size_t d = 0;
  for (int j = 0; j < c.num_bs; ++j) {
    const auto users = served_users(c, j);
    for (int k = 0; k < c.num_subcarriers; ++k, ++d) {
      if (digit[d] == 0) {
        g.sc_user.push_back(-1);
        g.sc_level.push_back(0);
      } else {
        g.sc_user.push_back(users[(digit[d] - 1) / L]);
        g.sc_level.push_back(static_cast<int>((digit[d] - 1) % L));
      }
    }
  }
  g.vm.resize(static_cast<std::size_t>(c.num_users));
  for (int u = 0; u < c.num_users; ++u)
    for (const auto& f : c.service_of(u).chain) {
      const auto vms = capable_vms(c, f);
      g.vm[u].push_back(vms.empty() ? -1 : vms[digit[d]]);
      ++d;
    }
  return g;
}

GridDecision random_grid(const TinyInstance& inst, Rng& rng) {
  const auto rad = radices(inst);
  std::uint64_t idx = 0;
  for (auto r : rad) idx = idx * r + rng.below(r);
  return decode_grid(inst, idx);
}

bool grid_power_ok(const TinyInstance& inst, const GridDecision& g) {
  const auto& c = inst.cfg;
  for (int j = 0; j < c.num_bs; ++j) {
    double sum = 0.0;
    for (int k = 0; k < c.num_subcarriers; ++k) {
      const std::size_t jk = static_cast<std::size_t>(j * c.num_subcarriers + k);
      if (g.sc_user[jk] >= 0) sum += inst.power_levels[g.sc_level[jk]] * c.max_power_per_bs;
    }
    if (sum > c.max_power_per_bs) return false;
  }
  return true;
}

AllocationDecision to_allocation(const TinyInstance& inst, const GridDecision& g) {
  const auto& c = inst.cfg;
  AllocationDecision d{RadioAction::zeros(RadioDims::of(c)), Placement::empty_for(c)};
  for (int j = 0; j < c.num_bs; ++j)
    for (int k = 0; k < c.num_subcarriers; ++k) {
      const std::size_t jk = static_cast<std::size_t>(j * c.num_subcarriers + k);
      const int u = g.sc_user[jk];
      if (u < 0) continue;
      const std::size_t idx = d.radio.dims.index(u, j, k);
      d.radio.rho[idx] = 1;
      d.radio.power[idx] = inst.power_levels[g.sc_level[jk]] * c.max_power_per_bs;
    }
  for (int u = 0; u < c.num_users; ++u)
    for (std::size_t m = 0; m < g.vm[u].size(); ++m)
      if (const int v = g.vm[u][m]; v >= 0)
        d.placement.bind(u, static_cast<int>(m), {c.vms[v].host_server, v});
  return d;
}

OracleValue oracle_evaluate(const NetworkConfig& c, const ChannelState& ch, const GridDecision& g,
                            const std::vector<double>& power_levels) {
  const int J = c.num_bs, K = c.num_subcarriers, U = c.num_users;
  const int N = c.num_servers(), V = c.num_vms();
  const double n0 = std::pow(10.0, c.noise_dbm / 10.0) / 1000.0 * c.subcarrier_bandwidth;

  std::vector<int> who = g.sc_user;
  std::vector<double> pw(who.size(), 0.0);
  for (std::size_t jk = 0; jk < who.size(); ++jk)
    if (who[jk] >= 0) pw[jk] = power_levels[g.sc_level[jk]] * c.max_power_per_bs;

  struct Nf {
    int vm, server;
    double dur;
  };
  std::vector<std::vector<Nf>> chain(static_cast<std::size_t>(U));
  std::vector<double> bits(static_cast<std::size_t>(U));
  std::vector<bool> complete(static_cast<std::size_t>(U), true);
  for (int u = 0; u < U; ++u) {
    const ServiceSpec* svc = nullptr;
    for (const auto& s : c.services)
      if (s.name == c.user_requests[u].service) svc = &s;
    bits[u] = svc->packet_bits;
    for (std::size_t m = 0; m < svc->chain.size(); ++m) {
      double pi = 0.0;
      for (const auto& f : c.vnf_catalog)
        if (f.name == svc->chain[m]) pi = f.pi_user;
      const int v = g.vm[u][m];
      if (v < 0) complete[u] = false;
      chain[u].push_back({v, v < 0 ? -1 : c.vms[v].host_server, bits[u] / (c.q_base / pi)});
    }
  }
  auto hop = [&](int u, int a, int b) {
    if (a == b) return 0.0;
    return bits[u] / std::min(c.servers[a].link_bandwidth, c.servers[b].link_bandwidth);
  };
  auto service_of = [&](int u) -> const ServiceSpec& {
    for (const auto& s : c.services)
      if (s.name == c.user_requests[u].service) return s;
    throw OracleError("unknown service");
  };

  std::vector<bool> alive(static_cast<std::size_t>(U), true);
  std::vector<double> rate, delay, busy;
  std::vector<std::vector<double>> starts;
  int dropped = 0;
  while (true) {
    rate.assign(static_cast<std::size_t>(U), 0.0);
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) {
        const int u = who[static_cast<std::size_t>(j * K + k)];
        const double p = pw[static_cast<std::size_t>(j * K + k)];
        if (u < 0 || p == 0.0) continue;
        double interf = 0.0;
        for (int j2 = 0; j2 < J; ++j2)
          if (j2 != j) interf += ch.gains[(static_cast<std::size_t>(u) * J + j2) * K + k] *
                                 pw[static_cast<std::size_t>(j2 * K + k)];
        const double signal = p * ch.gains[(static_cast<std::size_t>(u) * J + j) * K + k];
        rate[u] += std::log2(1.0 + signal / (n0 + interf));
      }

    // Earliest-ready-first list schedule over complete, admitted chains.
    delay.assign(static_cast<std::size_t>(U), 0.0);
    busy.assign(static_cast<std::size_t>(N), 0.0);
    std::vector<double> free_at(static_cast<std::size_t>(V), 0.0);
    std::vector<int> pos(static_cast<std::size_t>(U), 0);
    std::vector<double> ready(static_cast<std::size_t>(U), 0.0);
    for (;;) {
      int pick = -1;
      for (int u = 0; u < U; ++u) {
        if (!alive[u] || !complete[u] || pos[u] >= static_cast<int>(chain[u].size())) continue;
        if (pick < 0 || ready[u] < ready[pick]) pick = u;
      }
      if (pick < 0) break;
      const int m = pos[pick];
      const Nf& nf = chain[pick][static_cast<std::size_t>(m)];
      const double t0 = std::max(ready[pick], free_at[nf.vm]);
      const double t1 = t0 + nf.dur;
      free_at[nf.vm] = t1;
      busy[nf.server] += nf.dur;
      const double in = m > 0 ? hop(pick, chain[pick][m - 1].server, nf.server) : 0.0;
      delay[pick] = std::max(delay[pick], t1 + in);
      ++pos[pick];
      if (pos[pick] < static_cast<int>(chain[pick].size()))
        ready[pick] = t1 + hop(pick, nf.server, chain[pick][m + 1].server);
    }

    std::vector<double> cpu(static_cast<std::size_t>(N), 0.0), store(static_cast<std::size_t>(N), 0.0);
    std::vector<int> hosted(static_cast<std::size_t>(V), 0);
    for (int u = 0; u < U; ++u) {
      if (!alive[u]) continue;
      const auto& svc = service_of(u);
      const double psi = c.nf_storage >= 0.0 ? c.nf_storage : bits[u] / 8.0;
      for (std::size_t m = 0; m < chain[u].size(); ++m) {
        const Nf& nf = chain[u][m];
        if (nf.vm < 0) continue;
        double pi = 0.0;
        for (const auto& f : c.vnf_catalog)
          if (f.name == svc.chain[m]) pi = f.pi_user;
        const double per_bit = c.c5_mode == C5Mode::literal ? c.q_base / pi : pi;
        cpu[nf.server] += bits[u] * per_bit + c.vms[nf.vm].cpu_overhead;
        store[nf.server] += psi + bits[u] / 8.0 + c.vms[nf.vm].storage_overhead;
        ++hosted[nf.vm];
      }
    }

    std::vector<int> bad;
    for (int u = 0; u < U; ++u) {
      if (!alive[u]) continue;
      const auto& svc = service_of(u);
      bool b = !complete[u] || rate[u] < svc.rate_min || delay[u] > svc.latency_max;
      for (const auto& nf : chain[u]) {
        if (nf.vm < 0) continue;
        const auto& sv = c.servers[nf.server];
        if (cpu[nf.server] > sv.cpu_capacity || store[nf.server] > sv.storage_capacity ||
            busy[nf.server] > c.time_unit || hosted[nf.vm] > c.max_nfs_per_vm)
          b = true;
      }
      if (b) bad.push_back(u);
    }
    if (bad.empty()) break;

    int victim = -1;
    double lowest = 0.0;
    for (int u : bad) {
      double tx = 0.0, act = 0.0;
      for (std::size_t jk = 0; jk < who.size(); ++jk)
        if (who[jk] == u) tx += pw[jk];
      for (const auto& nf : chain[u])
        if (nf.vm >= 0) act += c.servers[nf.server].power_active_cpu * nf.dur;
      const double den = c.mu1 * c.time_unit * tx + c.mu2 * act;
      const double share =
          den > 0.0 ? rate[u] / den : (rate[u] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (victim < 0 || share < lowest) {
        victim = u;
        lowest = share;
      }
    }
    alive[victim] = false;
    ++dropped;
    for (std::size_t jk = 0; jk < who.size(); ++jk)
      if (who[jk] == victim) {
        who[jk] = -1;
        pw[jk] = 0.0;
      }
  }

  OracleValue out;
  out.admitted = alive;
  for (int u = 0; u < U; ++u)
    if (alive[u]) out.sum_rate += rate[u];
  double tx = 0.0;
  for (double p : pw) tx += p;
  out.radio_energy = c.time_unit * (tx + J * c.circuit_power_per_bs);
  double active = 0.0, idle = 0.0;
  for (int u = 0; u < U; ++u)
    if (alive[u])
      for (const auto& nf : chain[u]) active += c.servers[nf.server].power_active_cpu * nf.dur;
  for (int n = 0; n < N; ++n) idle += c.servers[n].power_idle_cpu * (c.time_unit - busy[n]);
  out.cpu_energy = active + idle;
  const double psi_total = c.mu1 * out.radio_energy + c.mu2 * out.cpu_energy;
  out.ee = out.sum_rate == 0.0 ? 0.0 : out.sum_rate / psi_total;
  out.reward = c.reward_scale * out.ee - c.rejection_penalty * dropped;
  return out;
}

double environment_reward(const NetworkConfig& cfg, const ChannelState& ch,
                          const AllocationDecision& d) {
  return evaluate_decision(cfg, ch, d).reward;
}

std::string grid_to_json(const GridDecision& g) {
  nlohmann::json j;
  j["subcarrier_user"] = g.sc_user;
  j["power_level"] = g.sc_level;
  j["vm"] = g.vm;
  return j.dump();
}

std::uint64_t instance_digest(const TinyInstance& inst) {
  std::uint64_t h = config_digest(inst.cfg);
  return fnv1a(inst.power_levels.data(), inst.power_levels.size() * sizeof(double), h);
}

VerifyReport verify_env(const TinyInstance& inst, const ChannelState& ch, int samples,
                        std::uint64_t seed, const EnvEvaluator& env_eval, double rel_tol) {
  check_tiny(inst);
  VerifyReport rep;
  Rng rng(mix_seed(seed, 0x0E1F));
  while (rep.samples < samples) {
    const GridDecision g = random_grid(inst, rng);
    if (!grid_power_ok(inst, g)) continue;
    const double env_r = env_eval(inst.cfg, ch, to_allocation(inst, g));
    const double orc_r = oracle_evaluate(inst.cfg, ch, g, inst.power_levels).reward;
    const double scale = std::max(std::abs(env_r), std::abs(orc_r));
    const double err = scale == 0.0 ? 0.0 : std::abs(env_r - orc_r) / scale;
    rep.max_rel_error = std::max(rep.max_rel_error, err);
    if (!(err <= rel_tol)) rep.mismatches.push_back({rep.samples, env_r, orc_r, grid_to_json(g)});
    ++rep.samples;
  }
  return rep;
}

}  // namespace jrsim
