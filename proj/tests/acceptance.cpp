// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jrsim/agents.hpp"
#include "jrsim/env.hpp"
#include "jrsim/experiments.hpp"
#include "jrsim/mlp.hpp"
#include "jrsim/nfv.hpp"
#include "jrsim/oracle.hpp"
#include "jrsim/presets.hpp"

using namespace jrsim;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

const std::vector<std::uint64_t> kSeeds{0, 1, 2, 3, 4};
constexpr int kEpisodes = 200;

Verdict oracle_equivalence() {
  const auto inst = TinyInstance::reference();
  const ChannelState ch = sample_channel(inst.cfg, 3);
  const VerifyReport rep = verify_env(inst, ch, 1000, 3, environment_reward, 1e-9);
  return {rep.samples == 1000 && rep.mismatches.empty(),
          std::to_string(rep.mismatches.size()) + " mismatches in " + std::to_string(rep.samples) +
              " samples, max rel error " + fmt(rep.max_rel_error)};
}

Verdict gradient_check() {
  double worst = 0.0;
  for (const std::vector<int>& sizes : {std::vector<int>{4, 8, 2}, std::vector<int>{6, 16, 16, 3}})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const Mlp net = Mlp::glorot(sizes, rng);
      Eigen::VectorXd x(sizes.front()), up(sizes.back());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.5, 1.5);
      for (Eigen::Index i = 0; i < up.size(); ++i) up[i] = rng.uniform(-1.0, 1.0);
      worst = std::max(worst, gradcheck(net, x, up).max_rel_error);
    }
  return {worst < 1e-4, "max rel error " + fmt(worst) + " over 40 networks"};
}

Placement random_capable_placement(const NetworkConfig& cfg, Rng& rng) {
  Placement pl = Placement::empty_for(cfg);
  for (int u = 0; u < cfg.num_users; ++u) {
    if (rng.uniform() >= 0.8) continue;
    const auto& chain = cfg.service_of(u).chain;
    for (int m = 0; m < static_cast<int>(chain.size()); ++m) {
      std::vector<int> capable;
      for (int v = 0; v < cfg.num_vms(); ++v)
        if (cfg.vm_capable(v, chain[m])) capable.push_back(v);
      const int vm = capable[rng.below(capable.size())];
      pl.bind(u, m, {cfg.vms[vm].host_server, vm});
    }
  }
  return pl;
}

Verdict scheduling_invariants() {
  // Builtin topology with room for any placement, so every sample is C4-C6 feasible.
  NetworkConfig cfg = builtin_config();
  for (auto& s : cfg.servers) {
    s.cpu_capacity = 1e12;
    s.storage_capacity = 1e12;
  }
  Rng rng(31);
  int feasible = 0, attempts = 0, bad_verify = 0, overlaps = 0, precedence = 0, delay_diff = 0;
  while (feasible < 10000 && attempts < 1000000) {
    ++attempts;
    const Placement pl = random_capable_placement(cfg, rng);
    if (!check_c4(pl, cfg) || !check_c5(pl, cfg) || !check_c6(pl, cfg)) continue;
    ++feasible;
    const Schedule sch = build_schedule(pl, cfg);
    if (!verify_schedule(sch, pl, cfg)) ++bad_verify;

    std::map<int, std::vector<const ScheduleEntry*>> by_vm;
    std::map<std::pair<int, int>, const ScheduleEntry*> at;
    for (const auto& e : sch.entries) {
      by_vm[e.vm].push_back(&e);
      at[{e.user, e.position}] = &e;
    }
    for (auto& [vm, list] : by_vm) {
      std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->start < b->start; });
      for (std::size_t i = 1; i < list.size(); ++i)
        if (list[i]->start < list[i - 1]->finish()) ++overlaps;
    }
    std::vector<double> expect(static_cast<std::size_t>(cfg.num_users), 0.0);
    for (const auto& e : sch.entries) {
      double in = 0.0;
      if (e.position > 0) {
        const ScheduleEntry* prev = at.at({e.user, e.position - 1});
        if (prev->server != e.server)
          in = cfg.service_of(e.user).packet_bits /
               std::min(cfg.servers[prev->server].link_bandwidth, cfg.servers[e.server].link_bandwidth);
        if (e.start < prev->finish() + in) ++precedence;
      }
      expect[e.user] = std::max(expect[e.user], e.finish() + in);
    }
    const DelayReport rep = total_delay(sch, pl, cfg);
    for (int u = 0; u < cfg.num_users; ++u)
      if (rep.total[u] != expect[u]) ++delay_diff;
  }
  const bool ok = feasible == 10000 && bad_verify == 0 && overlaps == 0 && precedence == 0 &&
                  delay_diff == 0;
  return {ok, std::to_string(feasible) + " placements; verify failures " + std::to_string(bad_verify) +
                  ", overlaps " + std::to_string(overlaps) + ", precedence " +
                  std::to_string(precedence) + ", delay mismatches " + std::to_string(delay_diff)};
}

Verdict energy_accounting() {
  const NetworkConfig cfg = builtin_config();
  NetworkConfig padded = cfg;
  padded.servers.push_back(cfg.servers.front());  // a server hosting no VM
  const double lone_idle = padded.servers.back().power_idle_cpu * cfg.time_unit;
  Environment env(cfg);
  Rng rng(41);
  double worst_identity = 0.0, worst_idle = 0.0;
  int decisions = 0;
  for (std::uint64_t ep = 0; decisions < 1000; ++ep) {
    env.reset(ep);
    for (int t = 0; t < env.episode_length() && decisions < 1000; ++t, ++decisions) {
      Eigen::VectorXd a(static_cast<Eigen::Index>(env.action_size()));
      for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1.0, 1.0);
      const Evaluation info = env.step(a).info;
      std::vector<double> busy(static_cast<std::size_t>(cfg.num_servers()), 0.0);
      double active = 0.0;
      for (const auto& e : info.schedule.entries) {
        busy[e.server] += e.duration;
        active += cfg.servers[e.server].power_active_cpu * e.duration;
      }
      double idle = 0.0;
      for (int n = 0; n < cfg.num_servers(); ++n)
        idle += cfg.servers[n].power_idle_cpu * (cfg.time_unit - busy[n]);
      const double scale = std::max(1.0, active + idle);
      worst_identity = std::max(worst_identity, std::abs(info.energy.cpu - (active + idle)) / scale);
      const double extra =
          cpu_energy(info.schedule, padded).total() - cpu_energy(info.schedule, cfg).total();
      worst_idle = std::max(worst_idle, std::abs(extra - lone_idle) / scale);
    }
  }
  const CpuEnergy empty = cpu_energy(Schedule{}, padded);
  double all_idle = 0.0;
  for (const auto& s : padded.servers) all_idle += s.power_idle_cpu * cfg.time_unit;
  const bool ok = worst_identity <= 1e-12 && worst_idle <= 1e-12 && empty.active == 0.0 &&
                  empty.idle == all_idle;
  return {ok, "identity error " + fmt(worst_identity) + ", idle-server error " + fmt(worst_idle) +
                  " over " + std::to_string(decisions) + " decisions"};
}

struct MethodRuns {
  std::vector<double> tail_reward;
  std::vector<double> final_ee;
};

std::map<Method, MethodRuns> g_runs;

const MethodRuns& runs_for(Method m) {
  auto it = g_runs.find(m);
  if (it != g_runs.end()) return it->second;
  MethodRuns r;
  for (auto seed : kSeeds) {
    Environment env(tiny_config());
    const TrainResult res = train(m, env, AgentHyper{}, kEpisodes, seed);
    r.tail_reward.push_back(res.tail_reward(50));
    r.final_ee.push_back(res.final_eval.mean_ee);
  }
  return g_runs[m] = r;
}

Verdict learning_sanity() {
  const double sac = median(runs_for(Method::sac).tail_reward);
  const double rnd = median(runs_for(Method::random).tail_reward);
  return {sac >= 1.5 * rnd, "SAC median " + fmt(sac) + " vs random " + fmt(rnd) + " (ratio " +
                                fmt(rnd != 0.0 ? sac / rnd : 0.0) + ")"};
}

Verdict joint_vs_disjoint() {
  const double sac = median(runs_for(Method::sac).final_ee);
  const double ma = median(runs_for(Method::maddpg).final_ee);
  const double dis = median(runs_for(Method::disjoint).final_ee);
  return {sac >= ma && ma >= dis && sac >= 1.2 * dis,
          "median EE SAC " + fmt(sac) + ", MA-DDPG " + fmt(ma) + ", disjoint " + fmt(dis)};
}

std::vector<std::pair<double, double>> sac_sweep(const std::string& variable,
                                                 const std::vector<double>& values) {
  SweepSpec spec{variable, values, {Method::sac}, kSeeds, kEpisodes};
  const auto rows = run_sweep(spec, tiny_config(), AgentHyper{}, omp_get_max_threads());
  return median_ee_by_value(rows, Method::sac);
}

double rho(const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> x, y;
  for (const auto& [v, ee] : pts) {
    x.push_back(v);
    y.push_back(ee);
  }
  return spearman(x, y);
}

std::string list(const std::vector<std::pair<double, double>>& pts) {
  std::string s;
  for (const auto& [v, ee] : pts) s += (s.empty() ? "" : " ") + fmt(v) + ":" + fmt(ee);
  return s;
}

Verdict trends() {
  // The rate floor spans the unconstrained operating point (about 20 bits/s/Hz on the
  // tiny preset); users 6 and 8 are 75% and full load, both past radio saturation.
  const auto rate = sac_sweep("rate_min", {1.0, 10.0, 20.0, 30.0});
  const auto lat = sac_sweep("latency_max", {0.05, 0.1, 0.5});
  const auto users = sac_sweep("num_users", {2, 4, 6, 8});
  const double r_rate = rho(rate), r_lat = rho(lat);
  const bool full = rate.size() == 4 && lat.size() == 3 && users.size() == 4;
  const double at75 = full ? users[2].second : 0.0, sat = full ? users[3].second : 0.0;
  const bool plateau = full && at75 > 0.0 && std::abs(sat - at75) <= 0.15 * at75;
  return {full && r_rate <= 0.0 && r_lat >= 0.0 && plateau,
          "rate_min rho " + fmt(r_rate) + " [" + list(rate) + "]; latency_max rho " + fmt(r_lat) +
              " [" + list(lat) + "]; users [" + list(users) + "]"};
}

Verdict signaling_overhead_exact() {
  const Overhead sac = signaling_overhead(10, 4, 20, Method::sac);
  const Overhead ddpg = signaling_overhead(10, 4, 20, Method::ddpg);
  const Overhead ma = signaling_overhead(10, 4, 20, Method::maddpg);
  const bool ok = sac.radio_link == 12800 && sac.core_link == 12800 && ddpg.radio_link == 12800 &&
                  ddpg.core_link == 12800 && ma.radio_link == 16 && ma.core_link == 16;
  return {ok, "SAC/DDPG " + std::to_string(sac.radio_link) + " bits per link, MA-DDPG " +
                  std::to_string(ma.radio_link) + " bits per agent"};
}

Verdict catalog_fidelity() {
  const auto [vnfs, services] = builtin_catalog();
  const std::vector<VnfSpec> want_vnfs = {{"NAT", 0.00092}, {"FW", 0.0009},   {"TM", 0.0133},
                                          {"WOC", 0.0054},  {"IDPS", 0.0107}, {"VOC", 0.0054}};
  struct Sfc {
    std::string name;
    std::vector<std::string> chain;
    double latency, bandwidth;
  };
  const std::vector<Sfc> want = {
      {"WebService", {"NAT", "FW", "TM", "WOC", "IDPS"}, 0.5, 100e3},
      {"VoIP", {"NAT", "FW", "TM", "FW", "NAT"}, 0.1, 64e3},
      {"VideoStreaming", {"NAT", "FW", "TM", "VOC", "IDPS"}, 0.1, 4e6},
  };
  int wrong = 0;
  if (vnfs != want_vnfs) ++wrong;
  if (services.size() != want.size()) ++wrong;
  for (std::size_t i = 0; i < std::min(services.size(), want.size()); ++i) {
    const auto& s = services[i];
    if (s.name != want[i].name || s.chain != want[i].chain || s.latency_max != want[i].latency ||
        s.packet_bits != want[i].bandwidth)
      ++wrong;
  }
  return {wrong == 0, std::to_string(vnfs.size()) + " VNFs, " + std::to_string(services.size()) +
                          " SFCs, " + std::to_string(wrong) + " discrepancies"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"gradient verification", gradient_check},
      {"scheduling invariants", scheduling_invariants},
      {"energy accounting", energy_accounting},
      {"learning sanity", learning_sanity},
      {"joint vs disjoint ordering", joint_vs_disjoint},
      {"trend reproduction", trends},
      {"signaling overhead exactness", signaling_overhead_exact},
      {"catalog fidelity", catalog_fidelity},
  };
  // Optional arguments pick criteria by number; default is all of them.
  std::vector<std::size_t> pick;
  for (int a = 1; a < argc; ++a) pick.push_back(std::stoul(argv[a]) - 1);
  if (pick.empty())
    for (std::size_t i = 0; i < criteria.size(); ++i) pick.push_back(i);
  int failed = 0;
  for (std::size_t i : pick) {
    if (i >= criteria.size()) {
      std::printf("FAIL %zu unknown criterion\n", i + 1);
      ++failed;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s %zu %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", pick.size() - failed, pick.size());
  return failed == 0 ? 0 : 1;
}
