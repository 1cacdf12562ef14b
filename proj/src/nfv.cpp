#include "jrsim/nfv.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>

namespace jrsim {

Placement Placement::empty_for(const NetworkConfig& cfg) {
  Placement pl;
  pl.assign.resize(static_cast<std::size_t>(cfg.num_users));
  for (int u = 0; u < cfg.num_users; ++u) pl.assign[u].resize(cfg.service_of(u).chain.size());
  return pl;
}

bool Placement::user_active(int u) const {
  for (const auto& b : assign[u])
    if (!b.empty()) return true;
  return false;
}

void Placement::clear_user(int u) {
  for (auto& b : assign[u]) b.clear();
}

double processing_delay(double packet_bits, double q_rate) {
  if (!(q_rate > 0.0)) throw std::domain_error("processing rate must be positive");
  if (packet_bits < 0.0) throw std::domain_error("packet size must be non-negative");
  return packet_bits / q_rate;
}

double nf_duration(const NetworkConfig& cfg, int u, int m) {
  const auto& svc = cfg.service_of(u);
  return processing_delay(svc.packet_bits, cfg.nf_rate(svc.chain[m]));
}

double transfer_time(const NetworkConfig& cfg, int u, int n_from, int n_to) {
  if (n_from == n_to) return 0.0;
  return cfg.service_of(u).packet_bits / cfg.link_bandwidth(n_from, n_to);
}

double nf_cpu_load(const NetworkConfig& cfg, int u, int m, int vm) {
  const auto& svc = cfg.service_of(u);
  const std::string& f = svc.chain[m];
  const double per_bit =
      cfg.c5_mode == C5Mode::literal ? cfg.nf_rate(f) : cfg.vnf(f).pi_user;
  return svc.packet_bits * per_bit + cfg.vms[vm].cpu_overhead;
}

double nf_storage_load(const NetworkConfig& cfg, int u, int m, int vm) {
  (void)m;
  const double y_bytes = cfg.service_of(u).packet_bits / 8.0;
  return (cfg.nf_storage_bytes(u) + y_bytes) + cfg.vms[vm].storage_overhead;
}

namespace {

template <typename F>
std::vector<double> per_server_sum(const Placement& pl, const NetworkConfig& cfg, F term) {
  std::vector<double> load(static_cast<std::size_t>(cfg.num_servers()), 0.0);
  for (int u = 0; u < pl.users(); ++u)
    for (int m = 0; m < pl.chain_length(u); ++m)
      for (const auto& b : pl.assign[u][m])
        if (cfg.vm_capable(b.vm, cfg.service_of(u).chain[m])) load[b.server] += term(u, m, b.vm);
  return load;
}

}  // namespace

std::vector<double> server_cpu_load(const Placement& pl, const NetworkConfig& cfg) {
  return per_server_sum(pl, cfg, [&](int u, int m, int vm) { return nf_cpu_load(cfg, u, m, vm); });
}

std::vector<double> server_storage_load(const Placement& pl, const NetworkConfig& cfg) {
  return per_server_sum(pl, cfg,
                        [&](int u, int m, int vm) { return nf_storage_load(cfg, u, m, vm); });
}

bool check_c4(const Placement& pl, const NetworkConfig& cfg) {
  for (int u = 0; u < pl.users(); ++u)
    for (int m = 0; m < pl.chain_length(u); ++m) {
      const auto& bs = pl.assign[u][m];
      if (bs.size() > 1) return false;
      for (const auto& b : bs) {
        if (b.vm < 0 || b.vm >= cfg.num_vms()) return false;
        if (cfg.vms[b.vm].host_server != b.server) return false;
        if (!cfg.vm_capable(b.vm, cfg.service_of(u).chain[m])) return false;
      }
    }
  return true;
}

bool check_c5(const Placement& pl, const NetworkConfig& cfg) {
  const auto load = server_cpu_load(pl, cfg);
  for (int n = 0; n < cfg.num_servers(); ++n)
    if (load[n] > cfg.servers[n].cpu_capacity) return false;
  return true;
}

bool check_c6(const Placement& pl, const NetworkConfig& cfg) {
  const auto load = server_storage_load(pl, cfg);
  for (int n = 0; n < cfg.num_servers(); ++n)
    if (load[n] > cfg.servers[n].storage_capacity) return false;
  return true;
}

Schedule build_schedule(const Placement& pl, const NetworkConfig& cfg, OrderingPolicy policy) {
  struct Cursor {
    int user;
    int next;
    double ready;
  };
  std::vector<Cursor> cursors;
  for (int u = 0; u < pl.users(); ++u) {
    if (!pl.user_active(u)) continue;
    for (int m = 0; m < pl.chain_length(u); ++m)
      if (!pl.binding(u, m))
        throw ScheduleError("user " + std::to_string(u) + ": chain position " +
                            std::to_string(m) + " is unplaced");
    cursors.push_back({u, 0, 0.0});
  }

  Schedule sch;
  std::vector<double> vm_free(static_cast<std::size_t>(cfg.num_vms()), 0.0);
  auto dispatch = [&](Cursor& c) {
    const Binding& b = *pl.binding(c.user, c.next);
    const double dur = nf_duration(cfg, c.user, c.next);
    const double start = std::max(c.ready, vm_free[b.vm]);
    vm_free[b.vm] = start + dur;
    sch.entries.push_back({c.user, c.next, b.server, b.vm, start, dur});
    ++c.next;
    if (c.next < pl.chain_length(c.user)) {
      const Binding& nb = *pl.binding(c.user, c.next);
      c.ready = (start + dur) + transfer_time(cfg, c.user, b.server, nb.server);
    }
  };

  if (policy == OrderingPolicy::user_priority) {
    for (auto& c : cursors)
      while (c.next < pl.chain_length(c.user)) dispatch(c);
    return sch;
  }

  // Cursors are in user order, so a strict < keeps the lowest user on ties.
  while (true) {
    Cursor* best = nullptr;
    for (auto& c : cursors) {
      if (c.next >= pl.chain_length(c.user)) continue;
      if (!best || c.ready < best->ready) best = &c;
    }
    if (!best) break;
    dispatch(*best);
  }
  return sch;
}

bool verify_schedule(const Schedule& sch, const Placement& pl, const NetworkConfig& cfg) {
  const auto& es = sch.entries;
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const auto& e = es[i];
    if (e.user < 0 || e.user >= pl.users() || e.position < 0 ||
        e.position >= pl.chain_length(e.user))
      return false;
    const Binding* b = pl.binding(e.user, e.position);
    if (!b || b->server != e.server || b->vm != e.vm) return false;
    if (!(e.duration > 0.0) || e.start < 0.0) return false;
    if (e.duration != nf_duration(cfg, e.user, e.position)) return false;
    if (!seen.emplace(std::make_pair(e.user, e.position), static_cast<int>(i)).second) return false;
  }
  // Every NF of an active user must appear.
  for (int u = 0; u < pl.users(); ++u) {
    if (!pl.user_active(u)) continue;
    for (int m = 0; m < pl.chain_length(u); ++m)
      if (!seen.count({u, m})) return false;
  }
  for (std::size_t a = 0; a < es.size(); ++a) {
    for (std::size_t b = 0; b < es.size(); ++b) {
      if (a == b) continue;
      const auto& x = es[a];
      const auto& y = es[b];
      if (a < b && x.vm == y.vm) {
        const bool disjoint = x.finish() <= y.start || y.finish() <= x.start;
        if (!disjoint) return false;
      }
      if (x.user == y.user && y.position == x.position + 1) {
        if (y.start < x.finish() + transfer_time(cfg, x.user, x.server, y.server)) return false;
      }
    }
  }
  return true;
}

DelayReport total_delay(const Schedule& sch, const Placement& pl, const NetworkConfig& cfg,
                        double radio_delay) {
  DelayReport r;
  const auto n = static_cast<std::size_t>(pl.users());
  r.active.assign(n, false);
  r.total.assign(n, 0.0);
  r.deadline.resize(n);
  r.radio_delay = radio_delay;
  for (int u = 0; u < pl.users(); ++u) r.deadline[u] = cfg.service_of(u).latency_max;
  for (const auto& e : sch.entries) {
    double incoming = 0.0;
    if (e.position > 0) {
      const Binding* prev = pl.binding(e.user, e.position - 1);
      if (prev) incoming = transfer_time(cfg, e.user, prev->server, e.server);
    }
    r.active[e.user] = true;
    r.total[e.user] = std::max(r.total[e.user], e.start + e.duration + incoming);
  }
  for (int u = 0; u < pl.users(); ++u)
    if (r.active[u] && r.total[u] > r.deadline[u] - radio_delay) r.violations.push_back(u);
  return r;
}

std::vector<double> server_busy_time(const Schedule& sch, const NetworkConfig& cfg) {
  std::vector<double> busy(static_cast<std::size_t>(cfg.num_servers()), 0.0);
  for (const auto& e : sch.entries) busy[e.server] += e.duration;
  return busy;
}

CpuEnergy cpu_energy(const Schedule& sch, const NetworkConfig& cfg) {
  const auto busy = server_busy_time(sch, cfg);
  CpuEnergy out;
  for (const auto& e : sch.entries) out.active += cfg.servers[e.server].power_active_cpu * e.duration;
  for (int n = 0; n < cfg.num_servers(); ++n) {
    if (busy[n] > cfg.time_unit)
      throw InfeasibleError("server " + std::to_string(n) + " busy " + format_double(busy[n]) +
                            " s exceeds the time unit");
    out.idle += cfg.servers[n].power_idle_cpu * (cfg.time_unit - busy[n]);
  }
  return out;
}

void write_schedule_csv(const Schedule& sch, std::ostream& out) {
  out << "user,position,server,vm,start,duration\n" << std::setprecision(17);
  for (const auto& e : sch.entries)
    out << e.user << ',' << e.position << ',' << e.server << ',' << e.vm << ',' << e.start << ','
        << e.duration << '\n';
}

void write_schedule_csv(const Schedule& sch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_schedule_csv(sch, out);
}

}  // namespace jrsim
