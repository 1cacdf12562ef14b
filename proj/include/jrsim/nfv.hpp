#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "jrsim/config.hpp"

namespace jrsim {

/// One (server, VM) binding of an NF instance. `server` must host `vm`.
struct Binding {
  int server = 0;
  int vm = 0;
  bool operator==(const Binding&) const = default;
};

/// Placement beta: per user, per chain position, the bindings of that NF.
/// An empty binding list means the NF is unassigned. A well-formed placement
/// has at most one binding per NF (checked by check_c4).
struct Placement {
  std::vector<std::vector<std::vector<Binding>>> assign;

  /// All users present with their chain lengths, nothing bound.
  static Placement empty_for(const NetworkConfig& cfg);

  int users() const { return static_cast<int>(assign.size()); }
  int chain_length(int u) const { return static_cast<int>(assign[u].size()); }
  const Binding* binding(int u, int m) const {
    const auto& b = assign[u][m];
    return b.empty() ? nullptr : &b.front();
  }
  void bind(int u, int m, Binding b) { assign[u][m] = {b}; }
  bool user_active(int u) const;
  void clear_user(int u);

  bool operator==(const Placement&) const = default;
};

struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScheduleEntry {
  int user = 0;
  int position = 0;
  int server = 0;
  int vm = 0;
  double start = 0.0;     // s
  double duration = 0.0;  // s

  double finish() const { return start + duration; }
  bool operator==(const ScheduleEntry&) const = default;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;  // in dispatch order
  bool operator==(const Schedule&) const = default;
};

enum class OrderingPolicy {
  /// Dispatch the NF with the smallest ready time next; ties by (user, position).
  earliest_ready_first,
  /// Dispatch whole chains in user-index order.
  user_priority,
};

/// tau = packet_bits / q. Throws std::domain_error for q <= 0 or negative bits.
double processing_delay(double packet_bits, double q_rate);

/// Processing delay of user u's chain position m (VM-independent).
double nf_duration(const NetworkConfig& cfg, int u, int m);

/// Inter-server transfer time of user u's packet from server n_from to n_to.
double transfer_time(const NetworkConfig& cfg, int u, int n_from, int n_to);

/// CPU term of one placed NF on `vm`: (y*q or y*pi) + VM overhead.
double nf_cpu_load(const NetworkConfig& cfg, int u, int m, int vm);
/// Storage term of one placed NF on `vm`: (psi + y/8) + VM overhead, bytes.
double nf_storage_load(const NetworkConfig& cfg, int u, int m, int vm);

std::vector<double> server_cpu_load(const Placement& pl, const NetworkConfig& cfg);
std::vector<double> server_storage_load(const Placement& pl, const NetworkConfig& cfg);

/// C4: every NF has at most one binding, on a capable VM hosted by that server.
bool check_c4(const Placement& pl, const NetworkConfig& cfg);
/// C5: per-server CPU load <= L_n.
bool check_c5(const Placement& pl, const NetworkConfig& cfg);
/// C6: per-server storage load <= storage capacity.
bool check_c6(const Placement& pl, const NetworkConfig& cfg);

/// List scheduler. Users with no bound NF are skipped; a partially bound
/// chain throws ScheduleError naming the unbound position. All packets
/// arrive at time zero.
Schedule build_schedule(const Placement& pl, const NetworkConfig& cfg,
                        OrderingPolicy policy = OrderingPolicy::earliest_ready_first);

/// Independent pairwise check of the start-time constraint: no overlap on a
/// VM, and each NF starts after its predecessor finishes plus transfer.
/// Also checks that entries match the placement one-to-one.
bool verify_schedule(const Schedule& sch, const Placement& pl, const NetworkConfig& cfg);

struct DelayReport {
  std::vector<bool> active;       // user has entries in the schedule
  std::vector<double> total;      // chain completion delay per user (s)
  std::vector<double> deadline;   // latency_max per user (s)
  double radio_delay = 0.0;       // charged against every deadline
  std::vector<int> violations;    // active users with total > deadline - radio_delay
};

DelayReport total_delay(const Schedule& sch, const Placement& pl, const NetworkConfig& cfg,
                        double radio_delay = 0.0);

struct CpuEnergy {
  double active = 0.0;  // J
  double idle = 0.0;    // J
  double total() const { return active + idle; }
};

std::vector<double> server_busy_time(const Schedule& sch, const NetworkConfig& cfg);

/// Active draw over busy time plus idle draw over the rest of the time unit.
/// Throws InfeasibleError when a server is busy longer than the time unit.
CpuEnergy cpu_energy(const Schedule& sch, const NetworkConfig& cfg);

void write_schedule_csv(const Schedule& sch, std::ostream& out);
void write_schedule_csv(const Schedule& sch, const std::filesystem::path& path);

}  // namespace jrsim
