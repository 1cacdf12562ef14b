#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jrsim {

/// A virtual network function type and its per-user processing requirement.
struct VnfSpec {
  std::string name;
  double pi_user = 0.0;

  bool operator==(const VnfSpec&) const = default;
};

/// A service: ordered function chain plus its QoS requirements.
struct ServiceSpec {
  std::string name;
  std::vector<std::string> chain;
  double latency_max = 0.0;  // seconds
  double rate_min = 0.0;     // bits/s/Hz
  double packet_bits = 0.0;  // bits generated per time unit

  bool operator==(const ServiceSpec&) const = default;
};

struct ServerSpec {
  double cpu_capacity = 1200.0;
  double storage_capacity = 1e9;  // bytes
  double power_active_cpu = 20.0;  // W, per busy VM
  double power_idle_cpu = 10.0;    // W
  double link_bandwidth = 1e9;     // bits/s to every other server

  bool operator==(const ServerSpec&) const = default;
};

struct VmSpec {
  int host_server = 0;
  double cpu_overhead = 0.0;
  double storage_overhead = 0.0;
  std::vector<std::string> capability;

  bool operator==(const VmSpec&) const = default;
};

struct UserRequest {
  int bs = 0;
  std::string service;

  bool operator==(const UserRequest&) const = default;
};

/// How the CPU-capacity constraint prices an NF.
///  literal: packet_bits * q (q = q_base / pi_user, a processing rate)
///  cycles:  packet_bits * pi_user (pi_user read as cycles per bit)
enum class C5Mode { literal, cycles };

/// Full scenario description. Immutable once loaded.
struct NetworkConfig {
  // radio
  int num_bs = 4;
  int num_users = 8;
  int num_subcarriers = 10;
  double subcarrier_bandwidth = 20e3;  // Hz
  double max_power_per_bs = 40.0;      // W
  double noise_dbm = -170.0;           // dBm/Hz
  double area_side = 1000.0;           // m
  double circuit_power_per_bs = 0.0;   // W, constant radio energy term
  double path_loss_intercept = 128.1;  // dB at 1 km
  double path_loss_slope = 37.6;       // dB per decade
  double min_distance = 35.0;          // m

  // core
  std::vector<ServerSpec> servers;
  std::vector<VmSpec> vms;
  std::vector<VnfSpec> vnf_catalog;
  std::vector<ServiceSpec> services;
  std::vector<UserRequest> user_requests;
  int max_nfs_per_vm = 6;
  double q_base = 1e6;  // bits per time unit at pi_user = 1
  double nf_storage = -1.0;  // bytes per placed NF; negative selects packet_bits / 8
  C5Mode c5_mode = C5Mode::cycles;

  // objective / MDP
  double mu1 = 1.0;
  double mu2 = 1.0;
  double time_unit = 1.0;  // s
  double reward_scale = 1.0;
  double rejection_penalty = 0.0;
  int episode_length = 100;

  bool operator==(const NetworkConfig&) const = default;

  int num_servers() const { return static_cast<int>(servers.size()); }
  int num_vms() const { return static_cast<int>(vms.size()); }

  const VnfSpec& vnf(const std::string& name) const;
  const ServiceSpec& service(const std::string& name) const;
  const ServiceSpec& service_of(int user) const;
  /// Per-NF processing rate q = q_base / pi_user (bits per time unit).
  double nf_rate(const std::string& vnf_name) const;
  double noise_power_watts() const;
  bool vm_capable(int vm, const std::string& vnf_name) const;
  /// Link bandwidth between two servers; infinite for n == n2.
  double link_bandwidth(int n, int n2) const;
  /// Storage footprint psi of one placed NF of a user, in bytes.
  double nf_storage_bytes(int user) const;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Table-default VNF and SFC catalogs.
std::pair<std::vector<VnfSpec>, std::vector<ServiceSpec>> builtin_catalog();

/// Checks every type invariant; an empty report means valid.
ValidationReport validate_config(const NetworkConfig& cfg);

/// Parses the key-value format. Throws ConfigError on malformed input,
/// unknown keys, or invariant violations (message names the field).
NetworkConfig parse_config(const std::string& text);
NetworkConfig load_config(const std::filesystem::path& path);

/// Writes every field explicitly; parse_config(save) == cfg.
std::string save_config(const NetworkConfig& cfg);
void save_config(const NetworkConfig& cfg, const std::filesystem::path& path);

/// Round-robin user requests: user u on BS u mod J, service u mod S.
std::vector<UserRequest> round_robin_requests(int num_users, int num_bs,
                                              const std::vector<ServiceSpec>& services);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

std::uint64_t config_digest(const NetworkConfig& cfg);

}  // namespace jrsim
