#include "jrsim/presets.hpp"

namespace jrsim {

NetworkConfig builtin_config() {
  NetworkConfig cfg;
  auto [vnfs, services] = builtin_catalog();
  cfg.vnf_catalog = std::move(vnfs);
  cfg.services = std::move(services);
  cfg.servers.assign(4, ServerSpec{});
  std::vector<std::string> all;
  for (const auto& v : cfg.vnf_catalog) all.push_back(v.name);
  for (int n = 0; n < 4; ++n)
    for (int v = 0; v < 6; ++v) cfg.vms.push_back({n, 0.0, 0.0, all});
  cfg.user_requests = round_robin_requests(cfg.num_users, cfg.num_bs, cfg.services);
  return cfg;
}

NetworkConfig tiny_config() {
  NetworkConfig cfg;
  cfg.num_bs = 1;
  cfg.num_users = 2;
  cfg.num_subcarriers = 2;
  cfg.area_side = 500.0;
  cfg.noise_dbm = -150.0;
  cfg.circuit_power_per_bs = 0.5;
  cfg.q_base = 1e4;
  cfg.reward_scale = 10.0;

  auto [vnfs, services] = builtin_catalog();
  cfg.vnf_catalog = std::move(vnfs);
  cfg.services = {
      {"alpha", {"NAT", "TM"}, 0.105, 1.0, 64e3},
      {"beta", {"FW", "IDPS"}, 0.130, 1.0, 100e3},
  };

  ServerSpec server;
  server.link_bandwidth = 1e7;
  cfg.servers.assign(2, server);
  const std::vector<std::string> cap = {"NAT", "FW", "TM", "IDPS"};
  for (int n = 0; n < 2; ++n)
    for (int v = 0; v < 2; ++v) cfg.vms.push_back({n, 10.0, 0.0, cap});
  cfg.user_requests = round_robin_requests(cfg.num_users, cfg.num_bs, cfg.services);
  return cfg;
}

}  // namespace jrsim
