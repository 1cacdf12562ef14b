#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "jrsim/config.hpp"
#include "jrsim/presets.hpp"
#include "jrsim/rng.hpp"

using namespace jrsim;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
  return std::any_of(r.begin(), r.end(),
                     [&](const ValidationIssue& i) { return i.field.find(needle) != std::string::npos; });
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("catalog carries the table values verbatim") {
  const auto [vnfs, services] = builtin_catalog();
  const std::vector<std::pair<std::string, std::string>> expect = {
      {"NAT", "0.00092"}, {"FW", "0.0009"}, {"TM", "0.0133"},
      {"WOC", "0.0054"},  {"IDPS", "0.0107"}, {"VOC", "0.0054"}};
  REQUIRE(vnfs.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(vnfs[i].name == expect[i].first);
    CHECK(vnfs[i].pi_user == std::stod(expect[i].second));
  }
  REQUIRE(services.size() == 3);
  CHECK(services[1].chain == std::vector<std::string>{"NAT", "FW", "TM", "FW", "NAT"});
  CHECK(services[1].latency_max == 0.1);
  CHECK(services[1].packet_bits == 64000.0);
  CHECK(services[0].latency_max == 0.5);
  CHECK(services[0].packet_bits == 100e3);
  CHECK(services[2].packet_bits == 4e6);
}

TEST_CASE("minimal file echoes its values and fills defaults") {
  const auto cfg = parse_config("num_bs = 4\nnum_subcarriers = 10\n");
  CHECK(cfg.num_bs == 4);
  CHECK(cfg.num_subcarriers == 10);
  CHECK(cfg.mu1 == 1.0);
  CHECK(cfg.mu2 == 1.0);
  CHECK(cfg.reward_scale == 1.0);
  CHECK(cfg.num_servers() == 4);
  CHECK(cfg.num_vms() == 24);
  CHECK(cfg.servers[0].link_bandwidth == 1e9);
  CHECK(cfg.servers[0].storage_capacity == 1e9);
  CHECK(cfg.max_power_per_bs == 40.0);
  CHECK(cfg.subcarrier_bandwidth * cfg.num_subcarriers == doctest::Approx(200e3));
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("zero users is rejected by field name") {
  CHECK(error_of("num_users = 0\n").find("num_users") != std::string::npos);
}

TEST_CASE("malformed and unknown input is rejected with a line number") {
  CHECK(error_of("num_bs = four\n").find("line 1") != std::string::npos);
  CHECK(error_of("# c\nbogus_key = 1\n").find("bogus_key") != std::string::npos);
  CHECK(error_of("[server.0]\nwattage = 3\n").find("wattage") != std::string::npos);
  CHECK(error_of("[server.1]\n").find("server") != std::string::npos);
  CHECK(error_of("c5_interpretation = sideways\n").find("c5_interpretation") != std::string::npos);
}

TEST_CASE("validation names the offending field") {
  auto cfg = builtin_config();
  CHECK(validate_config(cfg).empty());

  auto bad_host = cfg;
  bad_host.vms[0].host_server = 99;
  CHECK(mentions(validate_config(bad_host), "host_server"));

  auto bad_chain = cfg;
  bad_chain.services[0].chain.push_back("XYZ");
  CHECK(mentions(validate_config(bad_chain), "chain"));

  auto no_weights = cfg;
  no_weights.mu1 = no_weights.mu2 = 0.0;
  CHECK(mentions(validate_config(no_weights), "mu1"));
}

TEST_CASE("explicit sections override the generated defaults") {
  const auto cfg = parse_config(
      "num_bs = 1\nnum_subcarriers = 2\n"
      "[vnf.A]\npi_user = 0.5\n"
      "[service.s]\nchain = A, A\nlatency_max = 0.2\nrate_min = 0\npacket_bits = 1000\n"
      "[server.0]\ncpu_capacity = 10\n"
      "[vm.0]\nhost_server = 0\ncapability = A\n"
      "[user.0]\nbs = 0\nservice = s\n");
  CHECK(cfg.num_users == 1);
  CHECK(cfg.vnf_catalog.size() == 1);
  CHECK(cfg.servers.size() == 1);
  CHECK(cfg.servers[0].cpu_capacity == 10.0);
  CHECK(cfg.vms[0].capability == std::vector<std::string>{"A"});
  CHECK(cfg.service_of(0).chain.size() == 2);
}

TEST_CASE("save then load reproduces the config field by field") {
  for (const auto& cfg : {builtin_config(), tiny_config()}) {
    const auto once = parse_config(save_config(cfg));
    CHECK(once == cfg);
    CHECK(parse_config(save_config(once)) == once);
  }
}

TEST_CASE("round trip holds on randomly perturbed scenarios") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto cfg = builtin_config();
    cfg.num_bs = 1 + static_cast<int>(rng.below(5));
    cfg.num_users = 1 + static_cast<int>(rng.below(12));
    cfg.user_requests = round_robin_requests(cfg.num_users, cfg.num_bs, cfg.services);
    cfg.mu1 = rng.uniform(0.0, 3.0);
    cfg.mu2 = rng.uniform(0.1, 3.0);
    cfg.noise_dbm = rng.uniform(-180.0, -100.0);
    cfg.q_base = rng.uniform(1.0, 1e7);
    cfg.c5_mode = rng.below(2) ? C5Mode::literal : C5Mode::cycles;
    for (auto& s : cfg.servers) s.cpu_capacity = rng.uniform(1.0, 1e4);
    for (auto& v : cfg.vms) v.cpu_overhead = rng.uniform(0.0, 50.0);
    for (auto& s : cfg.services) s.latency_max = rng.uniform(1e-3, 1.0);
    REQUIRE(validate_config(cfg).empty());
    CHECK(parse_config(save_config(cfg)) == cfg);
  }
}

TEST_CASE("load_config reads files and reports missing ones") {
  const auto path = std::filesystem::temp_directory_path() / "jrsim_test_cfg.cfg";
  save_config(tiny_config(), path);
  CHECK(load_config(path) == tiny_config());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("derived quantities") {
  const auto cfg = builtin_config();
  CHECK(cfg.nf_rate("FW") == doctest::Approx(1e6 / 0.0009));
  CHECK(cfg.noise_power_watts() == doctest::Approx(1e-20 * 20e3));
  CHECK(std::isinf(cfg.link_bandwidth(1, 1)));
  CHECK(cfg.link_bandwidth(0, 1) == 1e9);
  CHECK(cfg.nf_storage_bytes(1) == 64000.0 / 8.0);
  CHECK(cfg.user_requests[5].bs == 1);
  CHECK(cfg.user_requests[5].service == cfg.services[2].name);
}
