#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "jrsim/experiments.hpp"
#include "jrsim/presets.hpp"

using namespace jrsim;

namespace {

NetworkConfig short_tiny() {
  auto cfg = tiny_config();
  cfg.episode_length = 8;
  return cfg;
}

AgentHyper quick_hyper() {
  AgentHyper h;
  h.hidden = {8};
  h.warmup = 10;
  h.batch = 4;
  h.eval_episodes = 1;
  return h;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("signaling overhead examples") {
  const Overhead sac = signaling_overhead(10, 4, 20, Method::sac);
  CHECK(sac.requested_rate == 16);
  CHECK(sac.radio_link == 16 * 10 * 4 * 20);
  CHECK(sac.core_link == 12800);
  CHECK(sac.total() == 25616);
  const Overhead ma = signaling_overhead(10, 4, 20, Method::maddpg);
  CHECK(ma.total() == 48);
  CHECK(signaling_overhead(10, 4, 20, Method::disjoint).total() == 16);
  CHECK(signaling_overhead(10, 4, 0, Method::sac).total() == 16);
  CHECK(signaling_overhead(10, 4, 0, Method::maddpg).total() == 48);
  const auto cfg = tiny_config();
  CHECK(signaling_overhead(cfg, Method::ddpg).radio_link == 16ULL * cfg.num_bs * cfg.num_subcarriers * cfg.num_users);
}

TEST_CASE("property: centralized overhead grows with the user count, decentralized stays flat") {
  for (int u = 1; u < 200; u += 7) {
    CHECK(signaling_overhead(4, 10, u + 1, Method::sac).total() >
          signaling_overhead(4, 10, u, Method::sac).total());
    CHECK(signaling_overhead(4, 10, u + 1, Method::maddpg).total() ==
          signaling_overhead(4, 10, u, Method::maddpg).total());
  }
}

TEST_CASE("median and rank correlation") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS(median({}));
  CHECK(spearman({1, 2, 3, 4, 5}, {5, 6, 7, 8, 7}) == doctest::Approx(0.8207826816681233));
  CHECK(spearman({1, 2, 3}, {30, 20, 10}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 1}) == 0.0);
  CHECK(spearman({1, 2, 3}, {1, 100, 1000}) == doctest::Approx(1.0));
  CHECK_THROWS(spearman({1}, {1}));
  CHECK_THROWS(spearman({1, 2}, {1}));
}

TEST_CASE("sweep values are applied to the right fields") {
  const auto cfg = tiny_config();
  CHECK(apply_sweep_value(cfg, "mu2", 2.0).mu2 == 2.0);
  for (const auto& s : apply_sweep_value(cfg, "rate_min", 2.0).services) CHECK(s.rate_min == 2.0);
  for (const auto& s : apply_sweep_value(cfg, "latency_max", 0.5).services) CHECK(s.latency_max == 0.5);
  const auto three = apply_sweep_value(cfg, "num_users", 3);
  CHECK(three.num_users == 3);
  CHECK(three.user_requests.size() == 3);
  CHECK_THROWS_AS(apply_sweep_value(cfg, "num_users", 1.5), std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep_value(cfg, "gamma", 1.0), std::invalid_argument);

  SweepSpec bad{"rate_min", {}, {Method::sac}, {0}, 1};
  CHECK_THROWS_AS(validate_sweep(bad), std::invalid_argument);
  bad.values = {1.0};
  bad.episodes = 0;
  CHECK_THROWS_AS(validate_sweep(bad), std::invalid_argument);
}

TEST_CASE("sweeps yield one row per cell, independent of the job count") {
  SweepSpec spec{"mu2", {0.5, 2.0}, {Method::random, Method::sac}, {0, 1}, 2};
  const auto cfg = short_tiny();
  const auto a = run_sweep(spec, cfg, quick_hyper(), 1);
  const auto b = run_sweep(spec, cfg, quick_hyper(), 2);
  REQUIRE(a.size() == 8);
  REQUIRE(b.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].status == "ok");
    CHECK(a[i].final_ee == b[i].final_ee);
    CHECK(a[i].mean_reward == b[i].mean_reward);
  }
  CHECK(a[0].value == 0.5);
  CHECK(a[0].method == Method::random);
  CHECK(a[1].seed == 1);
  CHECK(a[2].method == Method::sac);
  CHECK(a[4].value == 2.0);

  const auto med = median_ee_by_value(a, Method::sac);
  REQUIRE(med.size() == 2);
  CHECK(med[0].second == median({a[2].final_ee, a[3].final_ee}));

  std::ostringstream csv;
  write_sweep_csv(a, csv);
  CHECK(first_line(csv.str()) == "variable,value,method,seed,final_ee,mean_reward,status");
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}

TEST_CASE("a failing sweep cell is reported and the sweep continues") {
  SweepSpec spec{"num_users", {1.5, 2.0}, {Method::random}, {0}, 1};
  const auto rows = run_sweep(spec, short_tiny(), quick_hyper(), 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status.rfind("failed: ", 0) == 0);
  CHECK(rows[1].status == "ok");
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  CHECK(csv.str().find("failed") != std::string::npos);
}

TEST_CASE("training output files and curve header") {
  const auto dir = std::filesystem::temp_directory_path() / "jrsim_test_training";
  std::filesystem::remove_all(dir);
  const auto out = run_training(short_tiny(), Method::sac, 4, 2, quick_hyper(), dir);
  CHECK(out.files.size() == 4);
  for (const auto& f : out.files) CHECK(std::filesystem::exists(f));
  std::ifstream curve(dir / "curve.csv");
  std::string header;
  std::getline(curve, header);
  CHECK(header == "episode,mean_reward,mean_ee,critic_loss,actor_loss,admitted_users");
  int lines = 0;
  for (std::string l; std::getline(curve, l);) ++lines;
  CHECK(lines == 2);

  const auto rnd = run_training(short_tiny(), Method::random, 4, 2, quick_hyper(), dir / "random");
  CHECK(rnd.files.size() == 1);

  std::ostringstream trace;
  run_training(short_tiny(), Method::random, 4, 1, quick_hyper(), dir / "traced", &trace);
  const std::string lines_out = trace.str();
  CHECK(std::count(lines_out.begin(), lines_out.end(), '\n') >= short_tiny().episode_length);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifests are deterministic and track the config") {
  const auto cfg = tiny_config();
  const std::vector<std::string> args{"jrsim", "train", "--seed", "3"};
  const auto a = make_manifest(args, cfg, {3});
  const auto b = make_manifest(args, cfg, {3});
  CHECK(a.dump() == b.dump());
  CHECK(a["version"] == kVersion);
  CHECK(a["seeds"][0] == 3);
  CHECK(parse_config(a["config"].get<std::string>()) == cfg);
  auto changed = cfg;
  changed.mu2 = 3.0;
  CHECK(make_manifest(args, changed, {3})["config_digest"] != a["config_digest"]);
  CHECK(a["config_digest"].get<std::string>().size() == 16);
}
