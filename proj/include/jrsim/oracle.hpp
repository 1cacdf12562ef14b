#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jrsim/config.hpp"
#include "jrsim/env.hpp"
#include "jrsim/radio.hpp"
#include "jrsim/rng.hpp"

namespace jrsim {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A small scenario plus the discrete power levels (fractions of P_max).
struct TinyInstance {
  NetworkConfig cfg;
  std::vector<double> power_levels{0.0, 0.25, 0.5, 0.75, 1.0};

  /// J=1, U=2, K=2, two servers with two VMs each, chains of length two.
  static TinyInstance reference();
};

inline constexpr std::uint64_t kMaxEnumeration = 10'000'000;

/// Throws OracleError unless J<=2, U<=3, K<=3, N<=2, at most 2 VMs per
/// server and chains of length <= 3.
void check_tiny(const TinyInstance& inst);

/// Grid decision: per (j, k) one served user (or -1) with a power level index,
/// per (u, m) one VM.
struct GridDecision {
  std::vector<int> sc_user;   // [j * K + k], -1 = off
  std::vector<int> sc_level;  // [j * K + k]
  std::vector<std::vector<int>> vm;  // [u][m]

  bool operator==(const GridDecision&) const = default;
};

/// Number of grid decisions before the power-budget filter.
std::uint64_t enumeration_size(const TinyInstance& inst);

/// The grid decision with mixed-radix index `idx` (first (j, k) most significant).
GridDecision decode_grid(const TinyInstance& inst, std::uint64_t idx);
/// Uniformly random grid decision.
GridDecision random_grid(const TinyInstance& inst, Rng& rng);

AllocationDecision to_allocation(const TinyInstance& inst, const GridDecision& g);
bool grid_power_ok(const TinyInstance& inst, const GridDecision& g);

/// Independent recomputation of the admitted set, joint EE and reward of a
/// decision. Shares no delay, energy or rate code with the environment.
struct OracleValue {
  double ee = 0.0;
  double reward = 0.0;
  double sum_rate = 0.0;
  double radio_energy = 0.0;
  double cpu_energy = 0.0;
  std::vector<bool> admitted;
};
OracleValue oracle_evaluate(const NetworkConfig& cfg, const ChannelState& ch,
                            const GridDecision& g, const std::vector<double>& power_levels);

struct OracleResult {
  double best_ee = 0.0;
  std::uint64_t best_index = 0;
  GridDecision best;
  AllocationDecision decision;
  std::uint64_t evaluated = 0;  // decisions within the power budget
};

/// Exhaustive maximizer of EE over the grid; ties go to the smallest index.
OracleResult enumerate_best(const TinyInstance& inst, const ChannelState& ch);
/// Single-threaded reference of enumerate_best.
OracleResult enumerate_best_serial(const TinyInstance& inst, const ChannelState& ch);

/// Reward of a decision as computed by the code under test.
using EnvEvaluator = std::function<double(const NetworkConfig&, const ChannelState&,
                                          const AllocationDecision&)>;
double environment_reward(const NetworkConfig& cfg, const ChannelState& ch,
                          const AllocationDecision& d);

struct Mismatch {
  int sample = 0;
  double env_reward = 0.0;
  double oracle_reward = 0.0;
  std::string decision;  // JSON dump
};

struct VerifyReport {
  int samples = 0;
  double max_rel_error = 0.0;
  std::vector<Mismatch> mismatches;
};

/// Compares env and oracle rewards on `samples` random grid decisions that
/// respect the power budget.
VerifyReport verify_env(const TinyInstance& inst, const ChannelState& ch, int samples,
                        std::uint64_t seed, const EnvEvaluator& env_eval = environment_reward,
                        double rel_tol = 1e-9);

std::string grid_to_json(const GridDecision& g);
std::uint64_t instance_digest(const TinyInstance& inst);

/// Rewards of many decisions via the environment path, serial and OpenMP.
std::vector<double> batch_rewards_serial(const NetworkConfig& cfg, const ChannelState& ch,
                                         const std::vector<AllocationDecision>& ds);
std::vector<double> batch_rewards_parallel(const NetworkConfig& cfg, const ChannelState& ch,
                                           const std::vector<AllocationDecision>& ds);

}  // namespace jrsim
