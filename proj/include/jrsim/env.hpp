#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "jrsim/config.hpp"
#include "jrsim/nfv.hpp"
#include "jrsim/objective.hpp"
#include "jrsim/radio.hpp"

namespace jrsim {

/// Offsets into the flat action vector:
///   [power U*J*K | subcarrier J*K*(U+1) | placement: per (u, m) one logit per capable VM]
/// The radio slice is [0, placement_offset), the core slice the rest.
struct ActionLayout {
  RadioDims dims;
  std::size_t power_offset = 0;
  std::size_t subcarrier_offset = 0;
  std::size_t placement_offset = 0;
  std::size_t total = 0;
  std::vector<std::vector<std::size_t>> nf_offset;    // [u][m] absolute offset
  std::vector<std::vector<std::vector<int>>> nf_vms;  // [u][m] capable VMs, ascending

  static ActionLayout of(const NetworkConfig& cfg);

  std::size_t size() const { return total; }
  std::size_t radio_size() const { return placement_offset; }
  std::size_t core_size() const { return total - placement_offset; }
  std::size_t subcarrier_block(int j, int k) const {
    return subcarrier_offset +
           (static_cast<std::size_t>(j) * static_cast<std::size_t>(dims.subcarriers) +
            static_cast<std::size_t>(k)) * static_cast<std::size_t>(dims.users + 1);
  }
};

struct AllocationDecision {
  RadioAction radio;
  Placement placement;
  bool operator==(const AllocationDecision&) const = default;
};

/// Argmax decoding (ties to the lowest index). Subcarrier (j, k) picks among
/// the users served by BS j plus "off"; power weights are max(logit, 0) and
/// are rescaled per BS only when their sum exceeds one, so sum p <= P_max.
AllocationDecision decode_action(const Eigen::VectorXd& a, const NetworkConfig& cfg,
                                 const ActionLayout& layout);

enum class ObjectiveMode {
  joint,       // c * sum admitted rate / Psi
  radio_only,  // c * sum rate / (mu1 * E_radio), admission not applied
  core_only,   // c * sum admitted rate / (mu2 * E_cpu)
};

struct EvalOptions {
  ObjectiveMode mode = ObjectiveMode::joint;
  double radio_delay = 0.0;  // s, charged against every deadline
  OrderingPolicy policy = OrderingPolicy::earliest_ready_first;
};

struct ConstraintFlags {
  bool c1 = true, c2 = true, c3 = true, c4 = true, c5 = true, c6 = true, c7 = true, c8 = true;
  bool all() const { return c1 && c2 && c3 && c4 && c5 && c6 && c7 && c8; }
};

struct Evaluation {
  AllocationDecision decision;      // after admission
  std::vector<bool> admitted;
  std::vector<int> dropped;         // in drop order
  std::vector<double> rates;        // per user, after admission
  double sum_rate = 0.0;            // admitted users only
  EnergyBreakdown energy;
  Schedule schedule;
  DelayReport delay;
  ConstraintFlags flags;
  double ee = 0.0;                  // joint energy efficiency
  double reward = 0.0;              // per the objective mode

  int admitted_count() const;
};

/// Rate-per-energy share of one user, used to order admission drops.
double user_contribution(const NetworkConfig& cfg, const AllocationDecision& d,
                         const std::vector<double>& rates, int u);

/// Decision -> admission -> schedule -> delays -> energies -> reward.
/// Violators of C3, placement completeness, C5, C6, the per-VM NF limit,
/// server busy time, or C8 are dropped one at a time, smallest contribution
/// first, until the rest is feasible.
Evaluation evaluate_decision(const NetworkConfig& cfg, const ChannelState& ch,
                             AllocationDecision decision, const EvalOptions& opt = {});

/// Maps log10 channel gains to roughly zero mean, unit spread.
struct StateNormalizer {
  double mean = 0.0;
  double scale = 1.0;

  /// Statistics over `draws` channel samples with fixed seeds.
  static StateNormalizer fit(const NetworkConfig& cfg, int draws = 1000);
  Eigen::VectorXd apply(const ChannelState& ch) const;
};

struct StepOutcome {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool done = false;
  Evaluation info;
};

/// Block-fading episodic environment: each step draws a fresh channel.
/// Single-threaded; use one instance per thread.
class Environment {
 public:
  explicit Environment(NetworkConfig cfg, EvalOptions opt = {});

  const NetworkConfig& config() const { return cfg_; }
  const ActionLayout& layout() const { return layout_; }
  const EvalOptions& options() const { return opt_; }
  void set_options(const EvalOptions& opt) { opt_ = opt; }
  const StateNormalizer& normalizer() const { return norm_; }
  std::size_t state_size() const { return layout_.dims.size(); }
  std::size_t action_size() const { return layout_.size(); }
  int episode_length() const { return cfg_.episode_length; }

  Eigen::VectorXd reset(std::uint64_t seed);
  StepOutcome step(const Eigen::VectorXd& action);

  const ChannelState& channel() const { return channel_; }
  const Eigen::VectorXd& state() const { return state_; }
  int time() const { return t_; }

  /// JSON-lines trace, one record per step; nullptr disables.
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  NetworkConfig cfg_;
  EvalOptions opt_;
  ActionLayout layout_;
  StateNormalizer norm_;
  ChannelState channel_;
  Eigen::VectorXd state_;
  std::uint64_t seed_ = 0;
  int t_ = 0;
  std::ostream* trace_ = nullptr;
};

/// Channel draw for step t of the episode seeded by `seed`.
ChannelState episode_channel(const NetworkConfig& cfg, std::uint64_t seed, int t);

}  // namespace jrsim
