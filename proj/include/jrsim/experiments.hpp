#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "jrsim/agents.hpp"
#include "jrsim/config.hpp"

namespace jrsim {

inline constexpr const char* kVersion = "jrsim 1.0.0";

struct SweepSpec {
  std::string variable;  // num_users, rate_min, latency_max or mu2
  std::vector<double> values;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  int episodes = 200;
};

/// Throws std::invalid_argument naming the bad field.
void validate_sweep(const SweepSpec& spec);

/// Copy of `cfg` with the sweep variable set (every service for per-service
/// variables; round-robin requests regenerated for num_users).
NetworkConfig apply_sweep_value(const NetworkConfig& cfg, const std::string& variable,
                                double value);

struct SweepRow {
  std::string variable;
  double value = 0.0;
  Method method = Method::random;
  std::uint64_t seed = 0;
  double final_ee = 0.0;
  double mean_reward = 0.0;
  std::string status = "ok";  // or the failure message
};

/// One row per (value, method, seed) in that order; cells run concurrently
/// up to `jobs`. A failing cell is reported in `status` and the sweep goes on.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const NetworkConfig& cfg,
                                const AgentHyper& hyper, int jobs = 1);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_curve_csv(const std::vector<CurveRow>& curve, std::ostream& out);

double median(std::vector<double> xs);
/// Spearman rank correlation with average ranks for ties; 0 for constant input.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Median final EE per sweep value for one method, ordered by value.
std::vector<std::pair<double, double>> median_ee_by_value(const std::vector<SweepRow>& rows,
                                                          Method method);

/// Bits exchanged per episode between the orchestrator and the radio and
/// core parts, following the fixed 16-bit encoding of every reported value.
struct Overhead {
  std::uint64_t requested_rate = 0;
  std::uint64_t radio_link = 0;
  std::uint64_t core_link = 0;
  std::uint64_t total() const { return requested_rate + radio_link + core_link; }
};

Overhead signaling_overhead(int num_bs, int num_subcarriers, int num_users, Method method);
Overhead signaling_overhead(const NetworkConfig& cfg, Method method);

struct TrainingOutput {
  TrainResult result;
  std::vector<std::filesystem::path> files;
};

/// Trains and writes curve.csv plus one checkpoint per network (none for
/// random) into `out_dir`. Every environment step is traced to `trace` if set.
TrainingOutput run_training(const NetworkConfig& cfg, Method method, std::uint64_t seed,
                            int episodes, const AgentHyper& hyper,
                            const std::filesystem::path& out_dir, std::ostream* trace = nullptr);

/// Manifest sidecar: command line, config digest and text, seeds, version.
nlohmann::json make_manifest(const std::vector<std::string>& args, const NetworkConfig& cfg,
                             const std::vector<std::uint64_t>& seeds);
void write_manifest(const nlohmann::json& manifest, const std::filesystem::path& path);

}  // namespace jrsim
