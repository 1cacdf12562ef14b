#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "jrsim/config.hpp"

namespace jrsim {

/// Shape of every (user, BS, subcarrier) tensor; row-major u, j, k.
struct RadioDims {
  int users = 0;
  int bss = 0;
  int subcarriers = 0;

  static RadioDims of(const NetworkConfig& cfg) {
    return {cfg.num_users, cfg.num_bs, cfg.num_subcarriers};
  }
  std::size_t size() const {
    return static_cast<std::size_t>(users) * static_cast<std::size_t>(bss) *
           static_cast<std::size_t>(subcarriers);
  }
  std::size_t index(int u, int j, int k) const {
    return (static_cast<std::size_t>(u) * static_cast<std::size_t>(bss) +
            static_cast<std::size_t>(j)) * static_cast<std::size_t>(subcarriers) +
           static_cast<std::size_t>(k);
  }
  bool operator==(const RadioDims&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Linear power gains h[u][j][k] plus the user drop that produced them.
struct ChannelState {
  RadioDims dims;
  std::vector<double> gains;
  std::vector<Point> user_positions;

  double gain(int u, int j, int k) const { return gains[dims.index(u, j, k)]; }
  bool operator==(const ChannelState&) const = default;
};

/// Subcarrier assignment rho and transmit power p, both U x J x K.
struct RadioAction {
  RadioDims dims;
  std::vector<std::uint8_t> rho;
  std::vector<double> power;  // W

  static RadioAction zeros(RadioDims d) {
    return {d, std::vector<std::uint8_t>(d.size(), 0), std::vector<double>(d.size(), 0.0)};
  }
  bool assigned(int u, int j, int k) const { return rho[dims.index(u, j, k)] != 0; }
  double p(int u, int j, int k) const { return power[dims.index(u, j, k)]; }
  bool operator==(const RadioAction&) const = default;
};

/// BS sites on a regular grid covering the square area.
std::vector<Point> bs_positions(const NetworkConfig& cfg);

/// Path loss in dB at distance d (meters), clamped at cfg.min_distance.
double path_loss_db(const NetworkConfig& cfg, double distance_m);

/// Users uniform in the square; gain = path loss x Exp(1) fading per (u,j,k).
ChannelState sample_channel(const NetworkConfig& cfg, std::uint64_t seed);

/// Inter-cell interference seen by user u of BS j on subcarrier k (W).
double interference(const ChannelState& ch, const RadioAction& act, int u, int j, int k);

double sinr(const ChannelState& ch, const RadioAction& act, int u, int j, int k, double noise);

/// rho * log2(1 + sinr), bits/s/Hz.
double rate_per_subcarrier(const ChannelState& ch, const RadioAction& act, int u, int j, int k,
                           double noise);

/// R_u: sum over subcarriers at the user's serving BS.
std::vector<double> user_rates(const NetworkConfig& cfg, const ChannelState& ch,
                               const RadioAction& act);

/// time_unit * (sum rho p + J * circuit power).
double radio_energy(const RadioAction& act, double time_unit, double circuit_power_per_bs = 0.0);

bool check_c1(const RadioAction& act);
bool check_c2(const RadioAction& act, const NetworkConfig& cfg);
bool check_c3(const std::vector<double>& rates, const NetworkConfig& cfg);

void write_channel_csv(const ChannelState& ch, std::ostream& out);
void write_channel_csv(const ChannelState& ch, const std::filesystem::path& path);
/// Reads back the u,j,k,gain rows; dims are taken from the largest indices.
ChannelState read_channel_csv(std::istream& in);

}  // namespace jrsim
