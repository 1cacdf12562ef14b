#include "jrsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "jrsim/rng.hpp"

namespace jrsim {

std::vector<Point> bs_positions(const NetworkConfig& cfg) {
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.num_bs))));
  const int rows = (cfg.num_bs + cols - 1) / cols;
  const double w = cfg.area_side / cols;
  const double h = cfg.area_side / rows;
  std::vector<Point> out;
  for (int j = 0; j < cfg.num_bs; ++j)
    out.push_back({(j % cols + 0.5) * w, (j / cols + 0.5) * h});
  return out;
}

double path_loss_db(const NetworkConfig& cfg, double distance_m) {
  const double d_km = std::max(distance_m, cfg.min_distance) / 1000.0;
  return cfg.path_loss_intercept + cfg.path_loss_slope * std::log10(d_km);
}

ChannelState sample_channel(const NetworkConfig& cfg, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xC4A77E1ULL));
  ChannelState ch;
  ch.dims = RadioDims::of(cfg);
  ch.gains.resize(ch.dims.size());
  for (int u = 0; u < cfg.num_users; ++u) {
    const double x = rng.uniform(0.0, cfg.area_side);
    const double y = rng.uniform(0.0, cfg.area_side);
    ch.user_positions.push_back({x, y});
  }
  const auto sites = bs_positions(cfg);
  for (int u = 0; u < cfg.num_users; ++u) {
    for (int j = 0; j < cfg.num_bs; ++j) {
      const double d = std::hypot(ch.user_positions[u].x - sites[j].x,
                                  ch.user_positions[u].y - sites[j].y);
      const double mean_gain = std::pow(10.0, -path_loss_db(cfg, d) / 10.0);
      for (int k = 0; k < cfg.num_subcarriers; ++k)
        ch.gains[ch.dims.index(u, j, k)] = mean_gain * rng.exponential();
    }
  }
  return ch;
}

double interference(const ChannelState& ch, const RadioAction& act, int u, int j, int k) {
  const auto& d = act.dims;
  double total = 0.0;
  for (int j2 = 0; j2 < d.bss; ++j2) {
    if (j2 == j) continue;
    double tx = 0.0;
    for (int u2 = 0; u2 < d.users; ++u2)
      if (act.assigned(u2, j2, k)) tx += act.p(u2, j2, k);
    total += ch.gain(u, j2, k) * tx;
  }
  return total;
}

double sinr(const ChannelState& ch, const RadioAction& act, int u, int j, int k, double noise) {
  const double p = act.p(u, j, k);
  if (p == 0.0) return 0.0;
  return p * ch.gain(u, j, k) / (noise + interference(ch, act, u, j, k));
}

double rate_per_subcarrier(const ChannelState& ch, const RadioAction& act, int u, int j, int k,
                           double noise) {
  if (!act.assigned(u, j, k)) return 0.0;
  return std::log2(1.0 + sinr(ch, act, u, j, k, noise));
}

std::vector<double> user_rates(const NetworkConfig& cfg, const ChannelState& ch,
                               const RadioAction& act) {
  const double noise = cfg.noise_power_watts();
  std::vector<double> rates(static_cast<std::size_t>(cfg.num_users), 0.0);
  for (int u = 0; u < cfg.num_users; ++u) {
    const int j = cfg.user_requests[u].bs;
    for (int k = 0; k < cfg.num_subcarriers; ++k)
      rates[u] += rate_per_subcarrier(ch, act, u, j, k, noise);
  }
  return rates;
}

double radio_energy(const RadioAction& act, double time_unit, double circuit_power_per_bs) {
  double tx = 0.0;
  for (std::size_t i = 0; i < act.power.size(); ++i)
    if (act.rho[i]) tx += act.power[i];
  return time_unit * (tx + act.dims.bss * circuit_power_per_bs);
}

bool check_c1(const RadioAction& act) {
  const auto& d = act.dims;
  for (int j = 0; j < d.bss; ++j)
    for (int k = 0; k < d.subcarriers; ++k) {
      int n = 0;
      for (int u = 0; u < d.users; ++u) n += act.assigned(u, j, k) ? 1 : 0;
      if (n > 1) return false;
    }
  return true;
}

bool check_c2(const RadioAction& act, const NetworkConfig& cfg) {
  const auto& d = act.dims;
  for (int j = 0; j < d.bss; ++j) {
    double sum = 0.0;
    for (int u = 0; u < d.users; ++u)
      for (int k = 0; k < d.subcarriers; ++k)
        if (act.assigned(u, j, k)) sum += act.p(u, j, k);
    if (sum > cfg.max_power_per_bs) return false;
  }
  return true;
}

bool check_c3(const std::vector<double>& rates, const NetworkConfig& cfg) {
  for (int u = 0; u < cfg.num_users; ++u)
    if (rates.at(static_cast<std::size_t>(u)) < cfg.service_of(u).rate_min) return false;
  return true;
}

void write_channel_csv(const ChannelState& ch, std::ostream& out) {
  out << "u,j,k,gain\n";
  out << std::setprecision(17);
  for (int u = 0; u < ch.dims.users; ++u)
    for (int j = 0; j < ch.dims.bss; ++j)
      for (int k = 0; k < ch.dims.subcarriers; ++k)
        out << u << ',' << j << ',' << k << ',' << ch.gain(u, j, k) << '\n';
}

void write_channel_csv(const ChannelState& ch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_channel_csv(ch, out);
}

ChannelState read_channel_csv(std::istream& in) {
  struct Row {
    int u, j, k;
    double g;
  };
  std::vector<Row> rows;
  std::string line;
  if (!std::getline(in, line) || line.rfind("u,j,k,gain", 0) != 0)
    throw std::runtime_error("channel CSV: missing header");
  RadioDims d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Row r{};
    if (!(ss >> r.u >> r.j >> r.k >> r.g) || r.u < 0 || r.j < 0 || r.k < 0)
      throw std::runtime_error("channel CSV: malformed row '" + line + "'");
    d.users = std::max(d.users, r.u + 1);
    d.bss = std::max(d.bss, r.j + 1);
    d.subcarriers = std::max(d.subcarriers, r.k + 1);
    rows.push_back(r);
  }
  ChannelState ch;
  ch.dims = d;
  ch.gains.assign(d.size(), 0.0);
  if (rows.size() != d.size()) throw std::runtime_error("channel CSV: incomplete tensor");
  for (const auto& r : rows) ch.gains[d.index(r.u, r.j, r.k)] = r.g;
  return ch;
}

}  // namespace jrsim
