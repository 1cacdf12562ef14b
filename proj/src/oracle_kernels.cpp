#include <omp.h>

#include <limits>

#include "jrsim/oracle.hpp"

namespace jrsim {

namespace {

struct Best {
  double ee = -std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  std::uint64_t evaluated = 0;

  void offer(double ee_value, std::uint64_t idx) {
    if (ee_value > ee || (ee_value == ee && idx < index)) {
      ee = ee_value;
      index = idx;
    }
  }
};

void scan(const TinyInstance& inst, const ChannelState& ch, std::uint64_t lo, std::uint64_t hi,
          Best& best) {
  for (std::uint64_t i = lo; i < hi; ++i) {
    const GridDecision g = decode_grid(inst, i);
    if (!grid_power_ok(inst, g)) continue;
    ++best.evaluated;
    best.offer(oracle_evaluate(inst.cfg, ch, g, inst.power_levels).ee, i);
  }
}

OracleResult finish(const TinyInstance& inst, const Best& b) {
  OracleResult r;
  r.best_ee = b.ee;
  r.best_index = b.index;
  r.best = decode_grid(inst, b.index);
  r.decision = to_allocation(inst, r.best);
  r.evaluated = b.evaluated;
  return r;
}

std::uint64_t checked_size(const TinyInstance& inst) {
  check_tiny(inst);
  const std::uint64_t n = enumeration_size(inst);
  if (n > kMaxEnumeration)
    throw OracleError("enumeration size " + std::to_string(n) + " exceeds the bound " +
                      std::to_string(kMaxEnumeration));
  return n;
}

}  // namespace

OracleResult enumerate_best_serial(const TinyInstance& inst, const ChannelState& ch) {
  const std::uint64_t n = checked_size(inst);
  Best b;
  scan(inst, ch, 0, n, b);
  return finish(inst, b);
}

OracleResult enumerate_best(const TinyInstance& inst, const ChannelState& ch) {
  const std::uint64_t n = checked_size(inst);
  const int threads = omp_get_max_threads();
  std::vector<Best> part(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    const auto t = static_cast<std::uint64_t>(omp_get_thread_num());
    const auto nt = static_cast<std::uint64_t>(omp_get_num_threads());
    scan(inst, ch, n * t / nt, n * (t + 1) / nt, part[t]);
  }
  Best merged;
  for (const auto& p : part) {
    merged.evaluated += p.evaluated;
    if (p.evaluated > 0) merged.offer(p.ee, p.index);
  }
  return finish(inst, merged);
}

std::vector<double> batch_rewards_serial(const NetworkConfig& cfg, const ChannelState& ch,
                                         const std::vector<AllocationDecision>& ds) {
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out[i] = evaluate_decision(cfg, ch, ds[i]).reward;
  return out;
}

std::vector<double> batch_rewards_parallel(const NetworkConfig& cfg, const ChannelState& ch,
                                           const std::vector<AllocationDecision>& ds) {
  std::vector<double> out(ds.size());
  const auto n = static_cast<long long>(ds.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = evaluate_decision(cfg, ch, ds[static_cast<std::size_t>(i)]).reward;
  return out;
}

}  // namespace jrsim
