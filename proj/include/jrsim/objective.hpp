#pragma once

namespace jrsim {

/// Weighted total energy Psi = mu1 * radio + mu2 * cpu, all in joules.
struct EnergyBreakdown {
  double radio = 0.0;
  double cpu = 0.0;
  double total_weighted = 0.0;

  bool operator==(const EnergyBreakdown&) const = default;
};

/// Throws std::domain_error for negative inputs.
EnergyBreakdown total_energy(double radio_e, double cpu_e, double mu1, double mu2);

/// sum_rate / Psi. A zero sum rate gives 0 for any energy; otherwise
/// Psi <= 0 throws std::domain_error.
double energy_efficiency(double sum_rate, const EnergyBreakdown& energy);

/// c * energy_efficiency.
double reward(double sum_rate, const EnergyBreakdown& energy, double c);

}  // namespace jrsim
