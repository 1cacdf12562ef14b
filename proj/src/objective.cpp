#include "jrsim/objective.hpp"

#include <stdexcept>

namespace jrsim {

EnergyBreakdown total_energy(double radio_e, double cpu_e, double mu1, double mu2) {
  if (radio_e < 0.0 || cpu_e < 0.0 || mu1 < 0.0 || mu2 < 0.0)
    throw std::domain_error("energy terms and weights must be non-negative");
  return {radio_e, cpu_e, mu1 * radio_e + mu2 * cpu_e};
}

double energy_efficiency(double sum_rate, const EnergyBreakdown& energy) {
  if (sum_rate == 0.0) return 0.0;
  if (!(energy.total_weighted > 0.0))
    throw std::domain_error("energy efficiency undefined for zero weighted energy");
  return sum_rate / energy.total_weighted;
}

double reward(double sum_rate, const EnergyBreakdown& energy, double c) {
  return c * energy_efficiency(sum_rate, energy);
}

}  // namespace jrsim
