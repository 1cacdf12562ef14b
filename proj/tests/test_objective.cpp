#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "jrsim/objective.hpp"
#include "jrsim/rng.hpp"

using namespace jrsim;

TEST_CASE("total energy examples") {
  CHECK(total_energy(0.0, 0.0, 1.0, 1.0).total_weighted == 0.0);
  const auto e = total_energy(40.0, 15.0, 1.0, 1.0);
  CHECK(e.total_weighted == 55.0);
  CHECK(e.radio == 40.0);
  CHECK(e.cpu == 15.0);
  CHECK(total_energy(40.0, 15.0, 0.5, 0.0).total_weighted == 20.0);
  CHECK_THROWS_AS(total_energy(-1.0, 0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(total_energy(1.0, 0.0, 1.0, -1.0), std::domain_error);
}

TEST_CASE("energy efficiency examples") {
  const auto e = total_energy(40.0, 15.0, 1.0, 1.0);
  CHECK(energy_efficiency(0.0, e) == 0.0);
  CHECK(energy_efficiency(0.0, EnergyBreakdown{}) == 0.0);
  CHECK(energy_efficiency(110.0, e) == 2.0);
  CHECK(energy_efficiency(220.0, total_energy(80.0, 30.0, 1.0, 1.0)) == 2.0);
  CHECK_THROWS_AS(energy_efficiency(1.0, EnergyBreakdown{}), std::domain_error);
}

TEST_CASE("reward examples") {
  const auto e = total_energy(40.0, 15.0, 1.0, 1.0);
  CHECK(reward(110.0, e, 1.0) == energy_efficiency(110.0, e));
  CHECK(reward(110.0, e, 2.0) == 4.0);
  CHECK(reward(110.0, e, 0.0) == 0.0);
}

TEST_CASE("property: reward rises with rate and falls with either energy") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double rate = rng.uniform(0.1, 50.0);
    const double radio = rng.uniform(0.1, 100.0);
    const double cpu = rng.uniform(0.1, 100.0);
    const double mu1 = rng.uniform(0.1, 5.0);
    const double mu2 = rng.uniform(0.1, 5.0);
    const double c = rng.uniform(0.1, 10.0);
    const double d = rng.uniform(0.01, 5.0);
    const double base = reward(rate, total_energy(radio, cpu, mu1, mu2), c);
    CHECK(reward(rate + d, total_energy(radio, cpu, mu1, mu2), c) > base);
    CHECK(reward(rate, total_energy(radio + d, cpu, mu1, mu2), c) < base);
    CHECK(reward(rate, total_energy(radio, cpu + d, mu1, mu2), c) < base);
  }
}

TEST_CASE("property: the maximizing action does not depend on the scale factor") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    struct Option {
      double rate;
      EnergyBreakdown energy;
    };
    std::vector<Option> options;
    const int n = 2 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i)
      options.push_back({rng.uniform(0.0, 20.0),
                         total_energy(rng.uniform(0.1, 50.0), rng.uniform(0.1, 50.0), 1.0, 1.0)});
    auto best = [&](double c) {
      int arg = 0;
      for (int i = 1; i < n; ++i)
        if (reward(options[i].rate, options[i].energy, c) >
            reward(options[arg].rate, options[arg].energy, c))
          arg = i;
      return arg;
    };
    const int ref = best(1.0);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) CHECK(best(c) == ref);
  }
}
