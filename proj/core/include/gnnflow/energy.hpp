#ifndef GNNFLOW_ENERGY_HPP_
#define GNNFLOW_ENERGY_HPP_

#include <array>

#include "gnnflow/interphase.hpp"
#include "gnnflow/phase_engine.hpp"

namespace gnnflow {

// Per-access energies in picojoules. Reads and writes cost the same.
struct EnergyModel {
  double gb_access_pj = 1.046;
  double l1_access_pj = 0.053;
};

enum class Level { GB, L1 };
enum class Direction { Read, Write };

struct EnergyReport {
  // cells[level][direction][operand], in pJ.
  std::array<std::array<std::array<double, kNumOperands>, 2>, 2> cells{};
  double total_pj = 0.0;

  double cell(Level l, Direction d, Operand o) const {
    return cells[static_cast<std::size_t>(l)][static_cast<std::size_t>(d)]
                [static_cast<std::size_t>(o)];
  }
  double level_total(Level l) const;
  double operand_total(Level l, Operand o) const;
};

// Throws ConfigError unless both constants are positive.
EnergyReport energy(const AccessCounts& access, const EnergyModel& model = {});
EnergyReport energy(const LayerCost& cost, const EnergyModel& model = {});

}  // namespace gnnflow

#endif  // GNNFLOW_ENERGY_HPP_
