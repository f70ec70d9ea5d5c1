#include "gnnflow/energy.hpp"

#include "gnnflow/error.hpp"

namespace gnnflow {

double EnergyReport::level_total(Level l) const {
  double s = 0.0;
  for (const auto& dir : cells[static_cast<std::size_t>(l)])
    for (double x : dir) s += x;
  return s;
}

double EnergyReport::operand_total(Level l, Operand o) const {
  return cell(l, Direction::Read, o) + cell(l, Direction::Write, o);
}

EnergyReport energy(const AccessCounts& access, const EnergyModel& model) {
  if (!(model.gb_access_pj > 0.0) || !(model.l1_access_pj > 0.0))
    throw ConfigError("energy constants must be positive");
  const OperandCounts* counts[2][2] = {{&access.gb_reads, &access.gb_writes},
                                       {&access.l1_reads, &access.l1_writes}};
  const double pj[2] = {model.gb_access_pj, model.l1_access_pj};
  EnergyReport r;
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t d = 0; d < 2; ++d)
      for (std::size_t o = 0; o < kNumOperands; ++o) {
        r.cells[l][d][o] = static_cast<double>((*counts[l][d])[o]) * pj[l];
        r.total_pj += r.cells[l][d][o];
      }
  return r;
}

EnergyReport energy(const LayerCost& cost, const EnergyModel& model) {
  return energy(cost.access, model);
}

}  // namespace gnnflow
