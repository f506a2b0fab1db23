// Prints the crossover time and the status at t_c for every builtin potential.

#include <cstdio>

#include "gibbsdyn/gibbsdyn.hpp"

using namespace gibbsdyn;

int main() {
  std::printf("%-42s %12s %12s %10s %s\n", "potential", "beta", "t_c", "at t_c", "witness");
  for (const auto& v : builtin::all()) {
    const auto rep = crossover_time(v);
    const char* status = rep.gibbs_at_tc ? to_string(*rep.gibbs_at_tc) : "-";
    char witness[96] = "-";
    if (rep.witness)
      std::snprintf(witness, sizeof witness, "t=%.4g alpha=%.4g minimisers %.4g, %.4g", rep.witness->t_probe, rep.witness->alpha,
                    rep.witness->minimisers.q_min, rep.witness->minimisers.q_max);
    std::printf("%-42s %12.6g %12.6g %10s %s\n", v.name().c_str(), rep.beta, rep.t_c, status, witness);
  }
}
