// Evolved kernels of the double well at the bad magnetisation alpha = 0, t = 1, approached from
// both sides along alpha -+ n^{-1/2}. Each side settles on its own Gaussian limit.

#include <cstdio>

#include "gibbsdyn/gibbsdyn.hpp"

using namespace gibbsdyn;

int main() {
  const auto v = builtin::double_well();
  const std::vector<std::size_t> ladder{25, 50, 100, 200, 400, 800, 1600, 3200};
  const auto ms = global_minimisers(TiltedRate(v, 1.0, 0.0));
  std::printf("limit means: %.6f (from below), %.6f (from above); variance 2\n", -v.d1(ms.q_min), -v.d1(ms.q_max));
  std::printf("%6s %12s %12s %12s %12s %12s\n", "n", "mean-", "W1-", "mean+", "W1+", "var");
  const auto lower = convergence_experiment(v, 1.0, 0.0, ladder, Sequence::minus_inv_sqrt);
  const auto upper = convergence_experiment(v, 1.0, 0.0, ladder, Sequence::plus_inv_sqrt);
  for (std::size_t i = 0; i < ladder.size(); ++i)
    std::printf("%6zu %12.6f %12.6f %12.6f %12.6f %12.6f\n", ladder[i], lower[i].mean, lower[i].w1, upper[i].mean, upper[i].w1,
                lower[i].variance);
}
