// Follow one adaptive path for the counterexample: |f| along the path
// drops by e^{-4^l} per level while the boundary modulus stays moderate.
#include <cmath>
#include <cstdio>

#include "polydisc/radial.hpp"
#include "polydisc/special.hpp"

using namespace polydisc;

int main() {
  RandomStream rng(StreamFamily(5).stream(0));
  AdaptiveOptions opt;
  opt.levels = 2;
  opt.coordinate_cap = 20000;
  TorusPoint theta = sample_torus(opt.coordinate_cap, rng);
  AdaptiveResult res = adaptive_block_path(bump_oracle(), theta, opt);
  std::printf("levels reached: %d\n", res.levels_reached);
  for (std::size_t l = 0; l < res.nu.size(); ++l)
    std::printf("block ends at %u, block sum %.4f\n", res.nu[l], res.level_sums[l]);
  auto used = static_cast<std::uint32_t>(res.chosen_radius.size());
  std::printf("boundary |f| over %u factors: %.4f\n", used, counterexample_boundary_modulus(theta, used));
}
