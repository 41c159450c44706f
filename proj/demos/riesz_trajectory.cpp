// Poisson extension of the Riesz product along r_k = 1 - k^{-1/3}: at the
// peak theta = 0 it grows, at a typical angle it collapses towards 0.
#include <cmath>
#include <cstdio>

#include "polydisc/rng.hpp"
#include "polydisc/special.hpp"

using namespace polydisc;

int main() {
  RieszProductMeasure mu(3, 12);
  double r_max = 1.0 - std::pow(3.0, -12.0);
  RandomStream rng(StreamFamily(1).stream(0));
  double typical = rng.angle();
  std::printf("%12s %14s %14s\n", "r", "theta=0", "theta=random");
  for (std::uint64_t k = 1; k <= 1u << 30; k *= 8) {
    double r = 1.0 - 1.0 / std::cbrt(static_cast<double>(k));
    if (r > r_max) break;
    std::printf("%12.8f %14.6g %14.6g\n", r, measure_radial_value(mu, r, 0.0), measure_radial_value(mu, r, typical));
  }
}
