// Lift the partial sum of zeta(s) with n <= 30 to the torus and evaluate
// both sides at s = 2: n^{-s} corresponds to z_j = p_j^{-s}.
#include <cmath>
#include <iostream>

#include "polydisc/bohr.hpp"

using namespace polydisc;

int main() {
  DirichletSeries d;
  for (std::uint64_t n = 1; n <= 30; ++n) d.set(n, 1.0);
  FourierSeries f = lift_dirichlet(d);
  std::cout << to_text(f);

  std::vector<Complex> z;
  const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  for (auto p : primes) z.push_back(std::pow(static_cast<double>(p), -2.0));
  std::cout << "dirichlet: " << format_complex(dirichlet_eval(d, 2.0, 30)) << "\n"
            << "lifted:    " << format_complex(evaluate(f, PolydiscPoint(z))) << "\n";
}
