#include <cmath>
#include <vector>

#include "doctest.h"
#include "polyvar/fdweights.hpp"

using polyvar::fd::constrained_weights;
using polyvar::fd::weights;

TEST_CASE("central stencils reproduce the classical coefficients") {
  const double h = 0.1;
  std::vector<double> x{-h, 0.0, h};
  auto w2 = weights(0.0, x, 2);
  CHECK(w2[0] == doctest::Approx(1.0 / (h * h)).epsilon(1e-13));
  CHECK(w2[1] == doctest::Approx(-2.0 / (h * h)).epsilon(1e-13));
  CHECK(w2[2] == doctest::Approx(1.0 / (h * h)).epsilon(1e-13));

  std::vector<double> x5{-2 * h, -h, 0.0, h, 2 * h};
  auto w1 = weights(0.0, x5, 1);
  CHECK(w1[0] == doctest::Approx(1.0 / (12 * h)).epsilon(1e-13));
  CHECK(w1[1] == doctest::Approx(-8.0 / (12 * h)).epsilon(1e-13));
  CHECK(w1[2] == doctest::Approx(0.0).scale(1.0 / h));
  CHECK(w1[3] == doctest::Approx(8.0 / (12 * h)).epsilon(1e-13));
  CHECK(w1[4] == doctest::Approx(-1.0 / (12 * h)).epsilon(1e-13));
}

TEST_CASE("stencils are exact on polynomials up to the design degree") {
  const double h = 0.05;
  std::vector<double> x;
  for (int i = 0; i < 6; ++i) x.push_back(i * h);
  // p(t) = t^5 - 2 t^3 + t, evaluated derivative at an off-node point
  auto p = [](double t) { return std::pow(t, 5) - 2 * std::pow(t, 3) + t; };
  auto dp = [](double t) { return 5 * std::pow(t, 4) - 6 * t * t + 1; };
  auto d2p = [](double t) { return 20 * std::pow(t, 3) - 12 * t; };
  const double z = 0.5 * h;
  auto w1 = weights(z, x, 1);
  auto w2 = weights(z, x, 2);
  double s1 = 0, s2 = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    s1 += w1[j] * p(x[j]);
    s2 += w2[j] * p(x[j]);
  }
  CHECK(s1 == doctest::Approx(dp(z)).epsilon(1e-11));
  CHECK(s2 == doctest::Approx(d2p(z)).epsilon(1e-10));
}

TEST_CASE("constrained stencils honor homogeneous boundary conditions") {
  // p(t) = t^2 (1-t)^2 satisfies p(0) = p'(0) = 0; differentiate near 0 using
  // only interior samples plus those two conditions.
  const double h = 0.1;
  auto p = [](double t) { return t * t * (1 - t) * (1 - t); };
  auto d2p = [](double t) { return 2 - 12 * t + 12 * t * t; };
  std::vector<double> x{h, 2 * h, 3 * h, 4 * h};
  auto w = constrained_weights(0.0, 0.0, 2, x, 2);
  double s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * p(x[j]);
  CHECK(s == doctest::Approx(d2p(0.0)).epsilon(1e-11));

  // first derivative at the boundary itself must vanish identically
  auto w1 = constrained_weights(0.0, 0.0, 2, x, 1);
  for (double v : w1) CHECK(std::abs(v) < 1e-12 / h);

  // one condition only: p(1) = 0 for p(t) = (1-t)(t^2+3)
  auto p1 = [](double t) { return (1 - t) * (t * t + 3); };
  auto dp1 = [](double t) { return -(t * t + 3) + (1 - t) * 2 * t; };
  std::vector<double> xs{1 - h, 1 - 2 * h, 1 - 3 * h, 1 - 4 * h, 1 - 5 * h};
  auto wc = constrained_weights(1.0 - h, 1.0, 1, xs, 1);
  double s1 = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) s1 += wc[j] * p1(xs[j]);
  CHECK(s1 == doctest::Approx(dp1(1.0 - h)).epsilon(1e-11));
}
