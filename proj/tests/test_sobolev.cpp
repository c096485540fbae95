#include <cmath>

#include "doctest.h"
#include "polyvar/error.hpp"
#include "polyvar/gammafn.hpp"
#include "polyvar/sobolev.hpp"
#include "support/oracles.hpp"

using namespace polyvar;

TEST_CASE("critical exponent is the exact rational 2n/(n-2k)") {
  CHECK(critical_exponent(SobolevParams(3, 1)).num == 6);
  CHECK(critical_exponent(SobolevParams(3, 1)).den == 1);
  CHECK(critical_exponent(SobolevParams(5, 2)).num == 10);
  CHECK(critical_exponent(SobolevParams(5, 2)).den == 1);
  CHECK(critical_exponent(SobolevParams(7, 2)).num == 14);
  CHECK(critical_exponent(SobolevParams(7, 2)).den == 3);
  CHECK_THROWS_AS(SobolevParams(4, 2), Error);   // n = 2k excluded
  CHECK_THROWS_AS(SobolevParams(3, 0), Error);
  CHECK_THROWS_AS(SobolevParams(2, 1), Error);

  // strictly decreasing in n at fixed k
  for (int k = 1; k <= 3; ++k) {
    double prev = 1e300;
    for (int n = 2 * k + 1; n <= 2 * k + 6; ++n) {
      const double ts = SobolevParams(n, k).two_sharp();
      CHECK(ts > 2.0);
      CHECK(ts < prev);
      prev = ts;
    }
  }
}

TEST_CASE("alpha product values and positivity") {
  CHECK(alpha(SobolevParams(3, 1)) == doctest::Approx(3.0));
  CHECK(alpha(SobolevParams(5, 2)) == doctest::Approx(105.0));
  CHECK(alpha(SobolevParams(6, 1)) == doctest::Approx(24.0));
  for (int k = 1; k <= 4; ++k)
    for (int n = 2 * k + 1; n <= 2 * k + 8; ++n) CHECK(alpha(SobolevParams(n, k)) > 0.0);
}

TEST_CASE("log-gamma matches the exact factorial identities to 1e-13") {
  // Γ(m) = (m-1)!
  long double fact = 1.0L;
  for (int m = 2; m <= 12; ++m) {
    fact *= (m - 1);
    CHECK(std::abs(gamma_fn(m) - static_cast<double>(fact)) <=
          1e-13 * static_cast<double>(fact));
  }
  // Γ(m + 1/2) = (2m)!√π / (4^m m!)
  for (int m = 0; m <= 8; ++m) {
    const long double exact = oracles::gamma_half_integer(2 * m + 1);
    CHECK(std::abs(gamma_fn(m + 0.5) - static_cast<double>(exact)) <=
          1e-13 * static_cast<double>(exact));
  }
}

TEST_CASE("Swanson constant against the extended-precision oracle") {
  const struct {
    int n, k;
    double approx;  // coarse literals from the closed form
  } cases[] = {
      {4, 1, 10.2591},
      {3, 1, 5.4775},
      {6, 2, 247.23},
      {5, 1, 14.8114},
      {5, 2, 102.38},
  };
  for (const auto& c : cases) {
    const double value = inv_k0(SobolevParams(c.n, c.k));
    const double oracle = static_cast<double>(oracles::swanson_value(c.n, c.k));
    CHECK(std::abs(value - oracle) <= 1e-12 * oracle);
    CHECK(value == doctest::Approx(c.approx).epsilon(5e-4));
    CHECK(k0(SobolevParams(c.n, c.k)) == doctest::Approx(1.0 / oracle).epsilon(1e-12));
  }
  // inv_K0(4,1) = 8π/√6 in closed form
  CHECK(inv_k0(SobolevParams(4, 1)) ==
        doctest::Approx(8.0 * M_PI / std::sqrt(6.0)).epsilon(1e-14));
}

TEST_CASE("bubble profile values, decay and monotonicity") {
  const SobolevParams p31(3, 1);
  CHECK(bubble(0.0, p31) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  CHECK(bubble(1.0, p31) ==
        doctest::Approx(std::pow(3.0, 0.25) / std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(bubble(-0.5, p31), Error);

  // decays like rho^{-(n-2k)}
  for (const auto& p : {SobolevParams(3, 1), SobolevParams(5, 2), SobolevParams(6, 1)}) {
    const double s = p.n - 2.0 * p.k;
    const double ratio = bubble(2e4, p) / bubble(1e4, p);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -s)).epsilon(1e-6));
    double prev = bubble(0.0, p);
    for (double rho = 0.1; rho < 5.0; rho += 0.1) {
      const double v = bubble(rho, p);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("bubble Rayleigh quotient approaches the closed-form constant") {
  const SobolevParams p31(3, 1);
  const SobolevParams p52(5, 2);
  const double target31 = inv_k0(p31);
  const double target52 = inv_k0(p52);

  CHECK(bubble_rayleigh_quotient(p31, 100.0, 4001) ==
        doctest::Approx(target31).epsilon(0.02));
  CHECK(bubble_rayleigh_quotient(p52, 100.0, 4001) ==
        doctest::Approx(target52).epsilon(0.02));

  // monotone in the truncation radius
  const SobolevParams p41(4, 1);
  const double q20 = bubble_rayleigh_quotient(p41, 20.0, 2001);
  const double q40 = bubble_rayleigh_quotient(p41, 40.0, 4001);
  const double q80 = bubble_rayleigh_quotient(p41, 80.0, 8001);
  const double target41 = inv_k0(p41);
  CHECK(q20 < q40);
  CHECK(q40 < q80);
  CHECK(q80 < target41);

  // grid refinement at fixed radius moves the value toward the constant
  for (const auto& p : {p31, p52}) {
    const double ref = inv_k0(p);
    const double coarse = bubble_rayleigh_quotient(p, 50.0, 101);
    const double fine = bubble_rayleigh_quotient(p, 50.0, 201);
    CHECK(std::abs(fine - ref) < std::abs(coarse - ref));
  }

  CHECK_THROWS_AS(bubble_rayleigh_quotient(p31, -1.0, 4001), Error);
  CHECK_THROWS_AS(bubble_rayleigh_quotient(p31, 10.0, 50), Error);
}
