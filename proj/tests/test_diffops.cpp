#include <cmath>

#include "doctest.h"
#include "polyvar/diffops.hpp"
#include "polyvar/error.hpp"
#include "polyvar/geometry.hpp"

using namespace polyvar;

TEST_CASE("discrete Laplacian is exact on quadratics") {
  const Geometry ball = build_geometry(GeomKind::ball, 3, 1.0, 201);
  const DiscreteField u = make_field(ball, [](double r) { return r * r; });
  const DiscreteField lap = half_laplacian_power(u, 2, ball);
  for (int i = 0; i < ball.node_count(); ++i)
    CHECK(lap.values[i] == doctest::Approx(-6.0).epsilon(1e-8));

  const Geometry slab = build_geometry(GeomKind::slab, 4, 1.0, 201);
  const DiscreteField v = make_field(slab, [](double x) { return x * x; });
  const DiscreteField lap2 = half_laplacian_power(v, 2, slab);
  for (int i = 0; i < slab.node_count(); ++i)
    CHECK(lap2.values[i] == doctest::Approx(-2.0).epsilon(1e-8));
}

TEST_CASE("iterated Laplacian on r^4 reproduces the radial constant") {
  // Δ r⁴ = -(4n+8) r², Δ² r⁴ = (4n+8)(2n)
  const Geometry ball = build_geometry(GeomKind::ball, 5, 1.0, 201);
  const DiscreteField u = make_field(ball, [](double r) { return std::pow(r, 4); });
  const DiscreteField lap2 = half_laplacian_power(u, 4, ball);
  for (int i = 1; i < ball.node_count() - 1; ++i)
    CHECK(lap2.values[i] == doctest::Approx(280.0).epsilon(1e-5));
}

TEST_CASE("odd powers return the derivative magnitude") {
  const Geometry slab = build_geometry(GeomKind::slab, 3, 1.0, 401);
  const DiscreteField u = make_field(slab, [](double x) { return std::sin(M_PI * x); });
  const DiscreteField g = half_laplacian_power(u, 1, slab);
  for (int i = 0; i < slab.node_count(); ++i) {
    const double expect = std::abs(M_PI * std::cos(M_PI * slab.nodes[i]));
    CHECK(g.values[i] == doctest::Approx(expect).epsilon(5e-7).scale(M_PI));
  }
}

TEST_CASE("refinement converges at order >= 2 for smooth fields") {
  auto max_err = [](int nodes, int power) {
    const Geometry g = build_geometry(GeomKind::ball, 3, 1.0, nodes);
    const DiscreteField u = make_field(g, [](double r) { return std::cos(1.5 * r); });
    const DiscreteField v = half_laplacian_power(u, power, g);
    double err = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
      const double r = g.nodes[i];
      double expect;
      if (power == 2) {
        // Δ cos(ar) = a² cos(ar) + (n-1) a sin(ar)/r, positive convention
        const double a = 1.5;
        const double sinc = r == 0.0 ? a * a : a * std::sin(a * r) / r;
        expect = a * a * std::cos(a * r) + 2.0 * sinc;
      } else {
        expect = std::abs(1.5 * std::sin(1.5 * r));
      }
      err = std::max(err, std::abs(v.values[i] - expect));
    }
    return err;
  };
  for (int power : {1, 2}) {
    const double e1 = max_err(101, power);
    const double e2 = max_err(201, power);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 2.0);
  }
}

TEST_CASE("hk_norm sums squared seminorms") {
  const Geometry slab = build_geometry(GeomKind::slab, 3, 1.0, 801);
  const DiscreteField u = make_field(slab, [](double x) { return std::sin(M_PI * x); });
  const double pi2 = M_PI * M_PI;
  CHECK(hk_norm(u, 1, slab) == doctest::Approx(0.5 + 0.5 * pi2).epsilon(0.01));
  CHECK(hk_norm(u, 2, slab) == doctest::Approx(0.5 + 0.5 * pi2 + 0.5 * pi2 * pi2).epsilon(0.01));
  CHECK(hk_norm(zero_field(slab), 1, slab) == doctest::Approx(0.0));
}

TEST_CASE("clamped integration by parts: ∫(Δᵏu)u = ∫(Δ^{k/2}u)²") {
  // smooth fields with clamped boundary behavior up to order k-1
  const Geometry slab = build_geometry(GeomKind::slab, 3, 1.0, 801);
  {
    const DiscreteField u = make_field(slab, [](double x) { return std::sin(M_PI * x); });
    const DiscreteField lap = half_laplacian_power(u, 2, slab);
    double lhs = 0.0;
    for (int i = 0; i < slab.node_count(); ++i)
      lhs += slab.weights[i] * lap.values[i] * u.values[i];
    const DiscreteField du = half_laplacian_power(u, 1, slab);
    double rhs = 0.0;
    for (int i = 0; i < slab.node_count(); ++i)
      rhs += slab.weights[i] * du.values[i] * du.values[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
  {
    // k = 2: u = sin²(πx) has u = u' = 0 at both ends
    const DiscreteField u =
        make_field(slab, [](double x) { return std::pow(std::sin(M_PI * x), 2); });
    const DiscreteField lap2 = half_laplacian_power(u, 4, slab);
    double lhs = 0.0;
    for (int i = 0; i < slab.node_count(); ++i)
      lhs += slab.weights[i] * lap2.values[i] * u.values[i];
    const DiscreteField lap = half_laplacian_power(u, 2, slab);
    double rhs = 0.0;
    for (int i = 0; i < slab.node_count(); ++i)
      rhs += slab.weights[i] * lap.values[i] * lap.values[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
  }
}

TEST_CASE("half-Laplacian guards") {
  const Geometry slab = build_geometry(GeomKind::slab, 3, 1.0, 101);
  const Geometry other = build_geometry(GeomKind::slab, 3, 1.0, 101);
  const DiscreteField u = make_field(slab, [](double x) { return x; });
  CHECK_THROWS_AS(half_laplacian_power(u, -1, slab), Error);
  CHECK_THROWS_AS(half_laplacian_power(u, 9, slab), Error);
  CHECK_THROWS_AS(half_laplacian_power(u, 1, other), Error);
}
