#include <cmath>
#include <sstream>

#include "doctest.h"
#include "polyvar/error.hpp"
#include "polyvar/geometry.hpp"

using namespace polyvar;

TEST_CASE("geometry weights integrate to the analytic volume") {
  const Geometry ball = build_geometry(GeomKind::ball, 3, 1.0, 2001);
  double total = 0.0;
  for (double w : ball.weights) total += w;
  CHECK(total == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));

  const Geometry slab = build_geometry(GeomKind::slab, 5, 1.0, 1001);
  total = 0.0;
  for (double w : slab.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // refinement keeps the defect below 1e-8 relative in higher dimension too
  for (int n : {4, 5, 6}) {
    const Geometry g = build_geometry(GeomKind::ball, n, 2.0, 801);
    double t = 0.0;
    for (double w : g.weights) t += w;
    CHECK(t == doctest::Approx(g.volume()).epsilon(1e-8));
  }
}

TEST_CASE("geometry construction guards") {
  CHECK_THROWS_AS(build_geometry(GeomKind::ball, 3, 1.0, 10), Error);
  CHECK_THROWS_AS(build_geometry(GeomKind::ball, 3, 1.0, 100), Error);  // even
  CHECK_THROWS_AS(build_geometry(GeomKind::ball, 3, -1.0, 101), Error);
  CHECK_THROWS_AS(build_geometry(GeomKind::slab, 3, 2.0, 101), Error);  // slab length fixed

  const Geometry g = build_geometry(GeomKind::ball, 3, 2.5, 251);
  CHECK(g.nodes.front() == 0.0);
  CHECK(g.nodes.back() == 2.5);
  for (int i = 1; i < g.node_count(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
  for (double w : g.weights) CHECK(w >= 0.0);
}

TEST_CASE("integrate matches simple closed forms") {
  const Geometry slab = build_geometry(GeomKind::slab, 3, 1.0, 501);
  CHECK(integrate(make_field(slab, [](double) { return 1.0; }), slab) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(make_field(slab, [](double x) { return x * x; }), slab) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const Geometry ball = build_geometry(GeomKind::ball, 3, 1.0, 501);
  CHECK(integrate(make_field(ball, [](double) { return 1.0; }), ball) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));

  DiscreteField wrong = make_field(slab, [](double) { return 1.0; });
  CHECK_THROWS_AS(integrate(wrong, ball), Error);
}

TEST_CASE("field CSV uses the coord,value header and full precision") {
  const Geometry slab = build_geometry(GeomKind::slab, 3, 1.0, 51);
  const DiscreteField u = make_field(slab, [](double x) { return x / 3.0; });
  std::ostringstream os;
  write_field_csv(os, u, slab);
  const std::string text = os.str();
  CHECK(text.rfind("coord,value\n", 0) == 0);
  // 17 significant digits round-trip: 1/3 appears in full
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  // one row per node plus the header
  CHECK(std::count(text.begin(), text.end(), '\n') == 52);
}
