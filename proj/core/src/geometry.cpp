#include "polyvar/geometry.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "polyvar/error.hpp"
#include "polyvar/gammafn.hpp"

namespace polyvar {

namespace {
std::atomic<std::uint64_t> g_next_geometry_id{1};
}

const char* to_string(GeomKind kind) noexcept {
  return kind == GeomKind::ball ? "ball" : "slab";
}

double Geometry::sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / gamma_fn(0.5 * n); }

double Geometry::volume() const {
  if (kind == GeomKind::ball)
    return std::pow(M_PI, 0.5 * n) * std::pow(radius, n) / gamma_fn(0.5 * n + 1.0);
  return 1.0;
}

Geometry build_geometry(GeomKind kind, int n, double radius, int node_count) {
  require(n >= 1, errc::invalid_params, "dimension must be >= 1");
  require(node_count >= 50, errc::invalid_params, "node_count must be >= 50");
  require(node_count % 2 == 1, errc::invalid_params,
          "node_count must be odd (composite Simpson)");
  if (kind == GeomKind::slab)
    require(radius == 1.0, errc::invalid_params, "slab geometry has fixed length 1");
  else
    require(radius > 0.0 && std::isfinite(radius), errc::invalid_params,
            "ball radius must be positive");

  Geometry g;
  g.kind = kind;
  g.n = n;
  g.radius = radius;
  g.id = g_next_geometry_id.fetch_add(1);
  g.nodes.resize(node_count);
  g.weights.resize(node_count);
  const double h = radius / (node_count - 1);
  const double area = (kind == GeomKind::ball) ? Geometry::sphere_area(n) : 1.0;
  for (int i = 0; i < node_count; ++i) {
    const double r = (i == node_count - 1) ? radius : i * h;
    g.nodes[i] = r;
    double simpson = (i == 0 || i == node_count - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double w = simpson * h / 3.0;
    if (kind == GeomKind::ball) w *= area * std::pow(r, n - 1);
    g.weights[i] = w;
  }
  return g;
}

std::vector<double> form_quadrature_weights(const Geometry& g) {
  const int nn = g.node_count();
  const double h = g.spacing();
  const double area = (g.kind == GeomKind::ball) ? Geometry::sphere_area(g.n) : 1.0;
  std::vector<double> w(nn, h);
  const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int j = 0; j < 3; ++j) {
    w[j] = ends[j] * h;
    w[nn - 1 - j] = ends[j] * h;
  }
  if (g.kind == GeomKind::ball)
    for (int i = 0; i < nn; ++i) w[i] *= area * std::pow(g.nodes[i], g.n - 1);
  return w;
}

DiscreteField make_field(const Geometry& g, const std::function<double(double)>& f) {
  DiscreteField u;
  u.geometry_id = g.id;
  u.values.resize(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) u.values[i] = f(g.nodes[i]);
  return u;
}

DiscreteField zero_field(const Geometry& g) {
  DiscreteField u;
  u.geometry_id = g.id;
  u.values.assign(g.node_count(), 0.0);
  return u;
}

void require_same_geometry(const DiscreteField& u, const Geometry& g) {
  require(u.geometry_id == g.id && u.size() == g.node_count(), errc::geometry_mismatch,
          "field does not belong to this geometry");
}

double integrate(const DiscreteField& u, const Geometry& g) {
  require_same_geometry(u, g);
  double s = 0.0;
  for (int i = 0; i < g.node_count(); ++i) s += g.weights[i] * u.values[i];
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_field_csv(std::ostream& os, const DiscreteField& u, const Geometry& g) {
  require_same_geometry(u, g);
  os << "coord,value\n";
  for (int i = 0; i < g.node_count(); ++i)
    os << format_double(g.nodes[i]) << ',' << format_double(u.values[i]) << '\n';
}

void write_field_csv(const std::string& path, const DiscreteField& u, const Geometry& g) {
  std::ofstream os(path);
  require(os.good(), errc::config_error, "cannot open " + path + " for writing");
  write_field_csv(os, u, g);
}

}  // namespace polyvar
