#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace polyvar {

enum class GeomKind { ball, slab };

const char* to_string(GeomKind kind) noexcept;

// 1D-reduced computational domain: the radial profile of a flat ball of
// radius R in dimension n, or the unit slab [0,1] x T^{n-1} with
// transverse-invariant fields. Quadrature weights carry the full measure
// (composite Simpson times r^{n-1} and the sphere area for the ball).
struct Geometry {
  GeomKind kind = GeomKind::slab;
  int n = 0;
  double radius = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::uint64_t id = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  double spacing() const { return nodes[1] - nodes[0]; }
  // 2 pi^{n/2} / Γ(n/2), area of the unit (n-1)-sphere
  static double sphere_area(int n);
  // analytic volume of the domain
  double volume() const;
};

Geometry build_geometry(GeomKind kind, int n, double radius, int node_count);

// 4th-order end-corrected uniform quadrature weights (Gregory rule) times the
// geometry's measure factor. Used for bilinear-form assembly, where Simpson's
// alternating node weights would admit spurious grid-scale modes.
std::vector<double> form_quadrature_weights(const Geometry& g);

struct DiscreteField {
  std::uint64_t geometry_id = 0;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
};

DiscreteField make_field(const Geometry& g, const std::function<double(double)>& f);
DiscreteField zero_field(const Geometry& g);

void require_same_geometry(const DiscreteField& u, const Geometry& g);

// Σ w_i u_i
double integrate(const DiscreteField& u, const Geometry& g);

// CSV with header "coord,value", one row per node, 17 significant digits.
void write_field_csv(std::ostream& os, const DiscreteField& u, const Geometry& g);
void write_field_csv(const std::string& path, const DiscreteField& u, const Geometry& g);

// %.17g formatting used by every CSV emitter.
std::string format_double(double v);

}  // namespace polyvar
