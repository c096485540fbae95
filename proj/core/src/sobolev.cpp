#include "polyvar/sobolev.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "polyvar/diffops.hpp"
#include "polyvar/error.hpp"
#include "polyvar/gammafn.hpp"
#include "polyvar/geometry.hpp"

namespace polyvar {

SobolevParams::SobolevParams(int n_, int k_) : n(n_), k(k_) {
  require(k >= 1, errc::invalid_params, "requires k>=1");
  require(n > 2 * k, errc::invalid_params,
          "requires n>2k (got n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

double SobolevParams::two_sharp() const { return 2.0 * n / (n - 2.0 * k); }

Rational critical_exponent(const SobolevParams& p) {
  long long num = 2LL * p.n;
  long long den = p.n - 2LL * p.k;
  const long long g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

double alpha(const SobolevParams& p) {
  double prod = 1.0;
  for (int l = -p.k; l <= p.k - 1; ++l) prod *= (p.n + 2.0 * l);
  return prod;
}

double inv_k0(const SobolevParams& p) {
  const double lg = log_gamma(0.5 * p.n) - log_gamma(static_cast<double>(p.n));
  return std::pow(M_PI, p.k) * std::exp(2.0 * p.k / p.n * lg) * alpha(p);
}

double k0(const SobolevParams& p) { return 1.0 / inv_k0(p); }

double bubble(double rho, const SobolevParams& p) {
  require(rho >= 0.0, errc::invalid_params, "bubble radius must be nonnegative");
  const double s = p.n - 2.0 * p.k;
  return std::pow(alpha(p), s / (4.0 * p.k)) * std::pow(1.0 + rho * rho, -0.5 * s);
}

namespace {

// |∇u₀| for k = 1: magnitude of α^β s ρ (1+ρ²)^{-s/2-1}
double bubble_grad_mag(double rho, const SobolevParams& p) {
  const double s = p.n - 2.0 * p.k;
  const double beta = s / (4.0 * p.k);
  return std::pow(alpha(p), beta) * s * rho * std::pow(1.0 + rho * rho, -0.5 * s - 1.0);
}

// Δu₀ for k = 2 (positive Laplacian): α^β s (1+ρ²)^{-s/2-2} (n + (n-s-2)ρ²)
double bubble_laplacian(double rho, const SobolevParams& p) {
  const double s = p.n - 2.0 * p.k;
  const double beta = s / (4.0 * p.k);
  const double t = 1.0 + rho * rho;
  return std::pow(alpha(p), beta) * s * std::pow(t, -0.5 * s - 2.0) *
         (p.n + (p.n - s - 2.0) * rho * rho);
}

}  // namespace

double bubble_rayleigh_quotient(const SobolevParams& p, double truncation_radius,
                                int node_count) {
  require(truncation_radius > 0.0 && std::isfinite(truncation_radius), errc::invalid_params,
          "truncation radius must be positive");
  require(node_count >= 100, errc::invalid_params, "node_count must be >= 100");
  if (node_count % 2 == 0) ++node_count;

  const Geometry g = build_geometry(GeomKind::ball, p.n, truncation_radius, node_count);
  const double ts = p.two_sharp();

  std::vector<double> deriv(g.node_count());
  if (p.k == 1) {
    for (int i = 0; i < g.node_count(); ++i) deriv[i] = bubble_grad_mag(g.nodes[i], p);
  } else if (p.k == 2) {
    for (int i = 0; i < g.node_count(); ++i) deriv[i] = bubble_laplacian(g.nodes[i], p);
  } else {
    DiscreteField u0 = make_field(g, [&](double r) { return bubble(r, p); });
    DiscreteField d = half_laplacian_power(u0, p.k, g);
    deriv = d.values;
  }

  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    num += g.weights[i] * deriv[i] * deriv[i];
    den += g.weights[i] * std::pow(bubble(g.nodes[i], p), ts);
  }
  const double q = num / std::pow(den, 2.0 / ts);
  require(std::isfinite(q) && den > 0.0, errc::quadrature_failure,
          "non-finite Rayleigh quotient");
  return q;
}

}  // namespace polyvar
