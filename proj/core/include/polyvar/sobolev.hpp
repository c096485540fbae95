#pragma once

#include <cstdint>

namespace polyvar {

struct Rational {
  long long num = 0;
  long long den = 1;  // reduced form, den > 0
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Dimension/order pair (n, k) with k >= 1 and n > 2k.
struct SobolevParams {
  int n = 0;
  int k = 0;

  SobolevParams(int n_, int k_);

  double two_sharp() const;  // 2n/(n-2k)
};

// 2n/(n-2k) as an exact reduced fraction.
Rational critical_exponent(const SobolevParams& p);

// ∏_{l=-k}^{k-1} (n + 2l)
double alpha(const SobolevParams& p);

// π^k (Γ(n/2)/Γ(n))^{2k/n} ∏_{h=-k}^{k-1}(n+2h), the reciprocal of the best
// constant in the Euclidean inequality ‖u‖²_{2♯} <= K ‖Δ^{k/2}u‖²₂.
double inv_k0(const SobolevParams& p);
double k0(const SobolevParams& p);

// Extremal radial profile α^{(n-2k)/(4k)} (1+ρ²)^{-(n-2k)/2}.
double bubble(double rho, const SobolevParams& p);

// ∫(Δ^{k/2}u₀)² dx / (∫|u₀|^{2♯} dx)^{2/2♯} by radial Simpson quadrature on
// [0, truncation_radius]; derivatives analytic for k <= 2, grid stencils
// otherwise. An even node_count is bumped to the next odd value.
double bubble_rayleigh_quotient(const SobolevParams& p, double truncation_radius,
                                int node_count);

}  // namespace polyvar
