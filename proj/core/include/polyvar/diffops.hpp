#pragma once

#include "polyvar/banded.hpp"
#include "polyvar/geometry.hpp"

namespace polyvar {

// Nodal derivative-evaluation maps on a geometry. Interior rows are 4th-order
// central stencils; ball rows near the origin fold ghost nodes by even
// reflection; rows near an outer boundary use one-sided stencils, or stencils
// constrained by the available homogeneous boundary conditions
// u = u' = ... = u^(c-1) = 0 when `conditions` = c > 0.
class DiffOps {
 public:
  explicit DiffOps(const Geometry& g) : g_(g) {}

  // u -> u' (signed radial derivative)
  BandedMatrix gradient_map(int conditions) const;
  // u -> Δu with Δ the positive Laplacian: -u'' - (n-1)u'/r (ball), -u'' (slab)
  BandedMatrix laplacian_map(int conditions) const;
  // u -> Δ^{i/2}u: Δ^m for i=2m, ∂_r Δ^m for i=2m+1 (signed; callers take the
  // magnitude where the norm convention requires it). clamped_k > 0 threads
  // the order-k clamped conditions through the stages; 0 is the free closure.
  BandedMatrix half_power_map(int i, int clamped_k) const;

 private:
  const Geometry& g_;

  // weights of the m-th derivative at node i, folded/one-sided/constrained
  void derivative_row(BandedMatrix& out, int row, int m, int conditions) const;
};

// Δ^{i/2}u with the free closure; odd i returns |∂_r Δ^m u|.
DiscreteField half_laplacian_power(const DiscreteField& u, int i, const Geometry& g);

// Σ_{i=0}^{k} ‖Δ^{i/2}u‖₂² (free closure)
double hk_norm(const DiscreteField& u, int k, const Geometry& g);

// Largest derivative order the stencil machinery supports (Δ^{i/2} with i <= this).
inline constexpr int kMaxHalfPower = 8;

}  // namespace polyvar
