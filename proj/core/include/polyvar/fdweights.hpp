#pragma once

#include <span>
#include <vector>

namespace polyvar::fd {

// Finite-difference weights for the m-th derivative at z from samples at x
// (Fornberg's recursion). Exact for polynomials of degree < x.size().
std::vector<double> weights(double z, std::span<const double> x, int m);

// Weights for the m-th derivative at z where the interpolant additionally
// satisfies c homogeneous conditions p(b) = p'(b) = ... = p^(c-1)(b) = 0.
// The sample points x must exclude b when c > 0. Exact for polynomials of
// degree < c + x.size() that satisfy the conditions.
std::vector<double> constrained_weights(double z, double b, int c,
                                        std::span<const double> x, int m);

}  // namespace polyvar::fd
