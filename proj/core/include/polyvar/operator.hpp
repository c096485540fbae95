#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polyvar/banded.hpp"
#include "polyvar/diffops.hpp"
#include "polyvar/geometry.hpp"
#include "polyvar/sobolev.hpp"

namespace polyvar {

// Radial coefficient profile: constant c, polynomial in r, or a gaussian bump
// amplitude*exp(-(r/width)^2) + offset.
struct RadialProfile {
  enum class Kind { constant, polynomial, gaussian };
  Kind kind = Kind::constant;
  std::vector<double> coeffs{0.0};

  double operator()(double r) const;
  bool is_identically_zero() const;

  static RadialProfile constant(double c);
  static RadialProfile polynomial(std::vector<double> c);
  static RadialProfile gaussian(double amplitude, double width, double offset = 0.0);
  // "constant:c" | "poly:c0,c1,..." | "gaussian:amplitude,width[,offset]"
  static RadialProfile parse(std::string_view text);
  std::string str() const;
};

struct OperatorSpec {
  SobolevParams params;
  std::vector<RadialProfile> lower_order;  // exactly k entries a_0 .. a_{k-1}
  RadialProfile weight_f = RadialProfile::constant(1.0);

  // Pure polyharmonic operator Δ^k (all lower-order coefficients zero).
  static OperatorSpec pure(SobolevParams p);
};

// Boundary scalars (value, normal derivative, ..., (k-1)-th normal derivative)
// per boundary component: ball has one component (outer sphere), slab two
// (left, right). Normal derivatives are taken along the outward normal.
struct BoundaryData {
  std::vector<std::vector<double>> components;

  static BoundaryData zeros(GeomKind kind, int k);
};

struct EigenPair {
  double lambda1 = 0.0;
  DiscreteField psi1;
};

struct CoercivityReport {
  double lambda = 0.0;  // smallest generalized eigenvalue of the form vs the H²_k Gram
  bool coercive = false;
};

// Divergence-form operator assembled as a quadratic form on clamped fields:
// I(w) = ∫(Δ^{k/2}w)² dv + Σ_l ∫ a_l(r) (Δ^{l/2}w)² dv.
class AssembledOperator {
 public:
  const Geometry& geometry() const { return g_; }
  const OperatorSpec& spec() const { return spec_; }
  int free_begin() const { return free_begin_; }
  int free_count() const { return free_count_; }

  std::vector<double> extract_free(const DiscreteField& w, bool check_admissible = true) const;
  DiscreteField embed_free(std::span<const double> x) const;

  void apply_form(std::span<const double> x, std::span<double> y) const;  // y = A x
  double quadratic_form_free(std::span<const double> x) const;
  double quadratic_form(const DiscreteField& w) const;
  // {leading Δ^{k/2} part, lower-order part} of the quadratic form
  std::pair<double, double> form_split(const DiscreteField& w) const;

  double hk_gram_norm_free(std::span<const double> x) const;  // x^T B x
  void hk_solve_in_place(std::span<double> x) const;          // x <- B^{-1} x
  std::span<const double> free_weights() const { return free_w_; }
  const BandedMatrix& form_matrix() const { return form_; }
  const BandedMatrix& hk_gram() const { return gram_; }
  const DiscreteField& f_values() const { return f_values_; }
  double f_max() const;
  double form_symmetry_defect() const;

  CoercivityReport coercivity_check() const { return coercivity_; }
  DiscreteField q_curvature() const;
  DiscreteField harmonic_extension(const BoundaryData& bd) const;
  // Relative weak-form residual of P_g h = 0 against clamped test functions.
  double extension_weak_residual(const DiscreteField& h) const;
  EigenPair first_eigenpair() const;  // requires all a_l identically zero

  friend AssembledOperator assemble(const OperatorSpec& spec, const Geometry& g);

 private:
  AssembledOperator() = default;

  std::vector<double> weak_pairing(const DiscreteField& u) const;  // free-row pairing of P_g u
  std::vector<double> weak_pairing_scale(const DiscreteField& u) const;

  Geometry g_;
  OperatorSpec spec_{SobolevParams(3, 1), {}, RadialProfile::constant(1.0)};
  int free_begin_ = 0;
  int free_count_ = 0;
  std::vector<BandedMatrix> dmaps_cl_;  // Δ^{i/2} maps with the clamped closure, i = 0..k
  BandedMatrix form_;
  BandedMatrix form_leading_;
  BandedMatrix gram_;
  std::vector<double> form_w_;  // form-assembly quadrature weights, all nodes
  std::vector<double> free_w_;  // the same weights on the free nodes (mass pairing)
  DiscreteField f_values_;
  CoercivityReport coercivity_;
  std::shared_ptr<const BandedCholesky> gram_chol_;
  std::shared_ptr<const BandedCholesky> form_chol_;  // present iff coercive
};

AssembledOperator assemble(const OperatorSpec& spec, const Geometry& g);

}  // namespace polyvar
