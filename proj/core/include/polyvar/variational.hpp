#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "polyvar/geometry.hpp"
#include "polyvar/operator.hpp"

namespace polyvar {

// Constraint set H_q = { w clamped : ∫ f |w+h|^q dv = gamma } together with
// the extension field h and the evaluated weight f.
struct ConstraintSpec {
  double q = 0.0;
  double gamma = 0.0;
  DiscreteField extension_h;
  DiscreteField weight_f;
  std::vector<double> quad_weights;
  std::uint64_t geometry_id = 0;
  double two_sharp = 0.0;
  double f_h_q = 0.0;  // ∫ f |h|^q dv
  // set when ∫ f |h|^{2♯} dv >= gamma while the q-level condition still holds
  bool critical_level_warning = false;

  static ConstraintSpec create(double q, double gamma, const DiscreteField& h,
                               const DiscreteField& f, const Geometry& g, double two_sharp);

  // ∫ f |w+h|^q dv for the full nodal field w
  double constraint_value(const DiscreteField& w) const;
  // ∫ f |w+h|^{q-2} (w+h) h dv
  double pairing_with_h(const DiscreteField& w) const;
};

struct IterateInfo {
  int iteration = 0;
  double energy = 0.0;
  double lambda = 0.0;
  double el_residual = 0.0;
  double constraint_defect = 0.0;  // |G(w)-gamma|/gamma
  double holder_lhs = 0.0;         // ∫ f|w+h|^{q-2}(w+h) h dv
  double holder_rhs = 0.0;         // gamma^{1-1/q} (∫ f|h|^q dv)^{1/q}
  double step = 0.0;
};

struct MinimizeOptions {
  double el_tol = 1e-6;
  double constraint_tol = 1e-12;
  int max_iterations = 20000;
  std::optional<DiscreteField> warm_start;
  std::function<void(const IterateInfo&)> observer;
};

struct MinimizeResult {
  DiscreteField w;
  double mu = 0.0;           // I(w)
  double lambda = 0.0;       // multiplier from the closed-form identity
  double el_residual = 0.0;  // relative Euler-Lagrange residual
  int iterations = 0;
  double t_seed = 0.0;
  int sign_changes_of_u = 0;  // for u = w + h
  bool converged = false;
};

struct ContinuationRecord {
  double q = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  double el_residual = 0.0;
  int sign_changes = 0;
  int iterations = 0;
};

struct ContinuationResult {
  std::vector<ContinuationRecord> records;
  double mu_limit_estimate = 0.0;
  bool condition_holds = false;
  bool extrapolated = false;  // false for a single-entry schedule
};

// Scaling t with ∫ f |t ψ₁ + h|^q dv = gamma (doubling bracket + bisection).
double seed_feasible(const EigenPair& psi1, const ConstraintSpec& spec);

// Ray projection: the scale s nearest 1 with ∫ f |s w + h|^q dv = gamma.
double restore_constraint_scale(const DiscreteField& w, const ConstraintSpec& spec);
DiscreteField restore_constraint(const DiscreteField& w, const ConstraintSpec& spec);

// λ = I(w) / (gamma - ∫ f|w+h|^{q-2}(w+h) h dv); the denominator positivity
// (a Hölder consequence of feasibility) is verified on every call.
double lagrange_multiplier(const AssembledOperator& op, const DiscreteField& w,
                           const ConstraintSpec& spec);

// Projected gradient descent on I over H_q from the feasible seed t ψ₁.
MinimizeResult minimize(const AssembledOperator& op, const ConstraintSpec& spec,
                        const EigenPair& psi1, const MinimizeOptions& options = {});

// Warm-started sweep q -> 2♯ with per-q re-validation of the constraint level.
ContinuationResult continuation(const AssembledOperator& op, double gamma,
                                const DiscreteField& extension_h,
                                std::span<const double> q_schedule,
                                const MinimizeOptions& options = {});

// mu_limit / gamma^{2/2♯} < 1 / (f_max^{2/2♯} K₀(n,k))
bool check_condition(double mu_limit, double gamma, double f_max, const SobolevParams& p);

// Adjacent strict sign alternations, ignoring |u_i| below 1e-12 max|u|.
int count_sign_changes(const DiscreteField& u);

}  // namespace polyvar
