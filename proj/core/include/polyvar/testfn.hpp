#pragma once

#include <span>
#include <vector>

#include "polyvar/geometry.hpp"
#include "polyvar/operator.hpp"
#include "polyvar/sobolev.hpp"

namespace polyvar {

// Concentration profile η(r) (ε/(ε²+r²))^{(n-2k)/2} on a ball, cutoff 1 on
// [0,δ], 0 on [2δ,R], polynomial smoothstep of the given order in between.
struct TestFunctionSpec {
  double epsilon = 0.0;
  double delta = 0.0;
  int cutoff_order = 0;

  static TestFunctionSpec defaults(double epsilon, const Geometry& g, const SobolevParams& p);
  void validate(const Geometry& g) const;
};

struct QuotientRecord {
  double epsilon = 0.0;
  double mu = 0.0;           // I(u_ε)
  double lower_order = 0.0;  // the Σ_l ∫ a_l (Δ^{l/2}u_ε)² part alone
  double gamma = 0.0;        // ∫ f |u_ε|^{2♯} dv
  double Q = 0.0;            // mu / gamma^{2/2♯}
};

struct LimitStudy {
  std::vector<QuotientRecord> records;  // decreasing ε
  double limit = 0.0;                   // extrapolated Q
  double target = 0.0;                  // 1/(f(x₀)^{2/2♯} K₀)
  double gap = 0.0;                     // limit - target
  double fit_power = 0.0;               // ε power used by the fit (0 when not extrapolated)
  bool extrapolated = false;
};

// Monotone C^order transition, 1 at t<=0 and 0 at t>=1.
double smoothstep_down(int order, double t);

DiscreteField build_test_function(const TestFunctionSpec& spec, const SobolevParams& p,
                                  const Geometry& g);

QuotientRecord quotient_record(const DiscreteField& u_eps, const AssembledOperator& op,
                               const SobolevParams& p);

LimitStudy limit_study(std::span<const double> eps_list, const TestFunctionSpec& tmpl,
                       const AssembledOperator& op, const SobolevParams& p);

}  // namespace polyvar
