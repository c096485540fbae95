#include "polyvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyvar/error.hpp"

namespace polyvar {

namespace {

// |x|^{e-1} x for e > 1 (the nonlinearity f |u|^{q-2} u uses e = q-1)
double pow_signed(double x, double e) {
  if (x == 0.0) return 0.0;
  const double m = std::pow(std::abs(x), e);
  return x > 0.0 ? m : -m;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

ConstraintSpec ConstraintSpec::create(double q, double gamma, const DiscreteField& h,
                                      const DiscreteField& f, const Geometry& g,
                                      double two_sharp) {
  require_same_geometry(h, g);
  require_same_geometry(f, g);
  require(std::isfinite(q) && q > 2.0 && q <= two_sharp, errc::invalid_params,
          "exponent must satisfy 2 < q <= 2#");
  require(std::isfinite(gamma) && gamma > 0.0, errc::invalid_params,
          "constraint level gamma must be positive");

  ConstraintSpec spec;
  spec.q = q;
  spec.gamma = gamma;
  spec.extension_h = h;
  spec.weight_f = f;
  spec.quad_weights = g.weights;
  spec.geometry_id = g.id;
  spec.two_sharp = two_sharp;

  double fhq = 0.0, fh2s = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    const double ah = std::abs(h.values[i]);
    fhq += g.weights[i] * f.values[i] * std::pow(ah, q);
    fh2s += g.weights[i] * f.values[i] * std::pow(ah, two_sharp);
  }
  spec.f_h_q = fhq;
  require(gamma > fhq, errc::invalid_params,
          "gamma must exceed the extension level integral (gamma > ∫ f|h|^q dv)");
  spec.critical_level_warning = fh2s >= gamma;
  return spec;
}

double ConstraintSpec::constraint_value(const DiscreteField& w) const {
  require(w.geometry_id == geometry_id, errc::geometry_mismatch, "field/constraint mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < quad_weights.size(); ++i) {
    const double u = w.values[i] + extension_h.values[i];
    s += quad_weights[i] * weight_f.values[i] * std::pow(std::abs(u), q);
  }
  return s;
}

double ConstraintSpec::pairing_with_h(const DiscreteField& w) const {
  require(w.geometry_id == geometry_id, errc::geometry_mismatch, "field/constraint mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < quad_weights.size(); ++i) {
    const double u = w.values[i] + extension_h.values[i];
    s += quad_weights[i] * weight_f.values[i] * pow_signed(u, q - 1.0) * extension_h.values[i];
  }
  return s;
}

// ---------------------------------------------------------------------------

double seed_feasible(const EigenPair& psi1, const ConstraintSpec& spec) {
  require(psi1.psi1.geometry_id == spec.geometry_id, errc::geometry_mismatch,
          "eigenfunction/constraint geometry mismatch");
  DiscreteField scaled = psi1.psi1;
  auto F = [&](double t) {
    for (int i = 0; i < scaled.size(); ++i) scaled.values[i] = t * psi1.psi1.values[i];
    return spec.constraint_value(scaled);
  };

  double t_lo = 0.0, t_hi = 1.0;
  double f_hi = F(t_hi);
  while (f_hi < spec.gamma) {
    t_lo = t_hi;
    t_hi *= 2.0;
    require(t_hi <= 1e12, errc::no_bracket,
            "constraint level not reachable along the eigenfunction ray (mis-scaled config?)");
    f_hi = F(t_hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid == t_lo || mid == t_hi) break;
    (F(mid) < spec.gamma ? t_lo : t_hi) = mid;
  }
  const double t = 0.5 * (t_lo + t_hi);
  require(std::abs(F(t) - spec.gamma) <= 1e-12 * spec.gamma, errc::no_bracket,
          "bisection could not match the constraint level");
  return t;
}

double restore_constraint_scale(const DiscreteField& w, const ConstraintSpec& spec) {
  DiscreteField scaled = w;
  auto G = [&](double s) {
    for (int i = 0; i < scaled.size(); ++i) scaled.values[i] = s * w.values[i];
    return spec.constraint_value(scaled);
  };
  auto Gprime = [&](double s) {
    double d = 0.0;
    for (std::size_t i = 0; i < spec.quad_weights.size(); ++i) {
      const double u = s * w.values[i] + spec.extension_h.values[i];
      d += spec.quad_weights[i] * spec.weight_f.values[i] * spec.q * pow_signed(u, spec.q - 1.0) *
           w.values[i];
    }
    return d;
  };

  const double g1 = G(1.0);
  if (std::abs(g1 - spec.gamma) <= 1e-14 * spec.gamma) return 1.0;

  double s_lo, s_hi;
  if (g1 < spec.gamma) {
    s_lo = 1.0;
    s_hi = 2.0;
    while (G(s_hi) < spec.gamma) {
      s_lo = s_hi;
      s_hi *= 2.0;
      require(s_hi <= 1e12, errc::no_bracket, "constraint level not reachable along this ray");
    }
  } else {
    s_hi = 1.0;
    s_lo = 0.5;
    while (G(s_lo) > spec.gamma) {
      s_hi = s_lo;
      s_lo *= 0.5;
      require(s_lo >= 1e-12, errc::no_bracket, "no projection scale below 1 on this ray");
    }
  }

  // Safeguarded Newton within the bracket, bisection fallback.
  double s = 0.5 * (s_lo + s_hi);
  for (int it = 0; it < 200; ++it) {
    const double phi = G(s) - spec.gamma;
    if (std::abs(phi) <= 1e-13 * spec.gamma) return s;
    (phi < 0.0 ? s_lo : s_hi) = s;
    const double dphi = Gprime(s);
    double s_next = (dphi != 0.0) ? s - phi / dphi : 0.5 * (s_lo + s_hi);
    if (!(s_next > s_lo && s_next < s_hi)) s_next = 0.5 * (s_lo + s_hi);
    if (s_next == s) s_next = 0.5 * (s_lo + s_hi);
    s = s_next;
  }
  require(std::abs(G(s) - spec.gamma) <= 1e-12 * spec.gamma, errc::no_bracket,
          "projection root-finding stalled");
  return s;
}

DiscreteField restore_constraint(const DiscreteField& w, const ConstraintSpec& spec) {
  const double s = restore_constraint_scale(w, spec);
  DiscreteField out = w;
  for (double& v : out.values) v *= s;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct MultiplierParts {
  double lambda = 0.0;
  double pairing = 0.0;
  double holder_bound = 0.0;
};

MultiplierParts multiplier_parts(double energy, const DiscreteField& w,
                                 const ConstraintSpec& spec) {
  const double pairing = spec.pairing_with_h(w);
  const double bound =
      std::pow(spec.gamma, 1.0 - 1.0 / spec.q) * std::pow(spec.f_h_q, 1.0 / spec.q);
  require(pairing <= bound + 1e-9 * (bound + spec.gamma), errc::nonpositive_denominator,
          "Hölder bound violated: the field is not feasible for this constraint");
  const double denom = spec.gamma - pairing;
  require(denom > 0.0, errc::nonpositive_denominator,
          "multiplier denominator not positive (infeasible field?)");
  return {energy / denom, pairing, bound};
}

}  // namespace

double lagrange_multiplier(const AssembledOperator& op, const DiscreteField& w,
                           const ConstraintSpec& spec) {
  require(spec.geometry_id == op.geometry().id, errc::geometry_mismatch,
          "operator/constraint geometry mismatch");
  const double energy = op.quadratic_form(w);
  return multiplier_parts(energy, w, spec).lambda;
}

MinimizeResult minimize(const AssembledOperator& op, const ConstraintSpec& spec,
                        const EigenPair& psi1, const MinimizeOptions& options) {
  require(spec.geometry_id == op.geometry().id, errc::geometry_mismatch,
          "operator/constraint geometry mismatch");
  require(op.coercivity_check().coercive, errc::not_coercive,
          "minimize requires a coercive operator");
  require(spec.q < spec.two_sharp, errc::invalid_params,
          "minimize requires a strictly subcritical exponent q < 2#");

  const int m = op.free_count();
  const auto& g = op.geometry();
  const int fb = op.free_begin();

  const double t_seed = seed_feasible(psi1, spec);
  std::vector<double> x = op.extract_free(psi1.psi1);
  for (double& v : x) v *= t_seed;

  if (options.warm_start) {
    try {
      DiscreteField warm = restore_constraint(*options.warm_start, spec);
      auto xw = op.extract_free(warm);
      if (op.quadratic_form_free(xw) < op.quadratic_form_free(x)) x = std::move(xw);
    } catch (const Error&) {
      // unusable warm start; fall back to the eigenfunction seed
    }
  }

  std::vector<double> ax(m), grad(m), cand(m), r(m);
  DiscreteField w_full = op.embed_free(x);
  auto refresh_full = [&](const std::vector<double>& v) {
    std::fill(w_full.values.begin(), w_full.values.end(), 0.0);
    std::copy(v.begin(), v.end(), w_full.values.begin() + fb);
  };

  auto el_residual_of = [&](const std::vector<double>& axv, double lambda) {
    double rnorm = 0.0, anorm = 0.0;
    for (int i = 0; i < m; ++i) {
      const double u = w_full.values[fb + i] + spec.extension_h.values[fb + i];
      const double nl = g.weights[fb + i] * spec.weight_f.values[fb + i] *
                        pow_signed(u, spec.q - 1.0);
      const double ri = axv[i] - lambda * nl;
      rnorm += ri * ri;
      anorm += axv[i] * axv[i];
    }
    return std::sqrt(rnorm) / std::max(std::sqrt(anorm), 1e-300);
  };

  MinimizeResult res;
  res.t_seed = t_seed;
  double eta = 1.0;
  int iter = 0;
  bool converged = false;
  double energy = 0.0, lambda = 0.0, el = 0.0;

  for (iter = 1; iter <= options.max_iterations; ++iter) {
    op.apply_form(x, ax);
    energy = 0.0;
    for (int i = 0; i < m; ++i) energy += x[i] * ax[i];
    refresh_full(x);

    const auto parts = multiplier_parts(energy, w_full, spec);
    lambda = parts.lambda;
    el = el_residual_of(ax, lambda);

    if (options.observer) {
      IterateInfo info;
      info.iteration = iter;
      info.energy = energy;
      info.lambda = lambda;
      info.el_residual = el;
      info.constraint_defect =
          std::abs(spec.constraint_value(w_full) - spec.gamma) / spec.gamma;
      info.holder_lhs = parts.pairing;
      info.holder_rhs = parts.holder_bound;
      info.step = eta;
      options.observer(info);
    }

    if (el <= options.el_tol) {
      converged = true;
      break;
    }

    // Riesz gradient in the discrete H²_k inner product
    for (int i = 0; i < m; ++i) grad[i] = 2.0 * ax[i];
    op.hk_solve_in_place(grad);
    double slope = 0.0;
    for (int i = 0; i < m; ++i) slope += 2.0 * ax[i] * grad[i];
    if (!(slope > 0.0)) break;  // stationary for the metric; covered by the el check

    bool accepted = false;
    double eta_try = eta;
    for (int bt = 0; bt < 60 && !accepted; ++bt, eta_try *= 0.5) {
      for (int i = 0; i < m; ++i) cand[i] = x[i] - eta_try * grad[i];
      DiscreteField cand_full = op.embed_free(cand);
      double s;
      try {
        s = restore_constraint_scale(cand_full, spec);
      } catch (const Error&) {
        continue;  // projection lost the bracket; shorten the step
      }
      for (int i = 0; i < m; ++i) cand[i] *= s;
      const double energy_new = op.quadratic_form_free(cand);
      if (energy_new <= energy - 1e-4 * eta_try * slope) {
        x = cand;
        eta = std::min(eta_try * 1.5, 1e6);
        accepted = true;
      }
    }
    if (!accepted) break;  // no descent step available
  }

  refresh_full(x);
  res.w = w_full;
  res.mu = energy;
  res.lambda = lambda;
  res.el_residual = el;
  res.iterations = std::min(iter, options.max_iterations);
  res.converged = converged;

  DiscreteField u = w_full;
  for (int i = 0; i < u.size(); ++i) u.values[i] += spec.extension_h.values[i];
  res.sign_changes_of_u = count_sign_changes(u);
  return res;
}

ContinuationResult continuation(const AssembledOperator& op, double gamma,
                                const DiscreteField& extension_h,
                                std::span<const double> q_schedule,
                                const MinimizeOptions& options) {
  require(!q_schedule.empty(), errc::invalid_params, "empty continuation schedule");
  const double two_sharp = op.spec().params.two_sharp();
  for (std::size_t i = 0; i < q_schedule.size(); ++i) {
    require(q_schedule[i] > 2.0 && q_schedule[i] < two_sharp, errc::invalid_params,
            "schedule exponents must lie strictly inside (2, 2#)");
    if (i > 0)
      require(q_schedule[i] > q_schedule[i - 1], errc::invalid_params,
              "schedule must be strictly increasing");
  }

  bool pure = true;
  for (const auto& a : op.spec().lower_order) pure = pure && a.is_identically_zero();
  const EigenPair psi1 = pure
                             ? op.first_eigenpair()
                             : assemble(OperatorSpec::pure(op.spec().params), op.geometry())
                                   .first_eigenpair();

  ContinuationResult out;
  MinimizeOptions opts = options;
  for (double q : q_schedule) {
    const ConstraintSpec spec = ConstraintSpec::create(q, gamma, extension_h, op.f_values(),
                                                       op.geometry(), two_sharp);
    MinimizeResult r = minimize(op, spec, psi1, opts);
    if (!r.converged)
      fail(errc::no_convergence,
           "minimize did not reach the EL tolerance at q=" + format_double(q));
    out.records.push_back(
        {q, r.mu, r.lambda, r.el_residual, r.sign_changes_of_u, r.iterations});
    opts.warm_start = r.w;
  }

  const std::size_t nrec = out.records.size();
  if (nrec == 1) {
    out.mu_limit_estimate = out.records[0].mu;
    out.extrapolated = false;
  } else {
    // least-squares line mu = a + b (2# - q) over the last three points
    const std::size_t first = nrec >= 3 ? nrec - 3 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int np = 0;
    for (std::size_t i = first; i < nrec; ++i) {
      const double xq = two_sharp - out.records[i].q;
      sx += xq;
      sy += out.records[i].mu;
      sxx += xq * xq;
      sxy += xq * out.records[i].mu;
      ++np;
    }
    const double det = np * sxx - sx * sx;
    out.mu_limit_estimate = (det != 0.0) ? (sy * sxx - sx * sxy) / det : sy / np;
    out.extrapolated = true;
  }
  out.condition_holds =
      check_condition(out.mu_limit_estimate, gamma, op.f_max(), op.spec().params);
  return out;
}

bool check_condition(double mu_limit, double gamma, double f_max, const SobolevParams& p) {
  require(mu_limit > 0.0 && gamma > 0.0 && f_max > 0.0 && std::isfinite(mu_limit) &&
              std::isfinite(gamma) && std::isfinite(f_max),
          errc::invalid_params, "check_condition requires positive finite arguments");
  const double e = 2.0 / p.two_sharp();
  return mu_limit / std::pow(gamma, e) < inv_k0(p) / std::pow(f_max, e);
}

int count_sign_changes(const DiscreteField& u) {
  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  const double tol = 1e-12 * umax;
  int count = 0;
  int last = 0;
  for (double v : u.values) {
    if (std::abs(v) <= tol) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace polyvar
