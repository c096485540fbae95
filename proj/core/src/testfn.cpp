#include "polyvar/testfn.hpp"

#include <algorithm>
#include <cmath>

#include "polyvar/error.hpp"

namespace polyvar {

double smoothstep_down(int order, double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  // S_m(t) = t^{m+1} Σ_{j=0}^{m} C(m+j, j) C(2m+1, m-j) (-t)^j
  const int m = order;
  long double s = 0.0L;
  long double c_mj = 1.0L;  // C(m+j, j)
  for (int j = 0; j <= m; ++j) {
    if (j > 0) c_mj = c_mj * (m + j) / j;
    long double c_top = 1.0L;  // C(2m+1, m-j)
    for (int i = 1; i <= m - j; ++i) c_top = c_top * (2 * m + 2 - i) / i;
    long double term = c_mj * c_top;
    for (int i = 0; i < j; ++i) term *= -t;
    s += term;
  }
  for (int i = 0; i <= m; ++i) s *= t;
  return 1.0 - static_cast<double>(s);
}

TestFunctionSpec TestFunctionSpec::defaults(double epsilon, const Geometry& g,
                                            const SobolevParams& p) {
  return TestFunctionSpec{epsilon, g.radius / 4.0, 2 * p.k + 1};
}

void TestFunctionSpec::validate(const Geometry& g) const {
  require(g.kind == GeomKind::ball, errc::wrong_geometry,
          "test functions live on a ball geometry");
  require(epsilon > 0.0 && std::isfinite(epsilon), errc::invalid_params,
          "epsilon must be positive");
  require(delta > 0.0 && 2.0 * delta <= g.radius, errc::invalid_params,
          "cutoff needs 0 < delta and 2 delta <= R");
  require(cutoff_order >= 1, errc::invalid_params, "cutoff order must be >= 1");
}

DiscreteField build_test_function(const TestFunctionSpec& spec, const SobolevParams& p,
                                  const Geometry& g) {
  spec.validate(g);
  require(g.n == p.n, errc::invalid_params, "geometry dimension does not match params");
  const double s = 0.5 * (p.n - 2.0 * p.k);
  return make_field(g, [&](double r) {
    const double eta = smoothstep_down(spec.cutoff_order, (r - spec.delta) / spec.delta);
    if (eta == 0.0) return 0.0;
    return eta * std::pow(spec.epsilon / (spec.epsilon * spec.epsilon + r * r), s);
  });
}

QuotientRecord quotient_record(const DiscreteField& u_eps, const AssembledOperator& op,
                               const SobolevParams& p) {
  require_same_geometry(u_eps, op.geometry());
  const auto [leading, lower] = op.form_split(u_eps);
  const double ts = p.two_sharp();
  double gamma = 0.0;
  const auto& g = op.geometry();
  for (int i = 0; i < g.node_count(); ++i)
    gamma += g.weights[i] * op.f_values().values[i] *
             std::pow(std::abs(u_eps.values[i]), ts);
  require(gamma > 0.0 && std::isfinite(gamma), errc::quadrature_failure,
          "degenerate mass integral for the test function");
  QuotientRecord rec;
  rec.mu = leading + lower;
  rec.lower_order = lower;
  rec.gamma = gamma;
  rec.Q = rec.mu / std::pow(gamma, 2.0 / ts);
  require(std::isfinite(rec.Q), errc::quadrature_failure, "non-finite quotient");
  return rec;
}

LimitStudy limit_study(std::span<const double> eps_list, const TestFunctionSpec& tmpl,
                       const AssembledOperator& op, const SobolevParams& p) {
  require(!eps_list.empty(), errc::invalid_params, "empty epsilon list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    require(eps_list[i] < eps_list[i - 1], errc::invalid_params,
            "epsilon list must be strictly decreasing");
  const auto& g = op.geometry();
  const double eps_min = eps_list.back();
  require(eps_min / g.spacing() >= 10.0, errc::under_resolved,
          "grid too coarse: need at least 10 nodes inside r <= epsilon");

  LimitStudy out;
  for (double eps : eps_list) {
    TestFunctionSpec spec = tmpl;
    spec.epsilon = eps;
    const DiscreteField u = build_test_function(spec, p, g);
    QuotientRecord rec = quotient_record(u, op, p);
    rec.epsilon = eps;
    out.records.push_back(rec);
  }

  const double f_center = op.f_values().values.front();  // concentration point is the origin
  out.target = inv_k0(p) / std::pow(f_center, 2.0 / p.two_sharp());

  if (out.records.size() == 1) {
    out.limit = out.records[0].Q;
    out.extrapolated = false;
    out.fit_power = 0.0;
  } else {
    auto fit_at_power = [&](double power, double* intercept) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const int np = static_cast<int>(out.records.size());
      for (const auto& rec : out.records) {
        const double xe = std::pow(rec.epsilon, power);
        sx += xe;
        sy += rec.Q;
        sxx += xe * xe;
        sxy += xe * rec.Q;
      }
      const double det = np * sxx - sx * sx;
      const double a = (det != 0.0) ? (sy * sxx - sx * sxy) / det : sy / np;
      const double b = (det != 0.0) ? (np * sxy - sx * sy) / det : 0.0;
      double ssr = 0.0;
      for (const auto& rec : out.records) {
        const double e = rec.Q - (a + b * std::pow(rec.epsilon, power));
        ssr += e * e;
      }
      *intercept = a;
      return ssr;
    };
    if (p.n > 4 * p.k) {
      out.fit_power = static_cast<double>(p.n - 2 * p.k);
      fit_at_power(out.fit_power, &out.limit);
    } else {
      double best_ssr = 0.0;
      for (double power = 0.5; power <= 4.01; power += 0.25) {
        double a = 0.0;
        const double ssr = fit_at_power(power, &a);
        if (out.fit_power == 0.0 || ssr < best_ssr) {
          best_ssr = ssr;
          out.fit_power = power;
          out.limit = a;
        }
      }
    }
    out.extrapolated = true;
  }
  out.gap = out.limit - out.target;
  return out;
}

}  // namespace polyvar
