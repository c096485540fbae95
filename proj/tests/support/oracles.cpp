#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace oracles {

long double gamma_half_integer(int twice_x) {
  if (twice_x <= 0) throw std::invalid_argument("gamma oracle needs a positive argument");
  auto factorial = [](int m) {
    long double f = 1.0L;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  if (twice_x % 2 == 0) return factorial(twice_x / 2 - 1);
  const int j = (twice_x - 1) / 2;  // Γ(j + 1/2)
  const long double sqrt_pi = sqrtl(3.14159265358979323846264338327950288L);
  return factorial(2 * j) * sqrt_pi / (powl(4.0L, j) * factorial(j));
}

long double swanson_value(int n, int k) {
  const long double pi = 3.14159265358979323846264338327950288L;
  const long double ratio = gamma_half_integer(n) / gamma_half_integer(2 * n);
  long double prod = 1.0L;
  for (int h = -k; h <= k - 1; ++h) prod *= (n + 2.0L * h);
  return powl(pi, k) * powl(ratio, 2.0L * k / n) * prod;
}

double clamped_beam_lambda1() {
  auto f = [](double mu) { return std::cosh(mu) * std::cos(mu) - 1.0; };
  double lo = 4.0, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  return mu * mu * mu * mu;
}

namespace {

Eigen::MatrixXd to_dense(const polyvar::BandedMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = std::max(0, i - m.halfwidth()); j <= std::min(m.cols() - 1, i + m.halfwidth());
         ++j)
      d(i, j) = m.get(i, j);
  return d;
}

}  // namespace

double dense_smallest_generalized(const polyvar::BandedMatrix& a,
                                  const polyvar::BandedMatrix& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_dense(a), to_dense(b));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense generalized eigensolve failed");
  return solver.eigenvalues()(0);
}

AlResult al_constrained_minimize(const polyvar::AssembledOperator& op,
                                 const polyvar::ConstraintSpec& spec,
                                 std::span<const std::vector<double>> starts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int m = op.free_count();
  const int fb = op.free_begin();
  const auto& g = op.geometry();

  MatrixXd a(m, m);
  {
    std::vector<double> e(m, 0.0), col(m);
    for (int j = 0; j < m; ++j) {
      e[j] = 1.0;
      op.apply_form(e, col);
      for (int i = 0; i < m; ++i) a(i, j) = col[i];
      e[j] = 0.0;
    }
    a = 0.5 * (a + a.transpose());
  }

  const double q = spec.q;
  const double gamma = spec.gamma;
  auto u_at = [&](const VectorXd& w, int i) {
    return w(i) + spec.extension_h.values[fb + i];
  };
  auto constraint = [&](const VectorXd& w) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      s += g.weights[fb + i] * spec.weight_f.values[fb + i] * std::pow(std::abs(u_at(w, i)), q);
    return s;
  };
  auto constraint_grad = [&](const VectorXd& w) {
    VectorXd d(m);
    for (int i = 0; i < m; ++i) {
      const double u = u_at(w, i);
      const double mag = u == 0.0 ? 0.0 : std::pow(std::abs(u), q - 1.0);
      d(i) = q * g.weights[fb + i] * spec.weight_f.values[fb + i] * (u > 0 ? mag : -mag);
    }
    return d;
  };
  auto constraint_hess_diag = [&](const VectorXd& w) {
    VectorXd d(m);
    for (int i = 0; i < m; ++i) {
      const double u = std::abs(u_at(w, i));
      d(i) = q * (q - 1.0) * g.weights[fb + i] * spec.weight_f.values[fb + i] *
             (u == 0.0 ? 0.0 : std::pow(u, q - 2.0));
    }
    return d;
  };

  AlResult best;
  for (const auto& start : starts) {
    VectorXd w = Eigen::Map<const VectorXd>(start.data(), m);
    double nu = 0.0, rho = 10.0;
    bool ok = false;
    for (int outer = 0; outer < 60; ++outer) {
      // Newton on the augmented Lagrangian
      for (int inner = 0; inner < 200; ++inner) {
        const double c = constraint(w) - gamma;
        const VectorXd gc = constraint_grad(w);
        const VectorXd grad = 2.0 * (a * w) + (nu + rho * c) * gc;
        if (grad.norm() <= 1e-11 * std::max(1.0, std::abs(w.dot(a * w)))) break;
        MatrixXd hess = 2.0 * a + rho * gc * gc.transpose();
        hess.diagonal() += (nu + rho * c) * constraint_hess_diag(w);
        double tau = 0.0;
        VectorXd step;
        for (int t = 0; t < 60; ++t) {
          Eigen::LDLT<MatrixXd> ldlt(hess + tau * MatrixXd::Identity(m, m));
          step = ldlt.solve(-grad);
          if (ldlt.info() == Eigen::Success && step.dot(grad) < 0.0) break;
          tau = tau == 0.0 ? 1e-6 * hess.norm() : 10.0 * tau;
        }
        auto al_value = [&](const VectorXd& v) {
          const double cv = constraint(v) - gamma;
          return v.dot(a * v) + nu * cv + 0.5 * rho * cv * cv;
        };
        const double f0 = al_value(w);
        double alpha = 1.0;
        for (int ls = 0; ls < 50; ++ls, alpha *= 0.5) {
          if (al_value(w + alpha * step) < f0) break;
        }
        w += alpha * step;
      }
      const double c = constraint(w) - gamma;
      nu += rho * c;
      if (std::abs(c) <= 1e-11 * gamma) {
        ok = true;
        break;
      }
      rho = std::min(rho * 8.0, 1e12);
    }

    // exact ray projection onto the constraint, then the resulting energy
    double s_lo = 0.0, s_hi = 1.0;
    while (constraint(s_hi * w) < gamma) {
      s_lo = s_hi;
      s_hi *= 2.0;
      if (s_hi > 1e10) break;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (s_lo + s_hi);
      (constraint(mid * w) < gamma ? s_lo : s_hi) = mid;
    }
    const double s = 0.5 * (s_lo + s_hi);
    w *= s;
    const double energy = w.dot(a * w);
    const bool better = best.w_free.empty() || (ok && !best.converged) ||
                        (ok == best.converged && energy < best.energy);
    if (better) {
      best.energy = energy;
      best.w_free.assign(w.data(), w.data() + m);
      best.converged = ok;
    }
  }
  return best;
}

}  // namespace oracles
