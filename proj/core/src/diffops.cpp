#include "polyvar/diffops.hpp"

#include <algorithm>
#include <cmath>

#include "polyvar/error.hpp"
#include "polyvar/fdweights.hpp"

namespace polyvar {

namespace {

constexpr int kMapHalfwidth = 5;

}  // namespace

// Accumulates the weights of d^m/dr^m at node `row` into `out`.
void DiffOps::derivative_row(BandedMatrix& out, int row, int m, int conditions) const {
  const int nn = g_.node_count();
  const double h = g_.spacing();
  const auto& x = g_.nodes;
  const bool ball = g_.kind == GeomKind::ball;
  const int c = conditions;

  // Near the origin of the ball: symmetric stencil with even-reflection fold.
  if (ball && row <= 1) {
    std::vector<double> pos(5);
    for (int o = -2; o <= 2; ++o) pos[o + 2] = (row + o) * h;
    auto w = fd::weights(x[row], pos, m);
    for (int o = -2; o <= 2; ++o) {
      const int col = std::abs(row + o);
      if (w[o + 2] != 0.0) out.add(row, col, w[o + 2]);
    }
    return;
  }

  const bool near_left = !ball && row <= 1;
  const bool near_right = row >= nn - 2;
  if (!near_left && !near_right) {
    std::vector<double> pos(5);
    for (int o = -2; o <= 2; ++o) pos[o + 2] = x[row + o];
    auto w = fd::weights(x[row], pos, m);
    for (int o = -2; o <= 2; ++o)
      if (w[o + 2] != 0.0) out.add(row, row + o, w[o + 2]);
    return;
  }

  // Outer-boundary closure: one-sided (c = 0) or condition-constrained.
  const int bidx = near_left ? 0 : nn - 1;
  const int dir = near_left ? +1 : -1;
  if (c > 0) {
    const int s = 6 - c;
    std::vector<double> pos(s);
    std::vector<int> cols(s);
    for (int j = 0; j < s; ++j) {
      cols[j] = bidx + dir * (j + 1);
      pos[j] = x[cols[j]];
    }
    auto w = fd::constrained_weights(x[row], x[bidx], c, pos, m);
    for (int j = 0; j < s; ++j)
      if (w[j] != 0.0) out.add(row, cols[j], w[j]);
  } else {
    std::vector<double> pos(6);
    std::vector<int> cols(6);
    for (int j = 0; j < 6; ++j) {
      cols[j] = bidx + dir * j;
      pos[j] = x[cols[j]];
    }
    auto w = fd::weights(x[row], pos, m);
    for (int j = 0; j < 6; ++j)
      if (w[j] != 0.0) out.add(row, cols[j], w[j]);
  }
}

BandedMatrix DiffOps::gradient_map(int conditions) const {
  const int nn = g_.node_count();
  BandedMatrix out(nn, nn, kMapHalfwidth);
  for (int i = 0; i < nn; ++i) {
    if (g_.kind == GeomKind::ball && i == 0) continue;  // u'(0) = 0 for even fields
    derivative_row(out, i, 1, conditions);
  }
  return out;
}

BandedMatrix DiffOps::laplacian_map(int conditions) const {
  const int nn = g_.node_count();
  BandedMatrix d1(nn, nn, kMapHalfwidth);
  BandedMatrix d2(nn, nn, kMapHalfwidth);
  for (int i = 0; i < nn; ++i) {
    derivative_row(d2, i, 2, conditions);
    if (!(g_.kind == GeomKind::ball && i == 0)) derivative_row(d1, i, 1, conditions);
  }
  BandedMatrix out(nn, nn, kMapHalfwidth);
  for (int i = 0; i < nn; ++i) {
    const int jlo = std::max(0, i - kMapHalfwidth);
    const int jhi = std::min(nn - 1, i + kMapHalfwidth);
    if (g_.kind == GeomKind::slab) {
      for (int j = jlo; j <= jhi; ++j) out.set(i, j, -d2.get(i, j));
    } else if (i == 0) {
      // Δu(0) = -n u''(0), the radial limit of -u'' - (n-1)u'/r
      for (int j = jlo; j <= jhi; ++j) out.set(i, j, -g_.n * d2.get(i, j));
    } else {
      const double cr = (g_.n - 1) / g_.nodes[i];
      for (int j = jlo; j <= jhi; ++j) out.set(i, j, -(d2.get(i, j) + cr * d1.get(i, j)));
    }
  }
  return out;
}

BandedMatrix DiffOps::half_power_map(int i, int clamped_k) const {
  require(i >= 0 && i <= kMaxHalfPower, errc::order_out_of_range,
          "half-Laplacian order out of range");
  const int nn = g_.node_count();
  BandedMatrix m = BandedMatrix::identity(nn);
  const int stages = i / 2;
  for (int j = 0; j < stages; ++j) {
    const int c = clamped_k > 0 ? std::max(clamped_k - 2 * j, 0) : 0;
    m = BandedMatrix::product(laplacian_map(c), m);
  }
  if (i % 2 == 1) {
    const int c = clamped_k > 0 ? std::max(clamped_k - 2 * stages, 0) : 0;
    m = BandedMatrix::product(gradient_map(c), m);
  }
  return m;
}

DiscreteField half_laplacian_power(const DiscreteField& u, int i, const Geometry& g) {
  require_same_geometry(u, g);
  require(i >= 0, errc::order_out_of_range, "half-Laplacian order must be nonnegative");
  require(i <= kMaxHalfPower, errc::order_out_of_range, "half-Laplacian order too large");
  DiffOps ops(g);
  auto map = ops.half_power_map(i, 0);
  DiscreteField v = zero_field(g);
  map.mul(u.values, v.values);
  if (i % 2 == 1)
    for (double& val : v.values) val = std::abs(val);
  return v;
}

double hk_norm(const DiscreteField& u, int k, const Geometry& g) {
  require_same_geometry(u, g);
  require(k >= 1, errc::invalid_params, "hk_norm requires k >= 1");
  require(2 * k <= kMaxHalfPower, errc::order_out_of_range, "hk_norm order too large");
  DiffOps ops(g);
  std::vector<double> v(g.node_count());
  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    if (i == 0) {
      v.assign(u.values.begin(), u.values.end());
    } else {
      auto map = ops.half_power_map(i, 0);
      map.mul(u.values, v);
    }
    double s = 0.0;
    for (int j = 0; j < g.node_count(); ++j) s += g.weights[j] * v[j] * v[j];
    total += s;
  }
  return total;
}

}  // namespace polyvar
