#include "polyvar/fdweights.hpp"

#include <algorithm>
#include <cmath>

#include "polyvar/error.hpp"

namespace polyvar::fd {

namespace {

// Fornberg (1988): weights of derivatives 0..m at z on arbitrary nodes.
// Returned as table[k][j] = weight of node j for the k-th derivative.
std::vector<std::vector<long double>> fornberg_table(long double z,
                                                     std::span<const long double> x, int m) {
  const int nd = static_cast<int>(x.size());
  std::vector<std::vector<long double>> w(m + 1, std::vector<long double>(nd, 0.0L));
  long double c1 = 1.0L;
  long double c4 = x[0] - z;
  w[0][0] = 1.0L;
  for (int i = 1; i < nd; ++i) {
    const int mn = std::min(i, m);
    long double c2 = 1.0L;
    const long double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const long double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          w[k][i] = c1 * (static_cast<long double>(k) * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
        w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k)
        w[k][j] = (c4 * w[k][j] - static_cast<long double>(k) * w[k - 1][j]) / c3;
      w[0][j] = c4 * w[0][j] / c3;
    }
    c1 = c2;
  }
  return w;
}

long double int_pow(long double base, int e) {
  long double r = 1.0L;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::vector<double> weights(double z, std::span<const double> x, int m) {
  require(m >= 0 && !x.empty() && static_cast<int>(x.size()) > m, errc::invalid_params,
          "need more than m sample points for an m-th derivative stencil");
  std::vector<long double> xl(x.begin(), x.end());
  auto table = fornberg_table(static_cast<long double>(z), xl, m);
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = static_cast<double>(table[m][j]);
  return out;
}

std::vector<double> constrained_weights(double z, double b, int c,
                                        std::span<const double> x, int m) {
  if (c <= 0) return weights(z, x, m);
  require(m >= 0 && !x.empty(), errc::invalid_params, "empty stencil");
  for (double xi : x)
    require(xi != b, errc::invalid_params, "constrained stencil samples must exclude the boundary");

  // Interpolant p(x) = (x-b)^c q(x); samples of q are u_j / (x_j-b)^c.
  // Leibniz: p^(m)(z) = sum_i C(m,i) [(x-b)^c]^(i)(z) q^(m-i)(z).
  std::vector<long double> xl(x.begin(), x.end());
  auto q_tab = fornberg_table(static_cast<long double>(z), xl, m);

  std::vector<long double> acc(x.size(), 0.0L);
  long double binom = 1.0L;     // C(m, i)
  long double falling = 1.0L;   // c (c-1) ... (c-i+1)
  for (int i = 0; i <= std::min(m, c); ++i) {
    if (i > 0) {
      binom = binom * static_cast<long double>(m - i + 1) / static_cast<long double>(i);
      falling *= static_cast<long double>(c - i + 1);
    }
    const long double lead =
        (c - i == 0) ? 1.0L : int_pow(static_cast<long double>(z) - b, c - i);
    if (lead == 0.0L) continue;
    const long double factor = binom * falling * lead;
    for (std::size_t j = 0; j < x.size(); ++j) acc[j] += factor * q_tab[m - i][j];
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const long double scale = int_pow(xl[j] - static_cast<long double>(b), c);
    out[j] = static_cast<double>(acc[j] / scale);
  }
  return out;
}

}  // namespace polyvar::fd
