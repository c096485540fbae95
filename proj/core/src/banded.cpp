#include "polyvar/banded.hpp"

#include <algorithm>
#include <cmath>

#include "polyvar/error.hpp"

namespace polyvar {

BandedMatrix::BandedMatrix(int rows, int cols, int halfwidth)
    : rows_(rows), cols_(cols), hw_(halfwidth) {
  require(rows > 0 && cols > 0 && halfwidth >= 0, errc::invalid_params, "bad banded shape");
  a_.assign(static_cast<std::size_t>(rows_) * (2 * hw_ + 1), 0.0);
}

BandedMatrix BandedMatrix::identity(int n) {
  BandedMatrix m(n, n, 0);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

double BandedMatrix::get(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_ || !in_band(i, j)) return 0.0;
  return slot(i, j);
}

void BandedMatrix::set(int i, int j, double v) {
  require(i >= 0 && i < rows_ && j >= 0 && j < cols_ && in_band(i, j), errc::invalid_params,
          "banded entry outside band");
  slot(i, j) = v;
}

void BandedMatrix::add(int i, int j, double v) {
  require(i >= 0 && i < rows_ && j >= 0 && j < cols_ && in_band(i, j), errc::invalid_params,
          "banded entry outside band");
  slot(i, j) += v;
}

void BandedMatrix::mul(std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_,
          errc::invalid_params, "banded matvec size mismatch");
  for (int i = 0; i < rows_; ++i) {
    const int jlo = std::max(0, i - hw_);
    const int jhi = std::min(cols_ - 1, i + hw_);
    long double s = 0.0L;  // rows of high-order forms cancel heavily
    for (int j = jlo; j <= jhi; ++j) s += static_cast<long double>(slot(i, j)) * x[j];
    y[i] = static_cast<double>(s);
  }
}

void BandedMatrix::mul_transpose(std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == rows_ && static_cast<int>(y.size()) == cols_,
          errc::invalid_params, "banded transpose-matvec size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const int jlo = std::max(0, i - hw_);
    const int jhi = std::min(cols_ - 1, i + hw_);
    for (int j = jlo; j <= jhi; ++j) y[j] += slot(i, j) * x[i];
  }
}

double BandedMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  require(static_cast<int>(x.size()) == rows_ && static_cast<int>(y.size()) == cols_,
          errc::invalid_params, "banded bilinear size mismatch");
  long double s = 0.0L;
  for (int i = 0; i < rows_; ++i) {
    const int jlo = std::max(0, i - hw_);
    const int jhi = std::min(cols_ - 1, i + hw_);
    long double row = 0.0L;
    for (int j = jlo; j <= jhi; ++j) row += static_cast<long double>(slot(i, j)) * y[j];
    s += x[i] * row;
  }
  return static_cast<double>(s);
}

BandedMatrix BandedMatrix::normal_product(std::span<const double> d) const {
  require(static_cast<int>(d.size()) == rows_, errc::invalid_params,
          "normal product weight size mismatch");
  const int hw = std::min(2 * hw_, cols_ - 1);
  BandedMatrix m(cols_, cols_, hw);
  for (int r = 0; r < rows_; ++r) {
    if (d[r] == 0.0) continue;
    const int jlo = std::max(0, r - hw_);
    const int jhi = std::min(cols_ - 1, r + hw_);
    for (int i = jlo; i <= jhi; ++i) {
      const double di = slot(r, i) * d[r];
      if (di == 0.0) continue;
      for (int j = jlo; j <= jhi; ++j) m.slot(i, j) += di * slot(r, j);
    }
  }
  return m;
}

BandedMatrix BandedMatrix::product(const BandedMatrix& a, const BandedMatrix& b) {
  require(a.cols_ == b.rows_, errc::invalid_params, "banded product shape mismatch");
  const int hw = std::min(a.hw_ + b.hw_, std::max(a.rows_, b.cols_) - 1);
  BandedMatrix m(a.rows_, b.cols_, hw);
  for (int i = 0; i < a.rows_; ++i) {
    const int tlo = std::max(0, i - a.hw_);
    const int thi = std::min(a.cols_ - 1, i + a.hw_);
    for (int t = tlo; t <= thi; ++t) {
      const double ait = a.slot(i, t);
      if (ait == 0.0) continue;
      const int jlo = std::max(0, t - b.hw_);
      const int jhi = std::min(b.cols_ - 1, t + b.hw_);
      for (int j = jlo; j <= jhi; ++j) m.slot(i, j) += ait * b.slot(t, j);
    }
  }
  return m;
}

BandedMatrix BandedMatrix::restricted(int begin, int count) const {
  require(begin >= 0 && count > 0 && begin + count <= rows_ && begin + count <= cols_,
          errc::invalid_params, "restriction range out of bounds");
  const int hw = std::min(hw_, count - 1);
  BandedMatrix m(count, count, hw);
  for (int i = 0; i < count; ++i) {
    const int jlo = std::max(0, i - hw);
    const int jhi = std::min(count - 1, i + hw);
    for (int j = jlo; j <= jhi; ++j) m.slot(i, j) = get(begin + i, begin + j);
  }
  return m;
}

void BandedMatrix::axpy(double s, const BandedMatrix& other) {
  require(other.rows_ == rows_ && other.cols_ == cols_ && other.hw_ <= hw_, errc::invalid_params,
          "axpy band mismatch");
  for (int i = 0; i < rows_; ++i) {
    const int jlo = std::max(0, i - other.hw_);
    const int jhi = std::min(cols_ - 1, i + other.hw_);
    for (int j = jlo; j <= jhi; ++j) slot(i, j) += s * other.slot(i, j);
  }
}

double BandedMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double BandedMatrix::symmetry_defect() const {
  double d = 0.0;
  for (int i = 0; i < rows_; ++i) {
    const int jlo = std::max(0, i - hw_);
    const int jhi = std::min(cols_ - 1, i + hw_);
    for (int j = jlo; j <= jhi; ++j) d = std::max(d, std::abs(get(i, j) - get(j, i)));
  }
  return d;
}

BandedCholesky::BandedCholesky(const BandedMatrix& a) : n_(a.rows()), hw_(a.halfwidth()) {
  require(a.rows() == a.cols(), errc::invalid_params, "cholesky needs a square matrix");
  l_.assign(static_cast<std::size_t>(n_) * (hw_ + 1), 0.0);
  auto lo = [&](int i, int j) -> double& {
    return l_[static_cast<std::size_t>(i) * (hw_ + 1) + (j - i + hw_)];
  };
  for (int i = 0; i < n_; ++i) {
    for (int j = std::max(0, i - hw_); j <= i; ++j) {
      double s = a.get(i, j);
      const int tlo = std::max({0, i - hw_, j - hw_});
      for (int t = tlo; t < j; ++t) s -= lo(i, t) * lo(j, t);
      if (j < i) {
        lo(i, j) = s / lo(j, j);
      } else {
        if (!(s > 0.0) || !std::isfinite(s))
          fail(errc::singular_solve, "cholesky breakdown: matrix not positive definite");
        lo(i, i) = std::sqrt(s);
      }
    }
  }
}

void BandedCholesky::solve_in_place(std::span<double> x) const {
  require(static_cast<int>(x.size()) == n_, errc::invalid_params, "solve size mismatch");
  auto lo = [&](int i, int j) -> double {
    return l_[static_cast<std::size_t>(i) * (hw_ + 1) + (j - i + hw_)];
  };
  for (int i = 0; i < n_; ++i) {
    double s = x[i];
    for (int t = std::max(0, i - hw_); t < i; ++t) s -= lo(i, t) * x[t];
    x[i] = s / lo(i, i);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = x[i];
    const int thi = std::min(n_ - 1, i + hw_);
    for (int t = i + 1; t <= thi; ++t) s -= lo(t, i) * x[t];
    x[i] = s / lo(i, i);
  }
}

std::vector<double> BandedCholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

}  // namespace polyvar
