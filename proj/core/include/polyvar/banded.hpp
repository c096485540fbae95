#pragma once

#include <span>
#include <vector>

namespace polyvar {

// Banded matrix with entries (i, j) restricted to |i - j| <= halfwidth.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int rows, int cols, int halfwidth);

  static BandedMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int halfwidth() const { return hw_; }

  double get(int i, int j) const;
  void set(int i, int j, double v);
  void add(int i, int j, double v);

  // y = A x
  void mul(std::span<const double> x, std::span<double> y) const;
  // y = A^T x
  void mul_transpose(std::span<const double> x, std::span<double> y) const;
  // x^T A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  // A^T diag(d) A (square, halfwidth 2*hw clipped to dimension)
  BandedMatrix normal_product(std::span<const double> d) const;
  // a * b
  static BandedMatrix product(const BandedMatrix& a, const BandedMatrix& b);
  // principal submatrix on index range [begin, begin+count)
  BandedMatrix restricted(int begin, int count) const;
  // this += s * other (other's band must fit inside this band)
  void axpy(double s, const BandedMatrix& other);

  double max_abs() const;
  double symmetry_defect() const;  // max |a_ij - a_ji|

 private:
  int rows_ = 0, cols_ = 0, hw_ = 0;
  std::vector<double> a_;  // rows_ x (2 hw + 1); slot s of row i is column i - hw + s

  bool in_band(int i, int j) const { return j - i >= -hw_ && j - i <= hw_; }
  double& slot(int i, int j) { return a_[static_cast<std::size_t>(i) * (2 * hw_ + 1) + (j - i + hw_)]; }
  const double& slot(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * (2 * hw_ + 1) + (j - i + hw_)];
  }
};

// Cholesky factorization of a symmetric positive definite banded matrix.
class BandedCholesky {
 public:
  explicit BandedCholesky(const BandedMatrix& a);  // throws on breakdown

  int size() const { return n_; }
  void solve_in_place(std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  int n_ = 0, hw_ = 0;
  std::vector<double> l_;  // lower band incl. diagonal: n x (hw+1); slot s of row i is column i - hw + s
};

}  // namespace polyvar
