#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "polyvar/banded.hpp"
#include "polyvar/error.hpp"

using polyvar::BandedCholesky;
using polyvar::BandedMatrix;

namespace {

Eigen::MatrixXd dense_of(const BandedMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) d(i, j) = m.get(i, j);
  return d;
}

BandedMatrix random_banded(int rows, int cols, int hw, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BandedMatrix m(rows, cols, hw);
  for (int i = 0; i < rows; ++i)
    for (int j = std::max(0, i - hw); j <= std::min(cols - 1, i + hw); ++j)
      m.set(i, j, dist(rng));
  return m;
}

}  // namespace

TEST_CASE("banded products and normal products match dense algebra") {
  const auto a = random_banded(30, 30, 3, 11);
  const auto b = random_banded(30, 30, 2, 22);
  const auto ab = BandedMatrix::product(a, b);
  CHECK((dense_of(ab) - dense_of(a) * dense_of(b)).norm() < 1e-12);

  std::mt19937 rng(33);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  std::vector<double> w(30);
  for (double& v : w) v = dist(rng);
  const auto ntw = a.normal_product(w);
  Eigen::VectorXd wd = Eigen::Map<Eigen::VectorXd>(w.data(), 30);
  Eigen::MatrixXd expect = dense_of(a).transpose() * wd.asDiagonal() * dense_of(a);
  CHECK((dense_of(ntw) - expect).norm() < 1e-12);
  CHECK(ntw.symmetry_defect() < 1e-14);

  const auto sub = ntw.restricted(3, 20);
  CHECK((dense_of(sub) - expect.block(3, 3, 20, 20)).norm() < 1e-12);
}

TEST_CASE("banded matvec, transpose matvec and bilinear forms") {
  const auto a = random_banded(25, 25, 4, 7);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(25), y(25);
  for (double& v : x) v = dist(rng);

  a.mul(x, y);
  Eigen::VectorXd xd = Eigen::Map<Eigen::VectorXd>(x.data(), 25);
  CHECK((Eigen::Map<Eigen::VectorXd>(y.data(), 25) - dense_of(a) * xd).norm() < 1e-13);

  a.mul_transpose(x, y);
  CHECK((Eigen::Map<Eigen::VectorXd>(y.data(), 25) - dense_of(a).transpose() * xd).norm() <
        1e-13);

  std::vector<double> z(25);
  for (double& v : z) v = dist(rng);
  Eigen::VectorXd zd = Eigen::Map<Eigen::VectorXd>(z.data(), 25);
  CHECK(a.bilinear(x, z) == doctest::Approx(xd.dot(dense_of(a) * zd)).epsilon(1e-12));
}

TEST_CASE("banded cholesky agrees with Eigen LLT") {
  const int n = 40;
  auto d = random_banded(n, n, 3, 99);
  std::vector<double> ones(n, 1.0);
  auto spd = d.normal_product(ones);
  for (int i = 0; i < n; ++i) spd.add(i, i, 1.0);

  BandedCholesky chol(spd);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> b(n);
  for (double& v : b) v = dist(rng);
  auto x = chol.solve(b);

  Eigen::VectorXd bd = Eigen::Map<Eigen::VectorXd>(b.data(), n);
  Eigen::VectorXd xd = dense_of(spd).llt().solve(bd);
  CHECK((Eigen::Map<Eigen::VectorXd>(x.data(), n) - xd).norm() < 1e-11 * xd.norm());
}

TEST_CASE("cholesky rejects indefinite matrices") {
  BandedMatrix m(5, 5, 1);
  for (int i = 0; i < 5; ++i) m.set(i, i, i == 2 ? -1.0 : 1.0);
  CHECK_THROWS_AS(BandedCholesky{m}, polyvar::Error);
}
