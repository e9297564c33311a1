#pragma once

// Small dense kernels: symmetric eigensolver (cyclic Jacobi), LU with
// partial pivoting and Householder least squares. Sized for correlation
// matrices, reduced Jacobians and PCE design matrices (a few hundred rows).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace romuq::linalg {

class DenseVector {
public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0);
  DenseVector(std::initializer_list<double> values);
  explicit DenseVector(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double norm2() const;
  double norm_inf() const;

private:
  std::vector<double> data_;
};

/// Row-major dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& values() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  DenseVector column(std::size_t j) const;
  DenseMatrix transpose() const;
  double frobenius() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseVector operator*(const DenseMatrix& a, const DenseVector& x);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);

struct SymmetricEigen {
  DenseVector values;   // descending
  DenseMatrix vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Throws ShapeError for non-square input and SymmetryError when the
/// relative asymmetry exceeds 1e-12.
SymmetricEigen sym_eig(const DenseMatrix& a);

/// Solves A x = b by LU with partial pivoting. Throws SingularMatrixError
/// when a pivot falls below 1e-14 * ||A||_F.
DenseVector lu_solve(const DenseMatrix& a, const DenseVector& b);

/// argmin_c ||L c - y||_2 via Householder QR (L.rows >= L.cols). Throws
/// ConditioningError when |R_kk| < 1e-12 * max_j |R_jj| for some k.
DenseVector lstsq(const DenseMatrix& l, const DenseVector& y);

/// Zeroes eigenvalues below rel_tol * max, and any negative round-off.
void clamp_eigenvalues(DenseVector& values, double rel_tol = 1e-12);

} // namespace romuq::linalg
