#pragma once

// Small dense m x d matrices and vectors. Sizes are tiny (m, d <= 3 in every
// construction used here), so storage is a flat row-major std::vector.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gradjump {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat identity(std::size_t n);
  static Mat from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Vec row(std::size_t i) const;
  std::vector<Vec> to_rows() const;

  bool same_shape(const Mat& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator-(Mat a);
Mat operator*(double s, Mat a);
Mat operator*(Mat a, double s);

/// Unit vector on S^{dim-1}. Construction normalizes and rejects the zero vector.
class UnitVector {
 public:
  UnitVector() = default;
  explicit UnitVector(Vec v);
  UnitVector(std::initializer_list<double> v) : UnitVector(Vec(v)) {}

  std::size_t dim() const noexcept { return v_.size(); }
  const Vec& vec() const noexcept { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  Vec v_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
Vec scaled(std::span<const double> a, double s);

/// Frobenius pairing (A, B) = sum_ij A_ij B_ij.
double frobenius(const Mat& a, const Mat& b);
double frobenius_norm(const Mat& a);

/// u (x) v, an m x d matrix.
Mat outer(std::span<const double> u, std::span<const double> v);

/// A v (length rows) and A^T u (length cols).
Vec apply(const Mat& a, std::span<const double> v);
Vec apply_transpose(const Mat& a, std::span<const double> u);

/// Singular values in decreasing order.
Vec singular_values(const Mat& a);

struct RankOne {
  Vec a;
  UnitVector n;
};

/// Writes Fp - Fm = a (x) n. The orientation is fixed so that the first
/// nonzero component of n is positive.
RankOne rank_one_decompose(const Mat& fp, const Mat& fm, double tol = 1e-9);

/// Deterministic quasi-uniform covering of S^{dim-1}, dim in {1, 2, 3}.
/// dim 2 returns `resolution` equally spaced directions starting at (1, 0);
/// dim 3 returns a Fibonacci lattice of 2 * resolution^2 points.
std::vector<UnitVector> sphere_grid(std::size_t dim, std::size_t resolution);

/// Volume of the unit ball in R^k: pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(std::size_t k);

}  // namespace gradjump
