#include "gradjump/tensor.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <string>

#include "gradjump/error.hpp"

namespace gradjump {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty() || rows.front().empty()) throw DimensionError("matrix must be at least 1x1");
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw DimensionError("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vec Mat::row(std::size_t i) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

std::vector<Vec> Mat::to_rows() const {
  std::vector<Vec> out;
  out.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
  return out;
}

static void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

Mat& Mat::operator+=(const Mat& o) {
  require_same_shape(*this, o, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require_same_shape(*this, o, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator-(Mat a) { return a *= -1.0; }
Mat operator*(double s, Mat a) { return a *= s; }
Mat operator*(Mat a, double s) { return a *= s; }

UnitVector::UnitVector(Vec v) : v_(std::move(v)) {
  const double len = norm(v_);
  if (v_.empty() || !(len > 0.0) || !std::isfinite(len)) {
    throw DimensionError("unit vector from zero or non-finite input");
  }
  for (double& x : v_) x /= len;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vec scaled(std::span<const double> a, double s) {
  Vec out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return out;
}

double frobenius(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "frobenius");
  return dot(a.data(), b.data());
}

double frobenius_norm(const Mat& a) { return norm(a.data()); }

Mat outer(std::span<const double> u, std::span<const double> v) {
  Mat m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

Vec apply(const Mat& a, std::span<const double> v) {
  if (v.size() != a.cols()) throw DimensionError("apply: length mismatch");
  Vec out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

Vec apply_transpose(const Mat& a, std::span<const double> u) {
  if (u.size() != a.rows()) throw DimensionError("apply_transpose: length mismatch");
  Vec out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * u[i];
  return out;
}

namespace {

Eigen::MatrixXd to_eigen(const Mat& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(Eigen::Index(i), Eigen::Index(j)) = a(i, j);
  return e;
}

}  // namespace

Vec singular_values(const Mat& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  return Vec(s.data(), s.data() + s.size());
}

RankOne rank_one_decompose(const Mat& fp, const Mat& fm, double tol) {
  require_same_shape(fp, fm, "rank_one_decompose");
  if (!(tol > 0.0)) throw DimensionError("rank_one_decompose: tolerance must be positive");
  const Mat jump = fp - fm;
  const double jnorm = frobenius_norm(jump);
  if (jnorm == 0.0) throw DegeneratePairError("rank_one_decompose: zero jump");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(jump), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double ratio = s.size() > 1 ? s(1) / s(0) : 0.0;
  if (ratio > tol) {
    throw IncompatiblePairError(
        "rank_one_decompose: jump is not rank-one (sigma2/sigma1 = " + std::to_string(ratio) + ")",
        ratio);
  }

  Vec n(jump.cols());
  for (std::size_t j = 0; j < n.size(); ++j) n[j] = svd.matrixV()(Eigen::Index(j), 0);
  for (double c : n) {
    if (std::abs(c) > 1e-12) {
      if (c < 0.0)
        for (double& x : n) x = -x;
      break;
    }
  }
  UnitVector unit(n);
  Vec a = gradjump::apply(jump, unit.vec());

  const double residual = frobenius_norm(jump - outer(a, unit.vec()));
  if (residual > tol * jnorm) {
    throw IncompatiblePairError("rank_one_decompose: residual above tolerance", residual / jnorm);
  }
  return {std::move(a), std::move(unit)};
}

std::vector<UnitVector> sphere_grid(std::size_t dim, std::size_t resolution) {
  if (resolution < 2) throw DimensionError("sphere_grid: resolution must be >= 2");
  std::vector<UnitVector> out;
  switch (dim) {
    case 1:
      out.emplace_back(Vec{1.0});
      out.emplace_back(Vec{-1.0});
      break;
    case 2:
      out.reserve(resolution);
      for (std::size_t i = 0; i < resolution; ++i) {
        const double angle = 2.0 * std::numbers::pi * (static_cast<double>(i) / static_cast<double>(resolution));
        out.emplace_back(Vec{std::cos(angle), std::sin(angle)});
      }
      break;
    case 3: {
      const std::size_t count = 2 * resolution * resolution;
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        out.emplace_back(Vec{r * std::cos(phi), r * std::sin(phi), z});
      }
      break;
    }
    default:
      throw DimensionError("sphere_grid: dim must be 1, 2 or 3");
  }
  return out;
}

double unit_ball_volume(std::size_t k) {
  const double half = 0.5 * static_cast<double>(k);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

}  // namespace gradjump
