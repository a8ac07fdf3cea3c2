#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivf {

inline constexpr std::size_t kMaxDim = 8;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fixed-capacity dense vector used for states and tangent vectors.
/// Phase spaces here are small (m <= 8), so values live inline and copy cheaply.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t dim) : n_(dim) {
    if (dim > kMaxDim) throw std::invalid_argument("Vec: dimension exceeds kMaxDim");
  }
  Vec(std::initializer_list<double> values) : Vec(values.size()) {
    std::copy(values.begin(), values.end(), v_.begin());
  }
  static Vec from(const std::vector<double>& values) {
    Vec out(values.size());
    std::copy(values.begin(), values.end(), out.v_.begin());
    return out;
  }

  std::size_t size() const { return n_; }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double* begin() { return v_.data(); }
  double* end() { return v_.data() + n_; }
  const double* begin() const { return v_.data(); }
  const double* end() const { return v_.data() + n_; }
  std::vector<double> to_vector() const { return {begin(), end()}; }

  Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (std::size_t i = 0; i < n_; ++i) v_[i] *= s;
    return *this;
  }
  Vec& operator/=(double s) {
    for (std::size_t i = 0; i < n_; ++i) v_[i] /= s;
    return *this;
  }
  /// this += s * o
  Vec& axpy(double s, const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) v_[i] += s * o.v_[i];
    return *this;
  }

  double norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += v_[i] * v_[i];
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) m = std::max(m, std::abs(v_[i]));
    return m;
  }
  bool all_finite() const {
    return std::all_of(begin(), end(), [](double x) { return std::isfinite(x); });
  }

  friend bool operator==(const Vec& a, const Vec& b) {
    return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  std::array<double, kMaxDim> v_{};
  std::size_t n_ = 0;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator/(Vec a, double s) { return a /= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Reduce an angle to the fundamental domain (-pi, pi].
inline double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  return a - kTwoPi * std::ceil((a - kPi) / kTwoPi);
}

std::string to_string(const Vec& v);

/// Dense square matrix acting on Vec; used for linear reversors.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : n_(dim) {
    if (dim > kMaxDim) throw std::invalid_argument("Matrix: dimension exceeds kMaxDim");
  }
  Matrix(std::size_t dim, std::initializer_list<double> row_major) : Matrix(dim) {
    if (row_major.size() != dim * dim) throw std::invalid_argument("Matrix: wrong number of entries");
    std::size_t idx = 0;
    for (double x : row_major) {
      a_[(idx / dim) * kMaxDim + idx % dim] = x;
      ++idx;
    }
  }
  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * kMaxDim + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * kMaxDim + j]; }

  Vec operator*(const Vec& x) const {
    Vec y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
  Matrix operator*(const Matrix& o) const {
    Matrix c(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n_; ++k) s += (*this)(i, k) * o(k, j);
        c(i, j) = s;
      }
    return c;
  }
  double max_abs_diff(const Matrix& o) const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j) - o(i, j)));
    return m;
  }

 private:
  std::array<double, kMaxDim * kMaxDim> a_{};
  std::size_t n_ = 0;
};

}  // namespace ivf
