#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

namespace ivf {

inline constexpr int kMaxOrder = 64;

/// Derivatives at zero of the Lagrange basis polynomials on the symmetric
/// integer nodes -n..n, i.e. the weights p_{n,k} of the interpolating field
///
///   X_n(x) = eps^{-1} * sum_{k=-n}^{n} p_{n,k} x_k .
///
/// p_{n,0} = 0 and p_{n,-k} = -p_{n,k} hold exactly in the stored table.
class CoeffTable {
 public:
  /// Throws std::invalid_argument unless 1 <= n <= kMaxOrder.
  explicit CoeffTable(int n);

  int order() const { return n_; }
  /// p_{n,k} for -n <= k <= n.
  double operator[](int k) const { return values_[static_cast<std::size_t>(k + n_)]; }
  const std::vector<double>& values() const { return values_; }

  void write_csv(std::ostream& os) const;

 private:
  int n_;
  std::vector<double> values_;
};

/// sum_{k=-n}^{n} p_{n,k} k^j, evaluated in exact rational arithmetic.
/// Equals 1 for j = 1 and 0 for j = 0 and 2 <= j <= 2n.
/// The terms reach ~1e39 at n = 20, j = 40, so a floating-point sum cancels
/// catastrophically; the exact route keeps the identity checkable at every order.
double moment_sum(const CoeffTable& table, int j);

/// sum_{k=1}^{n} |p_{n,k}|  (= H_n / 2).
double abs_sum(const CoeffTable& table);

/// sum_{k=1}^{n} p_{n,k}  (= H_{2n} - H_n).
double signed_sum(const CoeffTable& table);

/// n-th harmonic number.
double harmonic(int n);

/// Lagrange basis polynomial pi_{n,k}(tau) on the nodes -n..n.
double lagrange_basis(int n, int k, double tau);

}  // namespace ivf
