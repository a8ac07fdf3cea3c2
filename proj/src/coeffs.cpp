#include "ivf/coeffs.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ivf {

namespace mp = boost::multiprecision;

CoeffTable::CoeffTable(int n) : n_(n) {
  if (n < 1 || n > kMaxOrder) {
    throw std::invalid_argument("coefficient order must satisfy 1 <= n <= " +
                                std::to_string(kMaxOrder) + ", got " + std::to_string(n));
  }
  values_.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
  // p_{n,1} = n/(n+1),  p_{n,k+1} = -p_{n,k} k(n-k) / ((k+1)(n+k+1))
  double p = static_cast<double>(n) / static_cast<double>(n + 1);
  for (int k = 1; k <= n; ++k) {
    values_[static_cast<std::size_t>(n + k)] = p;
    values_[static_cast<std::size_t>(n - k)] = -p;
    const double num = static_cast<double>(k) * static_cast<double>(n - k);
    const double den = static_cast<double>(k + 1) * static_cast<double>(n + k + 1);
    p = -p * num / den;
  }
}

void CoeffTable::write_csv(std::ostream& os) const {
  os << "n,k,p_nk\n";
  char buf[64];
  for (int k = -n_; k <= n_; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", (*this)[k]);
    os << n_ << ',' << k << ',' << buf << '\n';
  }
}

double moment_sum(const CoeffTable& table, int j) {
  const int n = table.order();
  if (j < 0) throw std::invalid_argument("moment_sum: j must be nonnegative");
  // Same ratio recurrence as the float table, carried out over the rationals.
  mp::cpp_rational p(n, n + 1);
  mp::cpp_rational total = 0;
  for (int k = 1; k <= n; ++k) {
    // k^j (-1)^j for the mirrored node; p_{n,-k} = -p_{n,k}.
    mp::cpp_int kj = mp::pow(mp::cpp_int(k), static_cast<unsigned>(j));
    mp::cpp_rational term = p * kj;
    total += (j % 2 == 0) ? mp::cpp_rational(0) : term * 2;
    p = -p * mp::cpp_rational(k * (n - k), (k + 1) * (n + k + 1));
  }
  return static_cast<double>(total);
}

double abs_sum(const CoeffTable& table) {
  double s = 0.0;
  for (int k = table.order(); k >= 1; --k) s += std::abs(table[k]);
  return s;
}

double signed_sum(const CoeffTable& table) {
  double s = 0.0;
  for (int k = table.order(); k >= 1; --k) s += table[k];
  return s;
}

double harmonic(int n) {
  double h = 0.0;
  for (int k = n; k >= 1; --k) h += 1.0 / k;
  return h;
}

double lagrange_basis(int n, int k, double tau) {
  double v = 1.0;
  for (int j = -n; j <= n; ++j) {
    if (j == k) continue;
    v *= (tau - j) / static_cast<double>(k - j);
  }
  return v;
}

}  // namespace ivf
