#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>

#include "doctest.h"
#include "ivf/coeffs.hpp"

using namespace ivf;
namespace mp = boost::multiprecision;

namespace {

mp::cpp_int factorial(int n) {
  mp::cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Closed form (-1)^{k+1} (n!)^2 / (k (n+k)! (n-k)!) with exact integers.
double closed_form(int n, int k) {
  const mp::cpp_rational num(factorial(n) * factorial(n));
  const mp::cpp_rational den(mp::cpp_int(k) * factorial(n + k) * factorial(n - k));
  mp::cpp_rational v = num / den;
  if (k % 2 == 0) v = -v;
  return static_cast<double>(v);
}

double exact_harmonic(int n) {
  mp::cpp_rational h = 0;
  for (int i = 1; i <= n; ++i) h += mp::cpp_rational(1, i);
  return static_cast<double>(h);
}

}  // namespace

TEST_CASE("low-order coefficients") {
  CHECK(CoeffTable(1)[1] == doctest::Approx(0.5).epsilon(1e-16));
  const CoeffTable t2(2);
  CHECK(t2[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t2[2] == doctest::Approx(-1.0 / 12.0).epsilon(1e-15));
  const CoeffTable t3(3);
  CHECK(t3[1] == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
  CHECK(t3[2] == doctest::Approx(-3.0 / 20.0).epsilon(1e-15));
  CHECK(t3[3] == doctest::Approx(1.0 / 60.0).epsilon(1e-15));
}

TEST_CASE("recurrence matches the factorial closed form") {
  double worst = 0.0;
  for (int n = 1; n <= 20; ++n) {
    const CoeffTable t(n);
    for (int k = 1; k <= n; ++k) {
      const double ref = closed_form(n, k);
      worst = std::max(worst, std::abs(t[k] - ref) / std::abs(ref));
    }
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("table structure") {
  for (int n : {1, 2, 7, 20, 64}) {
    const CoeffTable t(n);
    REQUIRE(t.values().size() == static_cast<std::size_t>(2 * n + 1));
    CHECK(t[0] == 0.0);
    for (int k = 1; k <= n; ++k) {
      CHECK(t[-k] == -t[k]);
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      CHECK(sign * t[k] > 0.0);
      if (k > 1) CHECK(std::abs(t[k]) < std::abs(t[k - 1]));
    }
  }
}

TEST_CASE("order range is enforced") {
  CHECK_THROWS_AS(CoeffTable(0), std::invalid_argument);
  CHECK_THROWS_AS(CoeffTable(-3), std::invalid_argument);
  CHECK_THROWS_AS(CoeffTable(kMaxOrder + 1), std::invalid_argument);
  CHECK_NOTHROW(CoeffTable{kMaxOrder});
}

TEST_CASE("moment identities") {
  const CoeffTable t5(5);
  CHECK(moment_sum(t5, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(moment_sum(t5, 0) == 0.0);
  CHECK(std::abs(moment_sum(t5, 4)) <= 1e-15);

  double worst = 0.0;
  for (int n = 1; n <= 20; ++n) {
    const CoeffTable t(n);
    for (int j = 0; j <= 2 * n; ++j) worst = std::max(worst, std::abs(moment_sum(t, j) - (j == 1 ? 1.0 : 0.0)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("moment beyond degree 2n is nonzero") {
  // Odd j = 2n + 1 is where the interpolation error first shows up.
  for (int n = 1; n <= 6; ++n) CHECK(std::abs(moment_sum(CoeffTable(n), 2 * n + 1)) > 1e-3);
}

TEST_CASE("harmonic sums") {
  CHECK(abs_sum(CoeffTable(1)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(abs_sum(CoeffTable(3)) == doctest::Approx(11.0 / 12.0).epsilon(1e-15));
  CHECK(signed_sum(CoeffTable(2)) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  for (int n = 1; n <= 20; ++n) {
    const CoeffTable t(n);
    CHECK(std::abs(abs_sum(t) - exact_harmonic(n) / 2.0) <= 1e-12);
    CHECK(std::abs(signed_sum(t) - (exact_harmonic(2 * n) - exact_harmonic(n))) <= 1e-12);
    CHECK(harmonic(n) == doctest::Approx(exact_harmonic(n)).epsilon(1e-15));
  }
}

TEST_CASE("lagrange basis") {
  for (int n : {1, 3, 6}) {
    for (int k = -n; k <= n; ++k)
      for (int node = -n; node <= n; ++node) CHECK(lagrange_basis(n, k, node) == doctest::Approx(k == node ? 1.0 : 0.0));
    // Partition of unity and its derivative at zero reproduces p_{n,k}.
    double sum = 0.0;
    for (int k = -n; k <= n; ++k) sum += lagrange_basis(n, k, 0.37);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    const CoeffTable t(n);
    const double h = 1e-5;
    for (int k = 1; k <= n; ++k) {
      const double d = (lagrange_basis(n, k, h) - lagrange_basis(n, k, -h)) / (2 * h);
      CHECK(d == doctest::Approx(t[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("csv dump") {
  std::ostringstream os;
  CoeffTable(2).write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("n,k,p_nk\n", 0) == 0);
  CHECK(s.find("2,1,0.66666666666666663") != std::string::npos);
  CHECK(s.find("2,2,-0.083333333333333329") != std::string::npos);
}
