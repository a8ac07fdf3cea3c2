#include <cmath>
#include <random>

#include "doctest.h"
#include "ivf/errors.hpp"
#include "ivf/field.hpp"

using namespace ivf;

namespace {

std::vector<Vec> random_points(std::size_t count, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(Vec{u(rng), u(rng)});
  return out;
}

// x -> e^{eps a} x, the time-eps map of x' = a x, in closed form.
MapFamily scaling_family(double eps, double a) {
  const double f = std::exp(eps * a);
  MapFamily m("scaling", 1, eps, [f](const Vec& x) { return x * f; }, [f](const Vec& x) { return x / f; }, {false});
  m.set_limit_field(linear_field(a));
  return m;
}

std::vector<Vec> samples_of(double (*g)(double), int n, double eps) {
  std::vector<Vec> s;
  for (int k = -n; k <= n; ++k) s.push_back(Vec{g(k * eps)});
  return s;
}

}  // namespace

TEST_CASE("fixed points are equilibria") {
  const InterpolatingField f(standard_map(0.1), 5);
  CHECK(f.eval(Vec{0.0, 0.0}) == Vec{0.0, 0.0});
  for (int n = 1; n <= 10; ++n) {
    for (double e : {0.05, 0.2, 0.5}) {
      for (const MapFamily& m : {standard_map(e), froeschle_map(e)}) {
        const InterpolatingField fn(m, n);
        for (const Vec& p : m.fixed_points()) CHECK(fn.eval(p).max_abs() <= 1e-12);
      }
    }
  }
}

TEST_CASE("scaling family against the closed-form sum") {
  const double eps = 0.05;
  const InterpolatingField f(scaling_family(eps, 1.0), 3);
  const CoeffTable t(3);
  double oracle = 0.0;
  for (int k = 1; k <= 3; ++k) oracle += t[k] * (std::exp(k * eps) - std::exp(-k * eps));
  oracle /= eps;
  const double v = f.eval(Vec{1.0})[0];
  CHECK(v == doctest::Approx(oracle).epsilon(1e-14));
  // Lemma bound: eps^6 (3!)^2 / 7! * max|d^7/dt^7 e^t| on [-3 eps, 3 eps].
  const double bound = std::pow(eps, 6) * 36.0 / 5040.0 * std::exp(3 * eps);
  CHECK(std::abs(v - 1.0) <= bound);
  CHECK(std::abs(v - 1.0) > bound / 100.0);
}

TEST_CASE("pendulum field is recovered") {
  const MapFamily m = flow_map(pendulum_field(), 2, 0.1, 1e-14, "pendulum", {true, false});
  const Vec v = InterpolatingField(m, 4).eval(Vec{1.0, 0.0});
  CHECK(std::abs(v[0]) <= 1e-8);
  CHECK(v[1] == doctest::Approx(-std::sin(1.0)).epsilon(1e-8));
}

TEST_CASE("field recovery order") {
  const std::vector<Vec> pts = random_points(40, -2.0, 2.0, 41);
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> le, lerr;
    for (double e : {0.1, 0.05, 0.025, 0.0125}) {
      const InterpolatingField f(flow_map(pendulum_field(), 2, e, 1e-14, "p", {true, false}), n);
      double worst = 0.0;
      for (const Vec& p : pts) worst = std::max(worst, distance(f.eval(p), pendulum_field()(p)));
      le.push_back(std::log(e));
      lerr.push_back(std::log(worst));
    }
    const double slope = (lerr.front() - lerr.back()) / (le.front() - le.back());
    CHECK(slope >= 2 * n - 0.3);
  }
}

TEST_CASE("zero epsilon uses the limit field") {
  const InterpolatingField f(scaling_family(0.0, 2.0), 3);
  CHECK(f.eval(Vec{1.5})[0] == 3.0);
  const MapFamily no_limit("plain", 1, 0.0, [](const Vec& x) { return x; }, [](const Vec& x) { return x; }, {false});
  CHECK_THROWS_AS(InterpolatingField(no_limit, 2).eval(Vec{1.0}), ConfigError);
}

TEST_CASE("interpolating curve") {
  const MapFamily m = standard_map(0.2);
  const InterpolatingField f(m, 3);
  const Vec x{1.0, 0.7};
  CHECK(distance(f.interp_curve(x, 0.0), x) <= 1e-15);
  CHECK(distance(f.interp_curve(x, 0.2), m.apply(x)) <= 1e-13);
  CHECK(distance(f.interp_curve(x, -0.4), m.apply_inverse(m.apply_inverse(x))) <= 1e-13);
  CHECK_THROWS_AS(f.interp_curve(x, 0.61), std::invalid_argument);

  const double eps = 0.1;
  const InterpolatingField lin(flow_map(linear_field(1.0), 1, eps, 1e-14), 2);
  const double mid = lin.interp_curve(Vec{1.0}, eps / 2)[0];
  CHECK(std::abs(mid - std::exp(eps / 2)) <= 10 * std::pow(eps, 5));

  // The curve's derivative at t = 0 is the field.
  const double h = 1e-5;
  const Vec d = (f.interp_curve(x, h) - f.interp_curve(x, -h)) / (2 * h);
  CHECK(distance(d, f.eval(x)) <= 1e-7);
}

TEST_CASE("curve derivative") {
  for (int n = 1; n <= 6; ++n) {
    const CoeffTable t(n);
    for (double eps : {0.3, 0.01}) {
      CHECK(curve_derivative(samples_of([](double s) { return s; }, n, eps), t, eps)[0] ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(curve_derivative(samples_of([](double s) { return s * s; }, n, eps), t, eps)[0]) <= 1e-12);
    }
  }
  const double v = curve_derivative(samples_of([](double s) { return std::sin(s); }, 3, 0.1), CoeffTable(3), 0.1)[0];
  CHECK(std::abs(v - 1.0) <= std::pow(0.1, 6) * 36.0 / 5040.0);
  CHECK_THROWS_AS(curve_derivative(samples_of([](double s) { return s; }, 2, 0.1), CoeffTable(3), 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(curve_derivative(samples_of([](double s) { return s; }, 3, 0.1), CoeffTable(3), 0.0),
                  std::invalid_argument);
}

TEST_CASE("stability under perturbed samples") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {1, 4, 10}) {
    const CoeffTable t(n);
    const double eps = 0.1, delta = 1e-6;
    const std::vector<Vec> base = samples_of([](double s) { return std::cos(3 * s); }, n, eps);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Vec> pert = base;
      for (Vec& p : pert) p[0] += delta * u(rng);
      const double change = std::abs(curve_derivative(pert, t, eps)[0] - curve_derivative(base, t, eps)[0]);
      CHECK(change <= harmonic(n) * delta / eps * (1 + 1e-9));
    }
    // The bound is attained by the alternating worst-case perturbation.
    std::vector<Vec> worst = base;
    for (int k = 1; k <= n; ++k) {
      const double s = t[k] > 0 ? 1.0 : -1.0;
      worst[static_cast<std::size_t>(n + k)][0] += s * delta;
      worst[static_cast<std::size_t>(n - k)][0] -= s * delta;
    }
    const double change = std::abs(curve_derivative(worst, t, eps)[0] - curve_derivative(base, t, eps)[0]);
    CHECK(change == doctest::Approx(harmonic(n) * delta / eps).epsilon(1e-6));
  }
}

TEST_CASE("field depends on iterates only through symmetric differences") {
  const CoeffTable t(4);
  const double eps = 0.2;
  std::vector<Vec> s = samples_of([](double x) { return std::exp(x); }, 4, eps);
  const double v0 = curve_derivative(s, t, eps)[0];
  for (int k = 1; k <= 4; ++k) {
    s[static_cast<std::size_t>(4 + k)][0] += 0.37 * k;
    s[static_cast<std::size_t>(4 - k)][0] += 0.37 * k;
  }
  s[4][0] += 5.0;
  CHECK(curve_derivative(s, t, eps)[0] == doctest::Approx(v0).epsilon(1e-13));
}

TEST_CASE("reversibility") {
  const std::vector<Vec> pts = random_points(100, -2.0, 2.0, 8);
  const Matrix r(2, {-1.0, 0.0, 0.0, 1.0});
  for (int n = 1; n <= 5; ++n) {
    const InterpolatingField f(flow_map(pendulum_field(), 2, 0.1, 1e-13, "p", {true, false}), n);
    CHECK(reversibility_defect(f, r, pts) <= 1e-10);
  }
  // Standard map with its declared reversor.
  const MapFamily sm = standard_map(0.3);
  CHECK(reversibility_defect(InterpolatingField(sm, 6), *sm.reversor(), pts) <= 1e-12);
  // Points fixed by R carry X_n in the -1 eigenspace of R.
  const InterpolatingField f(flow_map(pendulum_field(), 2, 0.1, 1e-13, "p", {true, false}), 3);
  for (double y : {-1.5, 0.3, 1.1}) CHECK(std::abs(f.eval(Vec{0.0, y})[1]) <= 1e-12);
  // The identity does not reverse a non-involutive map, and non-involutions are refused.
  CHECK_THROWS_AS(reversibility_defect(f, Matrix::identity(2), pts), ConfigError);
  CHECK_THROWS_AS(reversibility_defect(f, Matrix(2, {2.0, 0.0, 0.0, 1.0}), pts), ConfigError);
}

TEST_CASE("domain escape carries the iterate index") {
  MapFamily m = standard_map(0.5);
  m.set_domain(Domain{{}, {}, 1.0});
  const InterpolatingField f(m, 5);
  try {
    f.eval(Vec{2.0, 0.99});
    FAIL("expected a domain escape");
  } catch (const DomainEscape& e) {
    CHECK(e.index() != 0);
    CHECK(std::abs(e.index()) <= 5);
  }
}

TEST_CASE("evaluation counter") {
  const InterpolatingField f(standard_map(0.1), 3);
  f.reset_eval_count();
  for (int i = 0; i < 7; ++i) f.eval(Vec{0.1 * i, 0.2});
  const VectorField vf = f.as_vector_field();
  vf(Vec{0.0, 0.5});
  CHECK(f.eval_count() == 8);
}

TEST_CASE("q-th power fields") {
  const MapFamily base = standard_map(0.5);
  const InterpolatingField f2(iterate_power(base, 2, {1, 0}), 5);
  const Vec p{0.0, kTwoPi};
  CHECK(f2.eval(p).norm() <= 1e-12);
  CHECK(InterpolatingField(base, 5).eval(p).norm() >= 1e-3);
  // The natural time step of F^q is q eps.
  CHECK(f2.map().time_step() == doctest::Approx(1.0));
}
