#include <cmath>
#include <random>

#include "doctest.h"
#include "ivf/errors.hpp"
#include "ivf/maps.hpp"

using namespace ivf;

namespace {

std::vector<Vec> random_points(std::size_t dim, std::size_t count, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < count; ++i) {
    Vec p(dim);
    for (double& c : p) c = u(rng);
    out.push_back(p);
  }
  return out;
}

// J^T Omega J - Omega for the map at x, by central differences.
double symplectic_defect(const MapFamily& map, const Vec& x, double h = 1e-6) {
  const std::size_t m = map.dim(), d = m / 2;
  Matrix j(m);
  for (std::size_t c = 0; c < m; ++c) {
    Vec xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Vec col = (map.apply(xp) - map.apply(xm)) / (2 * h);
    for (std::size_t r = 0; r < m; ++r) j(r, c) = col[r];
  }
  Matrix omega(m);
  for (std::size_t i = 0; i < d; ++i) {
    omega(i, i + d) = 1.0;
    omega(i + d, i) = -1.0;
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) s += j(r, a) * omega(r, c) * j(c, b);
      worst = std::max(worst, std::abs(s - omega(a, b)));
    }
  return worst;
}

}  // namespace

TEST_CASE("standard map examples") {
  const MapFamily m = standard_map(0.1);
  CHECK(m.dim() == 2);
  CHECK(m.symplectic());
  CHECK(m.angle_mask() == std::vector<bool>{true, false});
  CHECK(m.forward(Vec{0.0, 0.0}) == Vec{0.0, 0.0});
  const Vec y = m.forward(Vec{kPi, 1.0});
  CHECK(y[0] == doctest::Approx(wrap_angle(kPi + 0.1)));
  CHECK(y[0] < 0.0);
  CHECK(y[1] == doctest::Approx(1.0));
  const MapFamily m5 = standard_map(0.5);
  CHECK(distance(m5.inverse(m5.forward(Vec{1.0, 1.0})), Vec{1.0, 1.0}) <= 1e-14);
}

TEST_CASE("standard map closed form") {
  const double e = 0.3;
  const MapFamily m = standard_map(e);
  const Vec x{0.4, -1.3};
  const double yb = x[1] - e * std::sin(x[0]);
  CHECK(distance(m.apply(x), Vec{x[0] + e * yb, yb}) == 0.0);
  CHECK(standard_hamiltonian(Vec{kPi, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("froeschle map examples") {
  for (double e : {0.05, 0.2, 0.5}) {
    const MapFamily m = froeschle_map(e);
    CHECK(m.dim() == 4);
    CHECK(distance(m.apply(Vec{kPi, kPi, 0.0, 0.0}), Vec{kPi, kPi, 0.0, 0.0}) <= 1e-15);
    CHECK(distance(m.apply(Vec{0.0, 0.0, 0.0, 0.0}), Vec{0.0, 0.0, 0.0, 0.0}) == 0.0);
    REQUIRE(m.fixed_points().size() == 4);
    for (const Vec& p : m.fixed_points()) CHECK(distance(m.apply(p), p) <= 1e-15);
  }
  const MapFamily m = froeschle_map(0.2);
  const Vec x{3.0, 3.0, -1.0, 1.4};
  CHECK(distance(m.apply_inverse(m.apply(x)), x) <= 1e-13);
  CHECK(distance(m.apply(m.apply_inverse(x)), x) <= 1e-13);
}

TEST_CASE("froeschle limit hamiltonian values") {
  const FroeschleParams p;
  CHECK(froeschle_hamiltonian(p, Vec{0.0, 0.0, 0.0, 0.0}) == doctest::Approx(-1.5));
  CHECK(froeschle_hamiltonian(p, Vec{kPi, kPi, 0.0, 0.0}) == doctest::Approx(1.5));
}

TEST_CASE("inverse round trip on a test domain") {
  for (const MapFamily& m : {standard_map(0.3), froeschle_map(0.3)}) {
    for (const Vec& x : random_points(m.dim(), 200, -3.0, 3.0, 11)) {
      CHECK(distance(m.apply_inverse(m.apply(x)), x) <= 1e-12);
    }
  }
}

TEST_CASE("symplecticity spot check") {
  for (const MapFamily& m : {standard_map(0.4), froeschle_map(0.35)}) {
    REQUIRE(m.symplectic());
    double worst = 0.0;
    for (const Vec& x : random_points(m.dim(), 100, -3.0, 3.0, 5)) worst = std::max(worst, symplectic_defect(m, x));
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("lift consistency") {
  for (const MapFamily& m : {standard_map(0.2), froeschle_map(0.2)}) {
    for (const Vec& x : random_points(m.dim(), 50, -3.0, 3.0, 17)) {
      Vec lifted = x;
      for (std::size_t i = 0; i < m.dim(); ++i)
        if (m.angle_mask()[i]) lifted[i] += kTwoPi * static_cast<double>(static_cast<int>(i) + 1);
      const Vec diff = m.apply(lifted) - m.apply(x);
      for (std::size_t i = 0; i < m.dim(); ++i) {
        if (m.angle_mask()[i]) {
          const double turns = diff[i] / kTwoPi;
          CHECK(std::abs(turns - std::round(turns)) <= 1e-12);
        } else {
          CHECK(std::abs(diff[i]) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("declared reversors") {
  for (const MapFamily& m : {standard_map(0.3), froeschle_map(0.3)}) {
    REQUIRE(m.reversor());
    const Matrix& r = *m.reversor();
    CHECK((r * r).max_abs_diff(Matrix::identity(m.dim())) <= 1e-15);
    for (const Vec& x : random_points(m.dim(), 100, -3.0, 3.0, 23))
      CHECK(distance(m.apply_inverse(x), r * m.apply(r * x)) <= 1e-10);
  }
}

TEST_CASE("flow maps") {
  const MapFamily lin = flow_map(linear_field(1.0), 1, 0.1, 1e-13);
  CHECK(lin.forward(Vec{1.0})[0] == doctest::Approx(std::exp(0.1)).epsilon(1e-12));
  CHECK(lin.inverse(Vec{1.0})[0] == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
  REQUIRE(lin.limit_field());

  const MapFamily pend = flow_map(pendulum_field(), 2, 0.05, 1e-13, "pendulum", {true, false});
  CHECK(distance(pend.apply(Vec{0.0, 0.0}), Vec{0.0, 0.0}) == 0.0);
  double worst = 0.0;
  for (const Vec& x : random_points(2, 50, -2.0, 2.0, 3)) {
    Vec y = x;
    for (int k = 0; k < 20; ++k) y = pend.apply(y);
    worst = std::max(worst, std::abs(standard_hamiltonian(y) - standard_hamiltonian(x)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("flow map integration failure is reported") {
  const VectorField blowup = [](const Vec& x) { return Vec{x[0] * x[0]}; };
  const MapFamily m = flow_map(blowup, 1, 2.0, 1e-10);
  CHECK_THROWS_AS(m.apply(Vec{1.0}), IntegrationFailure);
}

TEST_CASE("numeric inverse") {
  const double e = 0.2;
  PointMap fwd = [e](const Vec& x) {
    const double yb = x[1] - e * std::sin(x[0]);
    return Vec{x[0] + e * yb, yb};
  };
  const MapFamily m = map_with_numeric_inverse("std-numeric", 2, e, fwd, {true, false});
  const MapFamily exact = standard_map(e);
  for (const Vec& x : random_points(2, 50, -2.0, 2.0, 9)) {
    CHECK(distance(m.apply_inverse(x), exact.apply_inverse(x)) <= 1e-12);
  }
  // A map that is far from the identity defeats the fixed-point iteration.
  const MapFamily bad = map_with_numeric_inverse("bad", 1, 1.0, [](const Vec& x) { return Vec{3.0 * x[0] + 1.0}; });
  CHECK_THROWS_AS(bad.apply_inverse(Vec{0.5}), NumericalFailure);
}

TEST_CASE("iterate power") {
  const MapFamily base = standard_map(0.5);
  const MapFamily same = iterate_power(base, 1);
  const Vec x{0.7, -0.4};
  CHECK(same.apply(x) == base.apply(x));
  CHECK(same.time_step() == base.time_step());

  const MapFamily sq = iterate_power(base, 2);
  CHECK(sq.time_step() == doctest::Approx(1.0));
  CHECK(sq.epsilon() == base.epsilon());
  CHECK(sq.apply(x) == base.apply(base.apply(x)));
  CHECK(distance(sq.apply_inverse(sq.apply(x)), x) <= 1e-13);

  // (0, 2 pi) and (pi, 2 pi) form a 2-periodic orbit that winds once around the cylinder.
  const MapFamily wound = iterate_power(base, 2, {1, 0});
  const Vec p{0.0, kTwoPi};
  CHECK(distance(wound.apply(p), p) <= 1e-14);
  CHECK(distance(wound.apply_inverse(p), p) <= 1e-14);
  CHECK(wound.angle_mask() == base.angle_mask());
  CHECK_THROWS_AS(iterate_power(base, 0), std::invalid_argument);
}

TEST_CASE("orbits") {
  const MapFamily m = standard_map(0.1);
  const Orbit single = orbit(m, Vec{0.5, 0.5}, 0, 0);
  REQUIRE(single.states.size() == 1);
  CHECK(single.at(0) == Vec{0.5, 0.5});

  const Orbit fixed = orbit(m, Vec{0.0, 0.0}, -5, 5);
  for (const Vec& s : fixed.states) CHECK(s == Vec{0.0, 0.0});

  const Orbit o = orbit(m, Vec{2.9, 1.7}, -6, 6, true);
  CHECK(o.k_min == -6);
  CHECK(o.k_max() == 6);
  for (long k = 0; k < 6; ++k) CHECK(o.at(k + 1) == m.apply(o.at(k)));
  // Backward iterates come from the inverse map.
  for (long k = -6; k < 0; ++k) CHECK(distance(o.at(k + 1), m.apply(o.at(k))) <= 1e-13);
  // Lifted angles leave the fundamental domain; reduced output does not.
  CHECK(o.at(6)[0] > kPi);
  const Orbit r = orbit(m, Vec{2.9, 1.7}, -6, 6);
  for (const Vec& s : r.states) CHECK(std::abs(s[0]) <= kPi);
}

TEST_CASE("domain escape in orbits") {
  MapFamily m = standard_map(0.5);
  m.set_domain(Domain{{}, {}, 1.2});
  // y is nearly conserved near y = 1; iterate from a point that drifts past the action bound.
  const Orbit o = orbit(m, Vec{-1.0, 1.15}, 0, 200);
  REQUIRE(o.escape_index);
  CHECK(*o.escape_index > 0);
  CHECK(o.k_max() == *o.escape_index - 1);
  for (const Vec& s : o.states) CHECK(m.in_domain(s));
}

TEST_CASE("domain box uses lifted coordinates") {
  Domain d{{-1.0, -1.0}, {1.0, 1.0}};
  CHECK(d.contains(Vec{0.5, 0.5}, {true, false}));
  CHECK_FALSE(d.contains(Vec{1.5, 0.0}, {true, false}));
  CHECK_FALSE(d.contains(Vec{0.0, -1.5}, {true, false}));
}

TEST_CASE("angle reduction") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi + 0.1) == doctest::Approx(-kPi + 0.1));
  const MapFamily m = froeschle_map(0.1);
  const Vec r = m.reduce(Vec{7.0, -7.0, 7.0, -7.0});
  CHECK(r[0] == doctest::Approx(7.0 - kTwoPi));
  CHECK(r[1] == doctest::Approx(-7.0 + kTwoPi));
  CHECK(r[2] == 7.0);
  CHECK(r[3] == -7.0);
}

TEST_CASE("dimension checks") {
  const MapFamily m = standard_map(0.1);
  CHECK_THROWS_AS(m.check_dim(Vec{1.0, 2.0, 3.0}), std::invalid_argument);
}
