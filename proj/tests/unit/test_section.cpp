#include <boost/math/special_functions/ellint_1.hpp>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ivf/errors.hpp"
#include "ivf/section.hpp"

using namespace ivf;

namespace {

MapFamily pendulum_map(double eps) { return flow_map(pendulum_field(), 2, eps, 1e-13, "pendulum", {true, false}); }

IntegratorSettings tight() {
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-12;
  return s;
}

}  // namespace

TEST_CASE("section constructors") {
  const SectionSpec a = angle_difference_section(0, 1, 4);
  CHECK(a.g(Vec{0.5, 0.2, 0.0, 0.0}) == doctest::Approx(0.3));
  CHECK(a.g(Vec{3.0, -3.0, 0.0, 0.0}) == doctest::Approx(6.0 - kTwoPi));
  CHECK(a.grad_g(Vec(4)) == Vec{1.0, -1.0, 0.0, 0.0});
  CHECK(a.local_bound == doctest::Approx(kPi / 2));
  const SectionSpec c = coordinate_section(1, 0.25, 2);
  CHECK(c.g(Vec{9.0, 1.0}) == 0.75);
  CHECK(std::isinf(c.local_bound));
  CHECK_THROWS_AS(angle_difference_section(0, 0, 4), ConfigError);
  CHECK_THROWS_AS(coordinate_section(2, 0.0, 2), ConfigError);
}

TEST_CASE("a start on the section is a crossing at k = 0") {
  const CrossingScan s = detect_crossings(pendulum_map(0.1), Vec{1.0, 0.0}, 5, coordinate_section(1, 0.0, 2));
  REQUIRE_FALSE(s.crossings.empty());
  CHECK(s.crossings.front().k == 0);
  CHECK(s.iterates == 5);
}

TEST_CASE("fixed point on the section is an in-section orbit") {
  const CrossingScan s =
      detect_crossings(froeschle_map(0.2), Vec{kPi, kPi, 0.0, 0.0}, 100, angle_difference_section(0, 1, 4));
  CHECK(s.in_section_orbit);
  CHECK(s.crossings.empty());
}

TEST_CASE("pendulum crosses y = 0 twice per period") {
  const double amp = 1.0, eps = 0.1;
  const double period = 4.0 * boost::math::ellint_1(std::sin(amp / 2));
  const Vec x0{0.0, std::sqrt(2.0 * (1.0 - std::cos(amp)))};
  const long iterates = 1000;
  const CrossingScan s = detect_crossings(pendulum_map(eps), x0, iterates, coordinate_section(1, 0.0, 2));
  const double expected = 2.0 * iterates * eps / period;
  CHECK(std::abs(static_cast<double>(s.crossings.size()) - expected) <= 1.0);
  for (const Crossing& c : s.crossings) CHECK(c.x_k[1] * c.x_next[1] <= 0.0);
}

TEST_CASE("wrapped jumps across the cut are not crossings") {
  // A rotational orbit sees wrap(x) jump from pi to -pi once per turn.
  SectionSpec s;
  s.g = [](const Vec& x) { return wrap_angle(x[0]); };
  s.grad_g = [](const Vec&) { return Vec{1.0, 0.0}; };
  s.local_bound = kPi / 2;
  const CrossingScan scan = detect_crossings(standard_map(0.1), Vec{0.05, 2.0}, 2000, s);
  REQUIRE_FALSE(scan.crossings.empty());
  for (const Crossing& c : scan.crossings) CHECK(std::abs(c.x_k[0]) < kPi / 2);
}

TEST_CASE("projection from a point on the section") {
  const InterpolatingField f(pendulum_map(0.1), 4);
  const ProjectionOutcome p = project_crossing(f, Vec{0.0, 1.0}, coordinate_section(0, 0.0, 2), tight(), 7);
  REQUIRE(p.record);
  CHECK(p.record->t == 0.0);
  CHECK(p.record->k == 7);
  CHECK(p.record->direction == 1);
}

TEST_CASE("tangential crossings are skipped") {
  // At the turning point (1, 0) the flow is tangent to {x = 1}.
  const InterpolatingField f(pendulum_map(0.1), 4);
  const ProjectionOutcome p = project_crossing(f, Vec{1.0, 0.0}, coordinate_section(0, 1.0, 2), tight());
  CHECK_FALSE(p.record);
  CHECK(p.skip_reason.find("tangency") != std::string::npos);
}

TEST_CASE("projections are sound") {
  const MapFamily m = pendulum_map(0.1);
  const InterpolatingField f(m, 5);
  const SectionSpec spec = coordinate_section(1, 0.0, 2);
  const IntegratorSettings s = tight();
  const SectionCloud cloud = section_cloud(f, spec, {Vec{0.0, 1.2}, Vec{0.3, -0.8}}, 10, s, 100000);
  REQUIRE(cloud.records.size() == 20);
  for (const CloudRecord& r : cloud.records) {
    const CrossingRecord& c = r.crossing;
    CHECK(c.residual <= spec.newton_tol);
    CHECK(std::abs(spec.g(c.y)) <= spec.newton_tol);
    CHECK(c.t >= 0.0);
    CHECK(c.t <= m.time_step());
    CHECK(distance(c.y, c.x_k) <= m.time_step() * 2.0 * std::max(1.0, f.eval(c.x_k).norm()));
    CHECK(distance(c.y, advance(f, c.x_k, c.t, s)) <= 1e-9);
    CHECK(std::abs(c.direction) == 1);
    // The iterate pair straddles the surface.
    CHECK(spec.g(c.x_k) * spec.g(m.apply(c.x_k)) <= 0.0);
  }
  CHECK(cloud.seeds[0].collected == 10);
  CHECK_FALSE(cloud.seeds[0].exhausted);
  CHECK(cloud.field_evaluations > 0);
}

TEST_CASE("projection does not perturb the orbit") {
  const MapFamily m = standard_map(0.2);
  const InterpolatingField f(m, 4);
  SectionSpec spec = coordinate_section(1, 0.5, 2);
  const Vec seed{0.4, 0.6};
  const SectionCloud cloud = section_cloud(f, spec, {seed}, 12, tight(), 100000);
  const Orbit o = orbit(m, seed, 0, cloud.seeds[0].iterates);
  REQUIRE_FALSE(cloud.records.empty());
  for (const CloudRecord& r : cloud.records) CHECK(r.crossing.x_k == o.at(r.crossing.k));
}

TEST_CASE("seed statuses") {
  MapFamily m = standard_map(0.2);
  m.set_domain(Domain{{}, {}, 1.0});
  const InterpolatingField f(m, 3);
  const SectionCloud c = section_cloud(f, coordinate_section(0, 0.0, 2),
                                       {Vec{0.0, 3.0}, Vec{1.0, 0.1}}, 1000, IntegratorSettings{}, 50);
  CHECK(c.seeds[0].escaped);
  CHECK(c.seeds[0].collected == 0);
  CHECK(c.seeds[1].exhausted);
  CHECK(c.seeds[1].iterates == 50);
  const SectionCloud p = section_cloud(InterpolatingField(froeschle_map(0.2), 2), angle_difference_section(0, 1, 4),
                                       {Vec{kPi, kPi, 0.0, 0.0}}, 5, IntegratorSettings{}, 100);
  CHECK(p.seeds[0].in_section_orbit);
  CHECK_FALSE(p.seeds[0].exhausted);
}

TEST_CASE("cloud is identical for every worker count") {
  const InterpolatingField f(standard_map(0.3), 3);
  const SectionSpec spec = coordinate_section(0, 0.0, 2);
  std::vector<Vec> seeds;
  for (int i = 0; i < 6; ++i) seeds.push_back(Vec{0.1 * i + 0.05, 0.2 * i - 0.4});
  const SectionCloud a = section_cloud(f, spec, seeds, 8, IntegratorSettings{}, 10000, 1);
  const SectionCloud b = section_cloud(f, spec, seeds, 8, IntegratorSettings{}, 10000, 3);
  std::ostringstream sa, sb;
  write_cloud_csv(sa, a);
  write_cloud_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.log == b.log);
  CHECK(sa.str().rfind("seed_id,k,t_k,y1,y2,psi,phi,residual,direction\n", 0) == 0);
}

TEST_CASE("level-set seeds") {
  const FroeschleParams fp;
  InvariantOptions o;
  const AdiabaticInvariant h(InterpolatingField(froeschle_map(0.2, fp), 4), Vec{kPi, kPi, 0.0, 0.0}, o);
  const SeedResult r = seed_levelset(h, 1.0, {0.0, 1.0}, 4);
  CHECK(r.seeds.size() == 8);
  for (const Vec& s : r.seeds) {
    CHECK(s[0] == s[1]);
    CHECK(std::abs(h(s) - 1.0) <= 10 * o.quad_tol);
  }
  // An energy below the invariant at J = 0 yields no seeds, only a log entry.
  const SeedResult none = seed_levelset(h, -50.0, {0.0}, 3);
  CHECK(none.seeds.empty());
  CHECK(none.log.size() == 1);
  CHECK_THROWS_AS(seed_levelset(AdiabaticInvariant(InterpolatingField(standard_map(0.1), 2), Vec{0.0, 0.0}), 1.0,
                                {0.0}, 2),
                  ConfigError);
}

TEST_CASE("published seed lies on the unit level set") {
  const AdiabaticInvariant h(InterpolatingField(froeschle_map(0.2), 10), Vec{kPi, kPi, 0.0, 0.0});
  const Vec seed{3.0, 3.0, -1.043523, 1.385456};
  CHECK(std::abs(h(seed) - 1.0) <= 5e-3);
}

TEST_CASE("invariant sampled on the section") {
  const MapFamily m = froeschle_map(0.2);
  const AdiabaticInvariant h(InterpolatingField(m, 6), Vec{kPi, kPi, 0.0, 0.0});
  const SectionSpec spec = angle_difference_section(0, 1, 4);
  const std::vector<SeriesPoint> s =
      section_invariant_series(h, spec, Vec{3.0, 3.0, -1.043523, 1.385456}, 4000, 10, tight());
  REQUIRE(s.size() >= 5);
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i].index > s[i - 1].index);
    CHECK(std::abs(s[i].value - s[0].value) <= 1e-4);
  }
  CHECK_THROWS_AS(section_invariant_series(h, spec, Vec{3.0, 3.0, 0.0, 1.0}, 10, 0, tight()),
                  std::invalid_argument);
}
