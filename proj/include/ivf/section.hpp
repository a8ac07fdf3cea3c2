#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ivf/adiabatic.hpp"
#include "ivf/field.hpp"
#include "ivf/ode.hpp"

namespace ivf {

/// Codimension-one surface {g = 0} used as a Poincare section for a map.
struct SectionSpec {
  ScalarField g;
  VectorField grad_g;
  double newton_tol = 1e-11;
  int newton_max_iter = 30;
  double transversality_floor = 1e-6;
  /// A sign change only counts when |g| < local_bound at both iterates. For a
  /// wrapped angle difference this rejects jumps across the +-pi cut, since
  /// the surface only separates the cylinder locally.
  double local_bound = std::numeric_limits<double>::infinity();
};

/// g(x) = wrap(x_i - x_j), with local_bound = pi/2.
SectionSpec angle_difference_section(std::size_t i, std::size_t j, std::size_t dim);
/// g(x) = x_i - value.
SectionSpec coordinate_section(std::size_t i, double value, std::size_t dim);

struct Crossing {
  long k = 0;
  Vec x_k;
  Vec x_next;
};

struct CrossingScan {
  std::vector<Crossing> crossings;
  bool in_section_orbit = false;  ///< |g| < newton_tol on three consecutive iterates
  std::optional<long> escape_index;
  long iterates = 0;
};

/// Pairs (x_k, x_{k+1}) with g(x_k) g(x_{k+1}) <= 0 along the first
/// num_iterates iterates of x0. The orbit is kept angle-reduced.
CrossingScan detect_crossings(const MapFamily& map, const Vec& x0, long num_iterates, const SectionSpec& spec);

struct CrossingRecord {
  long k = 0;
  Vec x_k;
  double t = 0.0;  ///< projection time, between 0 and the map time step
  Vec y;           ///< Phi^t_{X_n}(x_k), on the section
  double residual = 0.0;
  int direction = 0;  ///< sign of d/dt g(Phi^t(x_k)) at t
};

struct ProjectionOutcome {
  std::optional<CrossingRecord> record;
  std::string skip_reason;  ///< set when record is empty
};

/// Finds t in [0, h] (h the map time step) with g(Phi^t_{X_n}(x_k)) = 0 by
/// safeguarded Newton iteration, s'(t) = grad g . X_n, falling back to
/// bisection inside the sign-change bracket. Tangential crossings
/// (|s'| < transversality_floor at the root) are skipped.
ProjectionOutcome project_crossing(const InterpolatingField& field, const Vec& x_k, const SectionSpec& spec,
                                   const IntegratorSettings& settings, long k = 0);

struct SeedResult {
  std::vector<Vec> seeds;
  std::vector<std::string> log;
};

/// Initial conditions on {psi1 = psi2} intersected with {h_n = E}: for each psi,
/// bisection in J2 > 0 on h_n(psi, psi, 0, J2) = E, then the level curve is
/// followed with dJ1/dt = -dh/dJ2, dJ2/dt = dh/dJ1 (central differences) and
/// `count` points equally spaced in time over one loop are returned, each
/// pulled back onto the level set along its ray in the (J1, J2) plane.
SeedResult seed_levelset(const AdiabaticInvariant& h, double energy, const std::vector<double>& psi_values,
                         std::size_t count);

struct CloudRecord {
  std::size_t seed_id = 0;
  CrossingRecord crossing;
  double psi = 0.0;
  double phi = 0.0;  ///< atan2(J2, J1) for four-dimensional maps
};

struct SeedStatus {
  std::size_t collected = 0;
  std::size_t skipped = 0;
  long iterates = 0;
  bool escaped = false;
  bool in_section_orbit = false;
  bool exhausted = false;  ///< hit the iterate cap before collecting enough crossings
};

struct SectionCloud {
  std::vector<CloudRecord> records;  ///< ordered by seed, then crossing
  std::vector<SeedStatus> seeds;
  std::vector<std::string> log;
  std::uint64_t field_evaluations = 0;
};

/// Runs every seed until crossings_per_seed crossings are projected (or
/// max_iterates_per_seed iterates pass). Seeds run in parallel; the result is
/// identical for every worker count.
SectionCloud section_cloud(const InterpolatingField& field, const SectionSpec& spec, const std::vector<Vec>& seeds,
                           std::size_t crossings_per_seed, const IntegratorSettings& settings,
                           long max_iterates_per_seed, int workers = 1);

void write_cloud_csv(std::ostream& os, const SectionCloud& cloud);

/// h_n evaluated at the projections of every `every`-th crossing of the orbit of x0.
/// index holds the iterate k of the sampled crossing.
std::vector<SeriesPoint> section_invariant_series(const AdiabaticInvariant& h, const SectionSpec& spec,
                                                  const Vec& x0, long num_iterates, long every,
                                                  const IntegratorSettings& settings);

}  // namespace ivf
