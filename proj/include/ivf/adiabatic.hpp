#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "ivf/field.hpp"
#include "ivf/flow.hpp"

namespace ivf {

/// omega(u, v) for the standard symplectic form sum_i dx_i ^ dx_{i+d}:
/// sum_i (u_i v_{i+d} - u_{i+d} v_i). Rejects odd dimensions.
double symplectic_pairing(const Vec& u, const Vec& v);

/// nu_n(x)[v] = omega(X_n(x), v).
double one_form(const InterpolatingField& field, const Vec& x, const Vec& v);

struct RombergResult {
  double value = 0.0;
  double achieved = 0.0;  ///< |difference| of the last two diagonal entries
  int levels = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Trapezoid rule with Richardson (Romberg) extrapolation on [a, b]. Starts
/// from `initial_panels` panels and doubles per level; accepts when two
/// consecutive diagonal entries differ by less than tol.
RombergResult romberg(const std::function<double(double)>& f, double a, double b, double tol,
                      int max_levels, int initial_panels = 8);

enum class PathRule { straight, axis_parallel };

struct InvariantOptions {
  double quad_tol = 1e-8;
  int max_levels = 20;
  PathRule path = PathRule::straight;
};

enum class InvariantStatus { ok, not_converged, domain_escape };

struct InvariantEvaluation {
  InvariantStatus status = InvariantStatus::ok;
  double value = 0.0;     ///< best estimate
  double achieved = 0.0;  ///< final Romberg difference
  long evaluations = 0;
  double escape_s = 0.0;  ///< path parameter of a domain escape
  bool ok() const { return status == InvariantStatus::ok; }
};

/// Adiabatic invariant h_n(x) = integral of nu_n along a path from a base
/// point. Paths live in the chart where angle coordinates of x are reduced to
/// (-pi, pi] and the base point is used as given; on the cylinder the result
/// is therefore multivalued across the cut.
class AdiabaticInvariant {
 public:
  AdiabaticInvariant(InterpolatingField field, Vec base, InvariantOptions opts = {});

  InvariantEvaluation evaluate(const Vec& x) const;
  /// Throws NumericalFailure on quadrature non-convergence or domain escape.
  double operator()(const Vec& x) const;

  const InterpolatingField& field() const { return field_; }
  const Vec& base() const { return base_; }
  const InvariantOptions& options() const { return opts_; }
  /// x with angle coordinates reduced.
  Vec chart_point(const Vec& x) const { return field_.map().reduce(x); }

 private:
  InterpolatingField field_;
  Vec base_;
  InvariantOptions opts_;
};

/// Closed-form limit Hamiltonian h_0 of a family, when the family carries one.
/// Throws ConfigError otherwise.
double limit_hamiltonian(const MapFamily& map, const Vec& x);

using MapFactory = std::function<MapFamily(double epsilon)>;

struct DeltaHRow {
  int n = 0;
  double epsilon = 0.0;
  double max_delta_h = 0.0;
  std::size_t failures = 0;
  std::size_t points = 0;
  std::uint64_t field_evaluations = 0;
};

/// For each (n, eps): max over the grid of |h_n(F(x)) - h_n(x)|. Points whose
/// quadrature fails are excluded and counted.
std::vector<DeltaHRow> delta_h_scan(const MapFactory& family, const std::vector<int>& n_list,
                                    const std::vector<double>& eps_list, const GridSpec& grid,
                                    const Vec& base, const InvariantOptions& opts, int workers = 1);

void write_delta_h_csv(std::ostream& os, const std::vector<DeltaHRow>& rows);

struct SeriesPoint {
  long index = 0;
  double value = 0.0;
};

/// h_n along the orbit of x0, sampled at iterates 0, stride, 2*stride, ...
/// up to num_iterates. Non-converged samples are reported as NaN.
std::vector<SeriesPoint> invariant_series(const AdiabaticInvariant& h, const Vec& x0, long num_iterates,
                                          long stride);

void write_series_csv(std::ostream& os, const std::vector<SeriesPoint>& series);

}  // namespace ivf
