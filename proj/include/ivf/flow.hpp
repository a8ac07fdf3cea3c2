#pragma once

#include <ostream>
#include <vector>

#include "ivf/field.hpp"
#include "ivf/ode.hpp"

namespace ivf {

/// Phi^t of the interpolating field. Throws IntegrationFailure (carrying the
/// partial result) on step underflow, max_steps or domain escape.
Vec advance(const InterpolatingField& field, const Vec& x, double t, const IntegratorSettings& settings);

/// Same as advance, but returns the status instead of throwing.
IntegrationResult try_advance(const InterpolatingField& field, const Vec& x, double t,
                              const IntegratorSettings& settings);

/// Tensor-product grid with inclusive endpoints.
struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> resolution;

  std::size_t size() const;
  /// Point with row-major flat index (last coordinate varies fastest).
  Vec point(std::size_t index) const;
  void validate(std::size_t dim) const;
};

struct ErrorGrid {
  std::vector<Vec> points;
  std::vector<double> log10_err;  ///< NaN where the computation failed
  std::size_t failures = 0;
  std::uint64_t field_evaluations = 0;

  double max_log10() const;
  /// Header x1..xm,log10_err; one row per point in grid order.
  void write_csv(std::ostream& os) const;
};

/// log10 |Phi^eps_{X_n}(x0) - F(x0)| over the grid, distances taken on the
/// universal cover. Deterministic for any worker count.
ErrorGrid flowmap_error_grid(const MapFamily& map, int n, const GridSpec& grid,
                             const IntegratorSettings& settings, int workers = 1);

}  // namespace ivf
