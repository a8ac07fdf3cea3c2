#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ivf/coeffs.hpp"
#include "ivf/maps.hpp"

namespace ivf {

/// Interpolating vector field of order n for a near-identity map:
///
///   X_n(x) = h^{-1} sum_{k=1}^{n} p_{n,k} (x_k - x_{-k}),   x_k = F^k(x),
///
/// with h the map's time step (eps, or q*eps for a q-th power). Iterates are
/// computed fresh on every call (exactly n forward and n inverse
/// applications) in lifted coordinates, and the result is a tangent vector
/// that is never angle-reduced.
class InterpolatingField {
 public:
  InterpolatingField(MapFamily map, int order);

  /// Throws DomainEscape (index = offending iterate) if an iterate leaves the
  /// domain, ConfigError for eps = 0 without a limit field.
  Vec eval(const Vec& x) const;
  Vec operator()(const Vec& x) const { return eval(x); }

  /// The degree-2n interpolating curve through the iterates at times k*h,
  /// evaluated at |t| <= n*h. Exact at the nodes.
  Vec interp_curve(const Vec& x, double t) const;

  /// Iterates x_{-n}..x_{n} in lifted coordinates.
  std::vector<Vec> iterates(const Vec& x) const;

  /// Adapter for the integrators.
  VectorField as_vector_field() const;

  const MapFamily& map() const { return map_; }
  int order() const { return table_.order(); }
  const CoeffTable& table() const { return table_; }
  std::uint64_t eval_count() const { return counter_->load(std::memory_order_relaxed); }
  void reset_eval_count() const { counter_->store(0, std::memory_order_relaxed); }

 private:
  MapFamily map_;
  CoeffTable table_;
  // Diagnostics only; shared by copies so a field handed to an integrator is still counted.
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/// v_n(gamma, eps) = eps^{-1} sum_k p_{n,k} gamma(k eps) for samples
/// gamma(-n eps), ..., gamma(n eps). Requires samples.size() == 2n + 1, eps != 0.
Vec curve_derivative(std::span<const Vec> samples, const CoeffTable& table, double eps);

/// max over points of |X_n(R x) + R X_n(x)|. Rejects (ConfigError) unless R is
/// an involution that conjugates the map to its inverse on the sample points.
double reversibility_defect(const InterpolatingField& field, const Matrix& r, std::span<const Vec> points);

}  // namespace ivf
