#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ivf/ode.hpp"
#include "ivf/vec.hpp"

namespace ivf {

using PointMap = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

/// Region where iterates are trusted. Bounds are in lifted coordinates; an
/// empty bound vector means unbounded. action_radius bounds the Euclidean norm
/// of the non-angle coordinates.
struct Domain {
  std::vector<double> lower;
  std::vector<double> upper;
  double action_radius = std::numeric_limits<double>::infinity();

  bool contains(const Vec& x, const std::vector<bool>& angle_mask) const;
};

/// A near-identity map F_eps(x) = x + eps G_eps(x) with its inverse.
///
/// apply/apply_inverse act on lifted coordinates (angles on the universal
/// cover); forward/inverse reduce angle coordinates to (-pi, pi] afterwards.
/// Instances are immutable once built and safe to share between threads.
class MapFamily {
 public:
  MapFamily(std::string name, std::size_t dim, double epsilon, PointMap forward, PointMap inverse,
            std::vector<bool> angle_mask);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  double epsilon() const { return epsilon_; }
  /// Time between consecutive iterates: eps for a base family, q*eps for its q-th power.
  double time_step() const { return time_step_; }
  const std::vector<bool>& angle_mask() const { return angle_mask_; }
  bool symplectic() const { return symplectic_; }
  const std::optional<Matrix>& reversor() const { return reversor_; }
  const std::optional<VectorField>& limit_field() const { return limit_field_; }
  const std::optional<ScalarField>& limit_hamiltonian() const { return limit_hamiltonian_; }
  const std::vector<Vec>& fixed_points() const { return fixed_points_; }
  const Domain& domain() const { return domain_; }

  Vec apply(const Vec& x) const { return forward_(x); }
  Vec apply_inverse(const Vec& x) const { return inverse_(x); }
  Vec forward(const Vec& x) const { return reduce(forward_(x)); }
  Vec inverse(const Vec& x) const { return reduce(inverse_(x)); }

  /// Angle coordinates reduced to (-pi, pi]; others untouched.
  Vec reduce(const Vec& x) const;
  bool in_domain(const Vec& x) const { return domain_.contains(x, angle_mask_); }
  void check_dim(const Vec& x) const;

  MapFamily& set_time_step(double step);
  MapFamily& set_symplectic(bool s);
  MapFamily& set_reversor(const Matrix& r);
  MapFamily& clear_reversor();
  MapFamily& set_limit_field(VectorField g0);
  MapFamily& set_limit_hamiltonian(ScalarField h0);
  MapFamily& set_fixed_points(std::vector<Vec> pts);
  MapFamily& set_domain(Domain d);

 private:
  std::string name_;
  std::size_t dim_;
  double epsilon_;
  double time_step_;
  PointMap forward_;
  PointMap inverse_;
  std::vector<bool> angle_mask_;
  bool symplectic_ = false;
  std::optional<Matrix> reversor_;
  std::optional<VectorField> limit_field_;
  std::optional<ScalarField> limit_hamiltonian_;
  std::vector<Vec> fixed_points_;
  Domain domain_;
};

/// Chirikov standard map (x, y) -> (x + eps ybar, ybar), ybar = y - eps sin x,
/// on the cylinder with x an angle.
MapFamily standard_map(double epsilon);

struct FroeschleParams {
  double a1 = 1.0;
  double a2 = 0.5;
  double a3 = 1.25;
  double eta = 0.5;
};

/// Four-dimensional symplectic map on T^2 x R^2 in coordinates (psi1, psi2, J1, J2):
/// J is kicked first, then psi advances with the quadratic form applied to the new J.
MapFamily froeschle_map(double epsilon, const FroeschleParams& p = {});

double standard_hamiltonian(const Vec& x);
double froeschle_hamiltonian(const FroeschleParams& p, const Vec& x);

/// Time-eps map of an autonomous field, integrated with RKF7(8) at local
/// tolerance integ_tol. The inverse is the time-(-eps) map.
MapFamily flow_map(VectorField field, std::size_t dim, double epsilon, double integ_tol,
                   std::string name = "flow", std::vector<bool> angle_mask = {});

/// Pendulum field (x, y) -> (y, -sin x).
VectorField pendulum_field();
/// Scalar linear field x -> a x.
VectorField linear_field(double a);

/// Map built from a forward map alone; the inverse is solved by the fixed-point
/// iteration x <- xbar - (F(x) - x) to 1e-13 (at most 50 sweeps).
MapFamily map_with_numeric_inverse(std::string name, std::size_t dim, double epsilon,
                                   PointMap forward, std::vector<bool> angle_mask = {});

/// q-th iterate of base, followed by the deck translation -2 pi * winding on the
/// angle coordinates. A nonzero winding picks the lift in which a q-periodic
/// chain that wraps around the cylinder becomes a set of fixed points.
MapFamily iterate_power(const MapFamily& base, int q, std::vector<int> winding = {});

struct Orbit {
  long k_min = 0;
  std::vector<Vec> states;  ///< states[i] = x_{k_min + i}
  std::optional<long> escape_index;

  long k_max() const { return k_min + static_cast<long>(states.size()) - 1; }
  const Vec& at(long k) const { return states.at(static_cast<std::size_t>(k - k_min)); }
};

/// Iterates x_k = F^k(x0) for k_min <= k <= k_max. Iteration runs on the
/// universal cover; output is reduced unless lifted is set. On domain escape
/// the returned orbit is the contiguous range around k = 0 computed so far.
Orbit orbit(const MapFamily& map, const Vec& x0, long k_min, long k_max, bool lifted = false);

}  // namespace ivf
