#include "ivf/maps.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ivf/errors.hpp"

namespace ivf {

std::string to_string(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

bool Domain::contains(const Vec& x, const std::vector<bool>& angle_mask) const {
  if (!x.all_finite()) return false;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!lower.empty() && x[i] < lower[i]) return false;
    if (!upper.empty() && x[i] > upper[i]) return false;
    if (i >= angle_mask.size() || !angle_mask[i]) r2 += x[i] * x[i];
  }
  return r2 <= action_radius * action_radius;
}

MapFamily::MapFamily(std::string name, std::size_t dim, double epsilon, PointMap forward,
                     PointMap inverse, std::vector<bool> angle_mask)
    : name_(std::move(name)),
      dim_(dim),
      epsilon_(epsilon),
      time_step_(epsilon),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      angle_mask_(std::move(angle_mask)) {
  if (dim == 0 || dim > kMaxDim) throw std::invalid_argument("map dimension out of range");
  if (angle_mask_.empty()) angle_mask_.assign(dim, false);
  if (angle_mask_.size() != dim) throw std::invalid_argument("angle mask size must equal dimension");
}

Vec MapFamily::reduce(const Vec& x) const {
  Vec y = x;
  for (std::size_t i = 0; i < dim_; ++i)
    if (angle_mask_[i]) y[i] = wrap_angle(y[i]);
  return y;
}

void MapFamily::check_dim(const Vec& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("state dimension " + std::to_string(x.size()) +
                                " does not match map dimension " + std::to_string(dim_));
}

MapFamily& MapFamily::set_time_step(double step) {
  time_step_ = step;
  return *this;
}
MapFamily& MapFamily::set_symplectic(bool s) {
  symplectic_ = s;
  return *this;
}
MapFamily& MapFamily::set_reversor(const Matrix& r) {
  if (r.size() != dim_) throw std::invalid_argument("reversor dimension mismatch");
  reversor_ = r;
  return *this;
}
MapFamily& MapFamily::clear_reversor() {
  reversor_.reset();
  return *this;
}
MapFamily& MapFamily::set_limit_field(VectorField g0) {
  limit_field_ = std::move(g0);
  return *this;
}
MapFamily& MapFamily::set_limit_hamiltonian(ScalarField h0) {
  limit_hamiltonian_ = std::move(h0);
  return *this;
}
MapFamily& MapFamily::set_fixed_points(std::vector<Vec> pts) {
  fixed_points_ = std::move(pts);
  return *this;
}
MapFamily& MapFamily::set_domain(Domain d) {
  if ((!d.lower.empty() && d.lower.size() != dim_) || (!d.upper.empty() && d.upper.size() != dim_))
    throw std::invalid_argument("domain bounds must match map dimension");
  domain_ = std::move(d);
  return *this;
}

double standard_hamiltonian(const Vec& x) { return 0.5 * x[1] * x[1] - std::cos(x[0]); }

MapFamily standard_map(double eps) {
  auto fwd = [eps](const Vec& s) {
    const double yb = s[1] - eps * std::sin(s[0]);
    return Vec{s[0] + eps * yb, yb};
  };
  auto inv = [eps](const Vec& s) {
    const double x = s[0] - eps * s[1];
    return Vec{x, s[1] + eps * std::sin(x)};
  };
  MapFamily m("standard", 2, eps, fwd, inv, {true, false});
  m.set_symplectic(true)
      .set_reversor(Matrix(2, {-1.0, eps, 0.0, 1.0}))
      .set_limit_field([](const Vec& s) { return Vec{s[1], -std::sin(s[0])}; })
      .set_limit_hamiltonian(standard_hamiltonian)
      .set_fixed_points({Vec{0.0, 0.0}, Vec{kPi, 0.0}});
  return m;
}

double froeschle_hamiltonian(const FroeschleParams& p, const Vec& x) {
  const double j1 = x[2], j2 = x[3];
  return 0.5 * p.a1 * j1 * j1 + p.a2 * j1 * j2 + 0.5 * p.a3 * j2 * j2 - std::cos(x[0]) -
         p.eta * std::cos(x[1]);
}

MapFamily froeschle_map(double eps, const FroeschleParams& p) {
  if (!(p.a1 > 0.0) || !(p.a1 * p.a3 - p.a2 * p.a2 > 0.0))
    std::clog << "warning: froeschle quadratic form is not positive definite\n";
  auto fwd = [eps, p](const Vec& s) {
    const double j1 = s[2] - eps * std::sin(s[0]);
    const double j2 = s[3] - eps * p.eta * std::sin(s[1]);
    return Vec{s[0] + eps * (p.a1 * j1 + p.a2 * j2), s[1] + eps * (p.a2 * j1 + p.a3 * j2), j1, j2};
  };
  auto inv = [eps, p](const Vec& s) {
    const double psi1 = s[0] - eps * (p.a1 * s[2] + p.a2 * s[3]);
    const double psi2 = s[1] - eps * (p.a2 * s[2] + p.a3 * s[3]);
    return Vec{psi1, psi2, s[2] + eps * std::sin(psi1), s[3] + eps * p.eta * std::sin(psi2)};
  };
  MapFamily m("froeschle", 4, eps, fwd, inv, {true, true, false, false});
  // R = S o (psi, J -> -psi, J) with S the psi-drift; linear and involutive.
  Matrix r(4, {-1.0, 0.0, eps * p.a1, eps * p.a2,  //
               0.0, -1.0, eps * p.a2, eps * p.a3,  //
               0.0, 0.0, 1.0, 0.0,                 //
               0.0, 0.0, 0.0, 1.0});
  m.set_symplectic(true)
      .set_reversor(r)
      .set_limit_field([p](const Vec& s) {
        return Vec{p.a1 * s[2] + p.a2 * s[3], p.a2 * s[2] + p.a3 * s[3], -std::sin(s[0]),
                   -p.eta * std::sin(s[1])};
      })
      .set_limit_hamiltonian([p](const Vec& s) { return froeschle_hamiltonian(p, s); })
      .set_fixed_points({Vec{0.0, 0.0, 0.0, 0.0}, Vec{0.0, kPi, 0.0, 0.0}, Vec{kPi, 0.0, 0.0, 0.0},
                         Vec{kPi, kPi, 0.0, 0.0}});
  return m;
}

VectorField pendulum_field() {
  return [](const Vec& s) { return Vec{s[1], -std::sin(s[0])}; };
}

VectorField linear_field(double a) {
  return [a](const Vec& s) { return Vec{a * s[0]}; };
}

MapFamily flow_map(VectorField field, std::size_t dim, double eps, double integ_tol, std::string name,
                   std::vector<bool> angle_mask) {
  if (!(integ_tol > 0.0)) throw std::invalid_argument("flow_map: integ_tol must be positive");
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = integ_tol;
  s.h_max = std::max(1.0, std::abs(eps));
  s.h_init = std::min(s.h_max, std::max(std::abs(eps) / 4.0, 1e-6));
  s.h_min = std::min(1e-14, s.h_init);
  auto step = [field, s](const Vec& x, double t) {
    IntegrationResult r = integrate_rkf78(field, x, t, s);
    if (!r.ok()) throw IntegrationFailure(r);
    return r.state;
  };
  MapFamily m(std::move(name), dim, eps, [step, eps](const Vec& x) { return step(x, eps); },
              [step, eps](const Vec& x) { return step(x, -eps); }, std::move(angle_mask));
  m.set_limit_field(field);
  return m;
}

MapFamily map_with_numeric_inverse(std::string name, std::size_t dim, double eps, PointMap forward,
                                   std::vector<bool> angle_mask) {
  auto inverse = [forward](const Vec& xbar) {
    Vec x = xbar - (forward(xbar) - xbar);
    for (int it = 0; it < 50; ++it) {
      Vec next = xbar - (forward(x) - x);
      const double delta = (next - x).max_abs();
      x = next;
      if (delta <= 1e-13 * std::max(1.0, x.max_abs())) return x;
    }
    throw NumericalFailure("numeric inverse did not converge within 50 iterations at " +
                           to_string(xbar));
  };
  return MapFamily(std::move(name), dim, eps, std::move(forward), inverse, std::move(angle_mask));
}

MapFamily iterate_power(const MapFamily& base, int q, std::vector<int> winding) {
  if (q < 1) throw std::invalid_argument("iterate_power: q must be >= 1");
  const std::size_t dim = base.dim();
  if (winding.empty()) winding.assign(dim, 0);
  if (winding.size() != dim) throw std::invalid_argument("iterate_power: winding size must equal dimension");
  Vec shift(dim);
  bool any_shift = false;
  for (std::size_t i = 0; i < dim; ++i) {
    if (winding[i] != 0 && !base.angle_mask()[i])
      throw std::invalid_argument("iterate_power: winding on a non-angle coordinate");
    shift[i] = kTwoPi * winding[i];
    any_shift = any_shift || winding[i] != 0;
  }
  if (q == 1 && !any_shift) return base;

  auto fwd = [base, q, shift](const Vec& x) {
    Vec y = x;
    for (int i = 0; i < q; ++i) {
      y = base.apply(y);
      if (i + 1 < q && !base.in_domain(y))
        throw DomainEscape(i + 1, y, "iterate escaped domain inside map power");
    }
    return y - shift;
  };
  auto inv = [base, q, shift](const Vec& x) {
    Vec y = x + shift;
    for (int i = 0; i < q; ++i) {
      y = base.apply_inverse(y);
      if (i + 1 < q && !base.in_domain(y))
        throw DomainEscape(-(i + 1), y, "iterate escaped domain inside inverse map power");
    }
    return y;
  };
  MapFamily m(base.name() + "^" + std::to_string(q), dim, base.epsilon(), fwd, inv, base.angle_mask());
  m.set_time_step(q * base.time_step()).set_symplectic(base.symplectic()).set_domain(base.domain());
  // R reverses F^q; it also reverses the shifted lift when R maps the shift to its negative.
  if (base.reversor() && distance(*base.reversor() * shift, -shift) < 1e-12) m.set_reversor(*base.reversor());
  if (!any_shift) {
    if (base.limit_field()) m.set_limit_field(*base.limit_field());
    if (base.limit_hamiltonian()) m.set_limit_hamiltonian(*base.limit_hamiltonian());
    m.set_fixed_points(base.fixed_points());
  }
  return m;
}

Orbit orbit(const MapFamily& map, const Vec& x0, long k_min, long k_max, bool lifted) {
  if (k_min > 0 || k_max < 0) throw std::invalid_argument("orbit: range must contain k = 0");
  map.check_dim(x0);
  std::vector<Vec> back;  // x_{-1}, x_{-2}, ...
  std::vector<Vec> fwd;   // x_0, x_1, ...
  Orbit out;
  fwd.push_back(x0);
  if (!map.in_domain(x0)) {
    out.escape_index = 0;
  } else {
    Vec x = x0;
    for (long k = -1; k >= k_min; --k) {
      try {
        x = map.apply_inverse(x);
      } catch (const DomainEscape&) {
        out.escape_index = k;
        break;
      }
      if (!map.in_domain(x)) {
        out.escape_index = k;
        break;
      }
      back.push_back(x);
    }
    x = x0;
    for (long k = 1; k <= k_max && !out.escape_index; ++k) {
      try {
        x = map.apply(x);
      } catch (const DomainEscape&) {
        out.escape_index = k;
        break;
      }
      if (!map.in_domain(x)) {
        out.escape_index = k;
        break;
      }
      fwd.push_back(x);
    }
  }
  out.k_min = -static_cast<long>(back.size());
  out.states.reserve(back.size() + fwd.size());
  for (auto it = back.rbegin(); it != back.rend(); ++it) out.states.push_back(lifted ? *it : map.reduce(*it));
  for (const Vec& s : fwd) out.states.push_back(lifted ? s : map.reduce(s));
  return out;
}

}  // namespace ivf
