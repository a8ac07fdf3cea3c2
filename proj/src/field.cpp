#include "ivf/field.hpp"

#include <cmath>
#include <string>

#include "ivf/errors.hpp"

namespace ivf {

InterpolatingField::InterpolatingField(MapFamily map, int order)
    : map_(std::move(map)), table_(order), counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

std::vector<Vec> InterpolatingField::iterates(const Vec& x) const {
  map_.check_dim(x);
  const int n = order();
  std::vector<Vec> xs(static_cast<std::size_t>(2 * n + 1));
  if (!map_.in_domain(x)) throw DomainEscape(0, x, "evaluation point outside domain");
  xs[static_cast<std::size_t>(n)] = x;
  Vec f = x, b = x;
  for (int k = 1; k <= n; ++k) {
    f = map_.apply(f);
    if (!map_.in_domain(f)) throw DomainEscape(k, f, "forward iterate " + std::to_string(k) + " escaped domain");
    b = map_.apply_inverse(b);
    if (!map_.in_domain(b)) throw DomainEscape(-k, b, "backward iterate " + std::to_string(k) + " escaped domain");
    xs[static_cast<std::size_t>(n + k)] = f;
    xs[static_cast<std::size_t>(n - k)] = b;
  }
  return xs;
}

Vec InterpolatingField::eval(const Vec& x) const {
  counter_->fetch_add(1, std::memory_order_relaxed);
  const double h = map_.time_step();
  if (h == 0.0) {
    if (!map_.limit_field()) throw ConfigError("interpolating field at eps = 0 requires a limit field");
    map_.check_dim(x);
    return (*map_.limit_field())(x);
  }
  const int n = order();
  map_.check_dim(x);
  if (!map_.in_domain(x)) throw DomainEscape(0, x, "evaluation point outside domain");
  // Forward and backward iterates are produced in lockstep and consumed immediately.
  Vec f = x, b = x;
  Vec out(x.size());
  for (int k = 1; k <= n; ++k) {
    f = map_.apply(f);
    if (!map_.in_domain(f)) throw DomainEscape(k, f, "forward iterate " + std::to_string(k) + " escaped domain");
    b = map_.apply_inverse(b);
    if (!map_.in_domain(b)) throw DomainEscape(-k, b, "backward iterate " + std::to_string(k) + " escaped domain");
    out.axpy(table_[k], f - b);
  }
  return out / h;
}

Vec InterpolatingField::interp_curve(const Vec& x, double t) const {
  const int n = order();
  const double h = map_.time_step();
  if (h == 0.0) throw ConfigError("interpolating curve undefined at eps = 0");
  const double tau = t / h;
  if (std::abs(tau) > n * (1.0 + 1e-12))
    throw std::invalid_argument("interp_curve: |t| must not exceed n * eps");
  const std::vector<Vec> xs = iterates(x);
  Vec out(x.size());
  for (int k = -n; k <= n; ++k) out.axpy(lagrange_basis(n, k, tau), xs[static_cast<std::size_t>(k + n)]);
  return out;
}

VectorField InterpolatingField::as_vector_field() const {
  return [self = *this](const Vec& x) { return self.eval(x); };
}

Vec curve_derivative(std::span<const Vec> samples, const CoeffTable& table, double eps) {
  const int n = table.order();
  if (samples.size() != static_cast<std::size_t>(2 * n + 1))
    throw std::invalid_argument("curve_derivative: expected 2n + 1 samples");
  if (eps == 0.0) throw std::invalid_argument("curve_derivative: eps must be nonzero");
  Vec out(samples[0].size());
  for (int k = n; k >= 1; --k)
    out.axpy(table[k], samples[static_cast<std::size_t>(n + k)] - samples[static_cast<std::size_t>(n - k)]);
  return out / eps;
}

double reversibility_defect(const InterpolatingField& field, const Matrix& r, std::span<const Vec> points) {
  const MapFamily& map = field.map();
  if (r.size() != map.dim()) throw ConfigError("reversor dimension does not match the map");
  if ((r * r).max_abs_diff(Matrix::identity(r.size())) > 1e-12) throw ConfigError("reversor is not an involution");
  for (const Vec& x : points) {
    const Vec lhs = map.apply_inverse(x);
    const Vec rhs = r * map.apply(r * x);
    if (distance(lhs, rhs) > 1e-10 * std::max(1.0, x.norm()))
      throw ConfigError("matrix does not reverse the map at " + to_string(x));
  }
  double defect = 0.0;
  for (const Vec& x : points) defect = std::max(defect, (field.eval(r * x) + r * field.eval(x)).norm());
  return defect;
}

}  // namespace ivf
