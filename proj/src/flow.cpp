#include "ivf/flow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ivf/csv.hpp"
#include "ivf/errors.hpp"
#include "ivf/parallel.hpp"

namespace ivf {

IntegrationResult try_advance(const InterpolatingField& field, const Vec& x, double t,
                              const IntegratorSettings& settings) {
  settings.validate();
  field.map().check_dim(x);
  return integrate_rkf78([&field](const Vec& y) { return field.eval(y); }, x, t, settings);
}

Vec advance(const InterpolatingField& field, const Vec& x, double t, const IntegratorSettings& settings) {
  IntegrationResult r = try_advance(field, x, t, settings);
  if (!r.ok()) throw IntegrationFailure(std::move(r));
  return r.state;
}

std::size_t GridSpec::size() const {
  std::size_t n = resolution.empty() ? 0 : 1;
  for (std::size_t r : resolution) n *= r;
  return n;
}

void GridSpec::validate(std::size_t dim) const {
  if (lower.size() != dim || upper.size() != dim || resolution.size() != dim)
    throw ConfigError("grid lower/upper/resolution must all have the map dimension");
  for (std::size_t i = 0; i < dim; ++i) {
    if (resolution[i] == 0) throw ConfigError("grid resolution must be positive");
    if (!(lower[i] <= upper[i])) throw ConfigError("grid lower bound exceeds upper bound");
  }
}

Vec GridSpec::point(std::size_t index) const {
  const std::size_t dim = resolution.size();
  Vec p(dim);
  for (std::size_t i = dim; i-- > 0;) {
    const std::size_t r = resolution[i];
    const std::size_t j = index % r;
    index /= r;
    p[i] = r == 1 ? lower[i] : lower[i] + (upper[i] - lower[i]) * static_cast<double>(j) / static_cast<double>(r - 1);
  }
  return p;
}

double ErrorGrid::max_log10() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : log10_err)
    if (!std::isnan(v)) m = std::max(m, v);
  return m;
}

void ErrorGrid::write_csv(std::ostream& os) const {
  const std::size_t dim = points.empty() ? 0 : points.front().size();
  for (std::size_t i = 0; i < dim; ++i) os << 'x' << (i + 1) << ',';
  os << "log10_err\n";
  for (std::size_t r = 0; r < points.size(); ++r) {
    for (std::size_t i = 0; i < dim; ++i) os << fmt_num(points[r][i]) << ',';
    os << fmt_num(log10_err[r]) << '\n';
  }
}

ErrorGrid flowmap_error_grid(const MapFamily& map, int n, const GridSpec& grid,
                             const IntegratorSettings& settings, int workers) {
  grid.validate(map.dim());
  settings.validate();
  const InterpolatingField field(map, n);
  ErrorGrid out;
  const std::size_t count = grid.size();
  out.points.resize(count);
  out.log10_err.assign(count, std::numeric_limits<double>::quiet_NaN());
  parallel_for(count, workers, [&](std::size_t i) {
    const Vec x0 = grid.point(i);
    out.points[i] = x0;
    try {
      const IntegrationResult r = try_advance(field, x0, map.time_step(), settings);
      if (!r.ok()) return;
      const double err = distance(r.state, map.apply(x0));
      out.log10_err[i] = std::log10(err);
    } catch (const std::exception&) {
      // recorded as a missing value
    }
  });
  for (double v : out.log10_err)
    if (std::isnan(v)) ++out.failures;
  out.field_evaluations = field.eval_count();
  return out;
}

}  // namespace ivf
