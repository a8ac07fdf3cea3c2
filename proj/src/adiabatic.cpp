#include "ivf/adiabatic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ivf/csv.hpp"
#include "ivf/errors.hpp"
#include "ivf/parallel.hpp"

namespace ivf {

double symplectic_pairing(const Vec& u, const Vec& v) {
  if (u.size() % 2 != 0) throw ConfigError("symplectic pairing needs an even dimension");
  const std::size_t d = u.size() / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += u[i] * v[i + d] - u[i + d] * v[i];
  return s;
}

double one_form(const InterpolatingField& field, const Vec& x, const Vec& v) {
  if (x.size() % 2 != 0) throw ConfigError("one-form needs an even dimension");
  return symplectic_pairing(field.eval(x), v);
}

RombergResult romberg(const std::function<double(double)>& f, double a, double b, double tol,
                      int max_levels, int initial_panels) {
  if (initial_panels < 1 || max_levels < 2) throw std::invalid_argument("romberg: bad level settings");
  RombergResult res;
  std::vector<double> prev, cur;
  long panels = initial_panels;
  double h = (b - a) / static_cast<double>(panels);
  double sum = 0.5 * (f(a) + f(b));
  for (long i = 1; i < panels; ++i) sum += f(a + static_cast<double>(i) * h);
  res.evaluations = panels + 1;
  prev.push_back(sum * h);
  res.value = prev[0];
  res.achieved = std::numeric_limits<double>::infinity();
  for (int level = 1; level < max_levels; ++level) {
    // Midpoints of the current panels.
    double mid = 0.0;
    for (long i = 0; i < panels; ++i) mid += f(a + (static_cast<double>(i) + 0.5) * h);
    res.evaluations += panels;
    panels *= 2;
    h *= 0.5;
    cur.assign(static_cast<std::size_t>(level) + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * mid;
    double factor = 1.0;
    for (int j = 1; j <= level; ++j) {
      factor *= 4.0;
      cur[static_cast<std::size_t>(j)] =
          cur[static_cast<std::size_t>(j - 1)] +
          (cur[static_cast<std::size_t>(j - 1)] - prev[static_cast<std::size_t>(j - 1)]) / (factor - 1.0);
    }
    res.levels = level + 1;
    res.achieved = std::abs(cur.back() - prev.back());
    res.value = cur.back();
    if (res.achieved < tol) {
      res.converged = true;
      return res;
    }
    prev.swap(cur);
  }
  return res;
}

AdiabaticInvariant::AdiabaticInvariant(InterpolatingField field, Vec base, InvariantOptions opts)
    : field_(std::move(field)), base_(base), opts_(opts) {
  if (field_.map().dim() % 2 != 0) throw ConfigError("adiabatic invariant needs an even-dimensional map");
  field_.map().check_dim(base_);
  if (!(opts_.quad_tol > 0.0)) throw ConfigError("quad_tol must be positive");
  if (!field_.map().in_domain(base_)) throw ConfigError("base point outside the map domain");
}

namespace {

struct PathEscape {
  double s;
};

}  // namespace

InvariantEvaluation AdiabaticInvariant::evaluate(const Vec& x) const {
  const Vec target = chart_point(x);
  InvariantEvaluation out;
  // Straight path: one segment. Axis-parallel: one segment per coordinate, in index order.
  std::vector<std::pair<Vec, Vec>> segments;
  if (opts_.path == PathRule::straight) {
    segments.emplace_back(base_, target);
  } else {
    Vec p = base_;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Vec q = p;
      q[i] = target[i];
      if (q[i] != p[i]) segments.emplace_back(p, q);
      p = q;
    }
  }
  const double tol = opts_.quad_tol / static_cast<double>(std::max<std::size_t>(1, segments.size()));
  for (std::size_t seg = 0; seg < segments.size(); ++seg) {
    const Vec& a = segments[seg].first;
    const Vec v = segments[seg].second - a;
    auto integrand = [&](double s) {
      const Vec p = a + s * v;
      try {
        return symplectic_pairing(field_.eval(p), v);
      } catch (const DomainEscape&) {
        throw PathEscape{(static_cast<double>(seg) + s) / static_cast<double>(segments.size())};
      }
    };
    try {
      const RombergResult r = romberg(integrand, 0.0, 1.0, tol, opts_.max_levels);
      out.value += r.value;
      out.achieved = std::max(out.achieved, r.achieved);
      out.evaluations += r.evaluations;
      if (!r.converged) out.status = InvariantStatus::not_converged;
    } catch (const PathEscape& e) {
      out.status = InvariantStatus::domain_escape;
      out.escape_s = e.s;
      return out;
    }
  }
  return out;
}

double AdiabaticInvariant::operator()(const Vec& x) const {
  const InvariantEvaluation e = evaluate(x);
  switch (e.status) {
    case InvariantStatus::ok:
      return e.value;
    case InvariantStatus::not_converged:
      throw NumericalFailure("adiabatic invariant quadrature did not converge at " + to_string(x) +
                             " (best " + fmt_num(e.value) + ", achieved difference " + fmt_num(e.achieved) + ")");
    case InvariantStatus::domain_escape:
      throw NumericalFailure("domain escape along invariant path at s = " + fmt_num(e.escape_s) + " for " +
                             to_string(x));
  }
  return e.value;
}

double limit_hamiltonian(const MapFamily& map, const Vec& x) {
  if (!map.limit_hamiltonian()) throw ConfigError("map family '" + map.name() + "' has no closed-form limit Hamiltonian");
  map.check_dim(x);
  return (*map.limit_hamiltonian())(x);
}

std::vector<DeltaHRow> delta_h_scan(const MapFactory& family, const std::vector<int>& n_list,
                                    const std::vector<double>& eps_list, const GridSpec& grid, const Vec& base,
                                    const InvariantOptions& opts, int workers) {
  std::vector<DeltaHRow> rows;
  for (int n : n_list) {
    for (double eps : eps_list) {
      const MapFamily map = family(eps);
      grid.validate(map.dim());
      const AdiabaticInvariant h(InterpolatingField(map, n), base, opts);
      const std::size_t count = grid.size();
      std::vector<double> delta(count, std::numeric_limits<double>::quiet_NaN());
      parallel_for(count, workers, [&](std::size_t i) {
        const Vec x = grid.point(i);
        try {
          const InvariantEvaluation h0 = h.evaluate(x);
          if (!h0.ok()) return;
          const InvariantEvaluation h1 = h.evaluate(map.apply(x));
          if (!h1.ok()) return;
          delta[i] = std::abs(h1.value - h0.value);
        } catch (const std::exception&) {
        }
      });
      DeltaHRow row{n, eps, 0.0, 0, count, h.field().eval_count()};
      for (double d : delta) {
        if (std::isnan(d))
          ++row.failures;
        else
          row.max_delta_h = std::max(row.max_delta_h, d);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_delta_h_csv(std::ostream& os, const std::vector<DeltaHRow>& rows) {
  os << "n,epsilon,max_delta_h,failures\n";
  for (const DeltaHRow& r : rows)
    os << r.n << ',' << fmt_num(r.epsilon) << ',' << fmt_num(r.max_delta_h) << ',' << r.failures << '\n';
}

std::vector<SeriesPoint> invariant_series(const AdiabaticInvariant& h, const Vec& x0, long num_iterates,
                                          long stride) {
  if (stride < 1) throw std::invalid_argument("invariant_series: stride must be >= 1");
  const MapFamily& map = h.field().map();
  std::vector<SeriesPoint> out;
  Vec x = x0;
  for (long k = 0; k <= num_iterates; ++k) {
    if (k % stride == 0) {
      const InvariantEvaluation e = h.evaluate(x);
      out.push_back({k, e.ok() ? e.value : std::numeric_limits<double>::quiet_NaN()});
    }
    if (k == num_iterates) break;
    // Long orbits are kept reduced so lifted angles do not grow and eat precision.
    x = map.reduce(map.apply(x));
    if (!map.in_domain(x)) break;
  }
  return out;
}

void write_series_csv(std::ostream& os, const std::vector<SeriesPoint>& series) {
  os << "iterate_index,h_n\n";
  for (const SeriesPoint& p : series) os << p.index << ',' << fmt_num(p.value) << '\n';
}

}  // namespace ivf
