#include "ivf/section.hpp"

#include <cmath>
#include <limits>

#include "ivf/csv.hpp"
#include "ivf/errors.hpp"
#include "ivf/flow.hpp"
#include "ivf/parallel.hpp"

namespace ivf {

SectionSpec angle_difference_section(std::size_t i, std::size_t j, std::size_t dim) {
  if (i >= dim || j >= dim || i == j) throw ConfigError("angle_difference_section: bad coordinate indices");
  SectionSpec s;
  s.g = [i, j](const Vec& x) { return wrap_angle(x[i] - x[j]); };
  s.grad_g = [i, j, dim](const Vec&) {
    Vec d(dim);
    d[i] = 1.0;
    d[j] = -1.0;
    return d;
  };
  s.local_bound = kPi / 2.0;
  return s;
}

SectionSpec coordinate_section(std::size_t i, double value, std::size_t dim) {
  if (i >= dim) throw ConfigError("coordinate_section: bad coordinate index");
  SectionSpec s;
  s.g = [i, value](const Vec& x) { return x[i] - value; };
  s.grad_g = [i, dim](const Vec&) {
    Vec d(dim);
    d[i] = 1.0;
    return d;
  };
  return s;
}

CrossingScan detect_crossings(const MapFamily& map, const Vec& x0, long num_iterates, const SectionSpec& spec) {
  map.check_dim(x0);
  CrossingScan out;
  Vec x = map.reduce(x0);
  if (!map.in_domain(x)) {
    out.escape_index = 0;
    return out;
  }
  double gx = spec.g(x);
  int zero_run = std::abs(gx) < spec.newton_tol ? 1 : 0;
  for (long k = 0; k < num_iterates; ++k) {
    Vec next = map.reduce(map.apply(x));
    out.iterates = k + 1;
    if (!map.in_domain(next)) {
      out.escape_index = k + 1;
      return out;
    }
    const double gn = spec.g(next);
    zero_run = std::abs(gn) < spec.newton_tol ? zero_run + 1 : 0;
    if (zero_run >= 3) {
      out.in_section_orbit = true;
      out.crossings.clear();
      return out;
    }
    if (gx * gn <= 0.0 && std::abs(gx) < spec.local_bound && std::abs(gn) < spec.local_bound)
      out.crossings.push_back({k, x, next});
    x = next;
    gx = gn;
  }
  return out;
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

ProjectionOutcome project_crossing(const InterpolatingField& field, const Vec& x_k, const SectionSpec& spec,
                                   const IntegratorSettings& settings, long k) {
  ProjectionOutcome out;
  const double h = field.map().time_step();
  const double tol = spec.newton_tol;
  auto slope = [&](const Vec& y) { return dot(spec.grad_g(y), field.eval(y)); };
  auto finish = [&](double t, const Vec& y, double s) {
    const double d = slope(y);
    if (std::abs(d) < spec.transversality_floor) {
      out.skip_reason = "tangency: |grad g . X_n| below transversality floor";
      return;
    }
    out.record = CrossingRecord{k, x_k, t, y, std::abs(s), sign_of(d)};
  };

  const double s0 = spec.g(x_k);
  if (std::abs(s0) <= tol) {
    finish(0.0, x_k, s0);
    return out;
  }
  IntegrationResult full = try_advance(field, x_k, h, settings);
  if (!full.ok()) {
    out.skip_reason = std::string("integration failed: ") + full.message;
    return out;
  }
  const double sh = spec.g(full.state);
  if (s0 * sh > 0.0) {
    if (std::abs(sh) <= tol) {
      finish(h, full.state, sh);
    } else {
      out.skip_reason = "no sign change of g along the field within one time step";
    }
    return out;
  }

  // Bracket in time: lo keeps the sign of s0.
  double t_lo = 0.0, s_lo = s0, t_hi = h, s_hi = sh;
  Vec y_lo = x_k;
  double t = t_lo + (t_hi - t_lo) * s_lo / (s_lo - s_hi);
  const int max_iter = spec.newton_max_iter + 200;
  for (int it = 0; it < max_iter; ++it) {
    IntegrationResult r = try_advance(field, y_lo, t - t_lo, settings);
    if (!r.ok()) {
      out.skip_reason = std::string("integration failed: ") + r.message;
      return out;
    }
    const Vec y = r.state;
    const double s = spec.g(y);
    if (std::abs(s) < tol) {
      finish(t, y, s);
      return out;
    }
    if (sign_of(s) == sign_of(s_lo)) {
      t_lo = t;
      s_lo = s;
      y_lo = y;
    } else {
      t_hi = t;
      s_hi = s;
    }
    double next = 0.5 * (t_lo + t_hi);
    if (it < spec.newton_max_iter) {
      const double d = slope(y);
      if (std::abs(d) >= spec.transversality_floor) {
        const double cand = t - s / d;
        if ((cand - t_lo) * (cand - t_hi) < 0.0) next = cand;
      }
    }
    if (next == t_lo || next == t_hi) {
      // Bracket collapsed to adjacent doubles; accept the better end.
      finish(t, y, s);
      if (out.record && out.record->residual > tol) {
        out.record.reset();
        out.skip_reason = "root bracket collapsed above tolerance";
      }
      return out;
    }
    t = next;
  }
  out.skip_reason = "root refinement did not converge";
  return out;
}

SeedResult seed_levelset(const AdiabaticInvariant& h, double energy, const std::vector<double>& psi_values,
                         std::size_t count) {
  const MapFamily& map = h.field().map();
  if (map.dim() != 4) throw ConfigError("seed_levelset needs a four-dimensional map (psi1, psi2, J1, J2)");
  SeedResult out;
  const double tol = h.options().quad_tol;
  auto value = [&](double psi, double j1, double j2) { return h(Vec{psi, psi, j1, j2}) - energy; };

  for (double psi : psi_values) {
    // Bracket along J1 = 0, J2 > 0.
    double lo = 0.0, f_lo = value(psi, 0.0, 0.0);
    if (f_lo >= 0.0) {
      out.log.push_back("psi " + fmt_num(psi) + ": energy not above the invariant at J = 0, skipped");
      continue;
    }
    double hi = 0.5, f_hi = value(psi, 0.0, hi);
    while (f_hi < 0.0 && hi < 64.0) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = value(psi, 0.0, hi);
    }
    if (f_hi < 0.0) {
      out.log.push_back("psi " + fmt_num(psi) + ": no bracket for J2 up to 64, skipped");
      continue;
    }
    double j2 = hi;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = value(psi, 0.0, mid);
      if (f < 0.0) lo = mid; else hi = mid;
      j2 = mid;
      if (std::abs(f) <= tol) break;
    }

    // Level curve of h at fixed (psi, psi) in the (J1, J2) plane.
    constexpr double kDelta = 1e-5;
    auto aux = [&](const Vec& j) {
      const double dh_dj1 = (value(psi, j[0] + kDelta, j[1]) - value(psi, j[0] - kDelta, j[1])) / (2 * kDelta);
      const double dh_dj2 = (value(psi, j[0], j[1] + kDelta) - value(psi, j[0], j[1] - kDelta)) / (2 * kDelta);
      return Vec{-dh_dj2, dh_dj1};
    };
    IntegratorSettings s;
    s.abs_tol = s.rel_tol = 1e-7;
    s.h_init = 1e-2;
    s.h_max = 0.5;
    s.h_min = 1e-10;
    s.max_steps = 100000;

    // Pass 1: time for one loop around the origin.
    constexpr double kChunk = 0.05;
    Vec j{0.0, j2};
    double turned = 0.0, elapsed = 0.0, period = 0.0;
    bool failed = false;
    for (int chunk = 0; chunk < 100000; ++chunk) {
      IntegrationResult r = integrate_rkf78(aux, j, kChunk, s);
      if (!r.ok()) {
        failed = true;
        break;
      }
      const double dphi = wrap_angle(std::atan2(r.state[1], r.state[0]) - std::atan2(j[1], j[0]));
      if (std::abs(turned + dphi) >= kTwoPi) {
        period = elapsed + kChunk * (kTwoPi - std::abs(turned)) / std::abs(dphi);
        break;
      }
      turned += dphi;
      elapsed += kChunk;
      j = r.state;
    }
    if (failed || period <= 0.0) {
      out.log.push_back("psi " + fmt_num(psi) + ": level curve integration failed, skipped");
      continue;
    }

    // Pass 2: count points equally spaced in time, each projected radially onto h = E.
    j = Vec{0.0, j2};
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0) {
        IntegrationResult r = integrate_rkf78(aux, j, period / static_cast<double>(count), s);
        if (!r.ok()) {
          out.log.push_back("psi " + fmt_num(psi) + ": level curve integration left the domain, truncated");
          break;
        }
        j = r.state;
      }
      auto radial = [&](double scale) { return value(psi, scale * j[0], scale * j[1]); };
      double a = 1.0, b = 1.0, fa = radial(1.0), fb = fa;
      if (std::abs(fa) > tol) {
        // Expand a bracket around scale 1, then bisect.
        double step = 1e-3;
        for (int it = 0; it < 60 && fa * fb > 0.0; ++it) {
          a = 1.0 - step;
          b = 1.0 + step;
          fa = radial(a);
          fb = radial(b);
          step *= 2.0;
          if (a <= 0.0) break;
        }
        if (fa * fb > 0.0) {
          out.log.push_back("psi " + fmt_num(psi) + ": radial projection failed for a level-curve point");
          continue;
        }
        double scale = 1.0;
        for (int it = 0; it < 200; ++it) {
          scale = 0.5 * (a + b);
          const double f = radial(scale);
          if (std::abs(f) <= tol || b - a < 1e-15) break;
          if ((f < 0.0) == (fa < 0.0)) {
            a = scale;
            fa = f;
          } else {
            b = scale;
          }
        }
        j = j * scale;
      }
      out.seeds.push_back(Vec{psi, psi, j[0], j[1]});
    }
  }
  return out;
}

SectionCloud section_cloud(const InterpolatingField& field, const SectionSpec& spec, const std::vector<Vec>& seeds,
                           std::size_t crossings_per_seed, const IntegratorSettings& settings,
                           long max_iterates_per_seed, int workers) {
  settings.validate();
  const MapFamily& map = field.map();
  const std::uint64_t evals_before = field.eval_count();
  std::vector<std::vector<CloudRecord>> per_seed(seeds.size());
  std::vector<SeedStatus> status(seeds.size());
  std::vector<std::vector<std::string>> logs(seeds.size());

  parallel_for(seeds.size(), workers, [&](std::size_t sid) {
    SeedStatus& st = status[sid];
    map.check_dim(seeds[sid]);
    Vec x = map.reduce(seeds[sid]);
    if (!map.in_domain(x)) {
      st.escaped = true;
      return;
    }
    double gx = spec.g(x);
    int zero_run = std::abs(gx) < spec.newton_tol ? 1 : 0;
    for (long k = 0; k < max_iterates_per_seed && st.collected < crossings_per_seed; ++k) {
      const Vec next = map.reduce(map.apply(x));
      st.iterates = k + 1;
      if (!map.in_domain(next)) {
        st.escaped = true;
        break;
      }
      const double gn = spec.g(next);
      zero_run = std::abs(gn) < spec.newton_tol ? zero_run + 1 : 0;
      if (zero_run >= 3) {
        st.in_section_orbit = true;
        break;
      }
      if (gx * gn <= 0.0 && std::abs(gx) < spec.local_bound && std::abs(gn) < spec.local_bound) {
        ProjectionOutcome p = project_crossing(field, x, spec, settings, k);
        if (p.record) {
          CloudRecord rec;
          rec.seed_id = sid;
          rec.psi = map.angle_mask()[0] ? wrap_angle(p.record->y[0]) : p.record->y[0];
          rec.phi = map.dim() == 4 ? std::atan2(p.record->y[3], p.record->y[2])
                                   : std::numeric_limits<double>::quiet_NaN();
          rec.crossing = std::move(*p.record);
          per_seed[sid].push_back(std::move(rec));
          ++st.collected;
        } else {
          ++st.skipped;
          logs[sid].push_back("seed " + std::to_string(sid) + " k " + std::to_string(k) + ": " + p.skip_reason);
        }
      }
      x = next;
      gx = gn;
    }
    st.exhausted = !st.escaped && !st.in_section_orbit && st.collected < crossings_per_seed;
  });

  SectionCloud cloud;
  cloud.seeds = std::move(status);
  for (std::size_t sid = 0; sid < seeds.size(); ++sid) {
    for (CloudRecord& r : per_seed[sid]) cloud.records.push_back(std::move(r));
    for (std::string& l : logs[sid]) cloud.log.push_back(std::move(l));
  }
  cloud.field_evaluations = field.eval_count() - evals_before;
  return cloud;
}

void write_cloud_csv(std::ostream& os, const SectionCloud& cloud) {
  const std::size_t dim = cloud.records.empty() ? 0 : cloud.records.front().crossing.y.size();
  os << "seed_id,k,t_k";
  for (std::size_t i = 0; i < dim; ++i) os << ",y" << (i + 1);
  os << ",psi,phi,residual,direction\n";
  for (const CloudRecord& r : cloud.records) {
    os << r.seed_id << ',' << r.crossing.k << ',' << fmt_num(r.crossing.t);
    for (std::size_t i = 0; i < dim; ++i) os << ',' << fmt_num(r.crossing.y[i]);
    os << ',' << fmt_num(r.psi) << ',' << fmt_num(r.phi) << ',' << fmt_num(r.crossing.residual) << ','
       << r.crossing.direction << '\n';
  }
}

std::vector<SeriesPoint> section_invariant_series(const AdiabaticInvariant& h, const SectionSpec& spec,
                                                  const Vec& x0, long num_iterates, long every,
                                                  const IntegratorSettings& settings) {
  if (every < 1) throw std::invalid_argument("section_invariant_series: every must be >= 1");
  const InterpolatingField& field = h.field();
  const MapFamily& map = field.map();
  std::vector<SeriesPoint> out;
  Vec x = map.reduce(x0);
  double gx = spec.g(x);
  long crossing = 0;
  for (long k = 0; k < num_iterates; ++k) {
    const Vec next = map.reduce(map.apply(x));
    if (!map.in_domain(next)) break;
    const double gn = spec.g(next);
    if (gx * gn <= 0.0 && std::abs(gx) < spec.local_bound && std::abs(gn) < spec.local_bound) {
      if (crossing % every == 0) {
        const ProjectionOutcome p = project_crossing(field, x, spec, settings, k);
        if (p.record) {
          const InvariantEvaluation e = h.evaluate(p.record->y);
          out.push_back({k, e.ok() ? e.value : std::numeric_limits<double>::quiet_NaN()});
        }
      }
      ++crossing;
    }
    x = next;
    gx = gn;
  }
  return out;
}

}  // namespace ivf
