#include "ivf/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ivf/errors.hpp"

namespace ivf {

namespace {

// Fehlberg's 13-stage 7(8) pair.
constexpr int kStages = 13;

constexpr std::array<double, kStages> kC = {
    0.0, 2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 1.0 / 2.0, 5.0 / 6.0,
    1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0, 1.0};

constexpr double kA[kStages][kStages - 1] = {
    {},
    {2.0 / 27.0},
    {1.0 / 36.0, 1.0 / 12.0},
    {1.0 / 24.0, 0.0, 1.0 / 8.0},
    {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
    {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
    {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
    {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
    {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
    {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0,
     17.0 / 6.0, -1.0 / 12.0},
    {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0,
     2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0},
    {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0,
     6.0 / 41.0, 0.0},
    {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0,
     2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0}};

// 8th-order weights.
constexpr std::array<double, kStages> kB8 = {
    0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0,
    9.0 / 280.0, 9.0 / 280.0, 0.0, 41.0 / 840.0, 41.0 / 840.0};

// Difference of 7th and 8th order solutions: 41/840 (k0 + k10 - k11 - k12).
constexpr double kErr = 41.0 / 840.0;

}  // namespace

void IntegratorSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw std::invalid_argument("integrator tolerances must be positive");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max))
    throw std::invalid_argument("integrator step bounds must satisfy 0 < h_min <= h_init <= h_max");
  if (max_steps <= 0) throw std::invalid_argument("integrator max_steps must be positive");
}

const char* to_string(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::ok: return "ok";
    case IntegrationStatus::step_underflow: return "step_underflow";
    case IntegrationStatus::max_steps: return "max_steps";
    case IntegrationStatus::domain_escape: return "domain_escape";
  }
  return "unknown";
}

IntegrationResult integrate_rkf78(const VectorField& f, const Vec& x0, double t_end,
                                  const IntegratorSettings& s) {
  IntegrationResult res;
  res.state = x0;
  if (t_end == 0.0) return res;

  const double dir = t_end > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t_end);
  double h = std::min({s.h_init, s.h_max, span});
  double done = 0.0;
  Vec x = x0;
  std::array<Vec, kStages> k;

  try {
    while (done < span) {
      if (res.steps + res.rejected >= s.max_steps) {
        res.status = IntegrationStatus::max_steps;
        res.message = "integration exceeded max_steps";
        break;
      }
      const double remaining = span - done;
      const bool last = h >= remaining;
      const double hs = last ? remaining : h;
      const double hd = dir * hs;

      k[0] = f(x);
      for (int i = 1; i < kStages; ++i) {
        Vec xi = x;
        for (int j = 0; j < i; ++j)
          if (kA[i][j] != 0.0) xi.axpy(hd * kA[i][j], k[j]);
        k[i] = f(xi);
      }
      res.evaluations += kStages;

      Vec xn = x;
      for (int i = 0; i < kStages; ++i)
        if (kB8[i] != 0.0) xn.axpy(hd * kB8[i], k[i]);

      double err = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) {
        const double e = std::abs(hd * kErr * (k[0][c] + k[10][c] - k[11][c] - k[12][c]));
        const double scale = s.abs_tol + s.rel_tol * std::max(std::abs(x[c]), std::abs(xn[c]));
        err = std::max(err, e / scale);
      }
      if (!std::isfinite(err) || !xn.all_finite()) err = 1e10;

      if (err <= 1.0) {
        x = xn;
        done = last ? span : done + hs;
        ++res.steps;
        const double grow = err == 0.0 ? 4.0 : std::min(4.0, 0.9 * std::pow(err, -1.0 / 8.0));
        h = std::min(s.h_max, hs * grow);
      } else {
        ++res.rejected;
        h = hs * std::max(0.2, 0.9 * std::pow(err, -1.0 / 8.0));
        if (h < s.h_min) {
          res.status = IntegrationStatus::step_underflow;
          res.message = "step size fell below h_min";
          break;
        }
      }
    }
  } catch (const DomainEscape& e) {
    res.status = IntegrationStatus::domain_escape;
    res.message = std::string("domain escape during integration: ") + e.what();
  }

  res.state = x;
  res.t = dir * done;
  return res;
}

}  // namespace ivf
