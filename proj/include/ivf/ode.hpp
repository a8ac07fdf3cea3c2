#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "ivf/vec.hpp"

namespace ivf {

using VectorField = std::function<Vec(const Vec&)>;

struct IntegratorSettings {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  double h_init = 1e-2;
  double h_min = 1e-14;
  double h_max = 1.0;
  long max_steps = 1'000'000;

  /// Throws std::invalid_argument when the invariants are violated.
  void validate() const;

  /// Tight settings for oracle comparisons.
  static IntegratorSettings oracle() {
    IntegratorSettings s;
    s.abs_tol = s.rel_tol = 1e-12;
    return s;
  }
};

enum class IntegrationStatus { ok, step_underflow, max_steps, domain_escape };

const char* to_string(IntegrationStatus s);

struct IntegrationResult {
  IntegrationStatus status = IntegrationStatus::ok;
  Vec state;          ///< final state, or the last accepted state on failure
  double t = 0.0;     ///< time actually reached
  long steps = 0;     ///< accepted steps
  long rejected = 0;  ///< rejected steps
  long evaluations = 0;
  std::string message;
  bool ok() const { return status == IntegrationStatus::ok; }
};

/// Thrown by advance-style wrappers; carries the partial result.
class IntegrationFailure : public std::runtime_error {
 public:
  explicit IntegrationFailure(IntegrationResult r)
      : std::runtime_error(r.message), result_(std::move(r)) {}
  const IntegrationResult& result() const { return result_; }

 private:
  IntegrationResult result_;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of dx/dt = f(x) from x over
/// a time span t (either sign). The 8th-order solution is propagated; the
/// embedded 7th-order solution only drives step-size control. Exceptions of
/// type DomainEscape raised by f end the integration with status domain_escape.
IntegrationResult integrate_rkf78(const VectorField& f, const Vec& x, double t,
                                  const IntegratorSettings& settings);

}  // namespace ivf
