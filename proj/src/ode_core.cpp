#include "spike/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spike/error.hpp"
#include "spike/integrator.hpp"
#include "kernels/dopri_tableau.hpp"

namespace spike {

void Tolerances::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::Domain, std::string(name) + " must be finite and > 0");
    }
  };
  positive(rel_tol, "rel_tol");
  positive(abs_tol, "abs_tol");
  positive(event_tol, "event_tol");
  positive(theta0, "theta0");
  positive(end_guard, "end_guard");
  if (!(theta0 < 1e-2)) throw Error(ErrorCode::Domain, "theta0 must be < 1e-2");
  if (end_guard > 1e-6 * kPi) throw Error(ErrorCode::Domain, "end_guard must be <= 1e-6 pi");
}

Tolerances Tolerances::tightened(double factor) const {
  Tolerances t = *this;
  t.rel_tol *= factor;
  t.abs_tol *= factor;
  return t;
}

Params::Params(double alpha, double epsilon, double lambda)
    : alpha_(alpha), epsilon_(epsilon), lambda_(lambda) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 1], got " << alpha;
    throw Error(ErrorCode::Domain, msg.str());
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon) || !(lambda < 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::Domain, "epsilon must be > 0 and lambda < 0");
  }
}

Params Params::from_lambda(double alpha, double lambda) {
  if (!(lambda < 0.0)) throw Error(ErrorCode::Domain, "lambda must be negative");
  return Params(alpha, 1.0 / std::sqrt(-lambda), lambda);
}

Params Params::from_epsilon(double alpha, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::Domain, "epsilon must be positive");
  return Params(alpha, epsilon, -1.0 / (epsilon * epsilon));
}

Params Params::with_alpha(double alpha) const {
  Params p(alpha, epsilon_, lambda_);
  p.theta_end_ = theta_end_;
  return p;
}

Params Params::with_theta_end(double theta_end) const {
  if (!(theta_end > 0.0)) throw Error(ErrorCode::Domain, "theta_end must be positive");
  Params p = *this;
  p.theta_end_ = std::min(theta_end, kHalfPi);
  return p;
}

double friction(double theta) { return kernels::dp::cot_friction(theta); }

double rhs(double theta, double u, double du, double lambda) {
  if (!(theta > 0.0 && theta < kHalfPi)) {
    throw Error(ErrorCode::Domain, "rhs: theta outside (0, pi/2)");
  }
  const double g = lambda * (std::pow(u, 5) - u);
  if (du == 0.0) return g;
  return g - friction(theta) * du;
}

EvenSeries even_series(double alpha, double g, double dg) {
  EvenSeries s;
  s.c0 = alpha;
  s.c2 = g / 4.0;
  s.c4 = s.c2 * (dg + 8.0 / 3.0) / 16.0;
  return s;
}

EvenSeries start_series(const Params& params) {
  const double a = params.alpha();
  const double lam = params.lambda();
  const double a4 = a * a * a * a;
  return even_series(a, lam * (a4 * a - a), lam * (5.0 * a4 - 1.0));
}

State taylor_start(const Params& params, double theta0) {
  if (!(theta0 > 0.0)) throw Error(ErrorCode::Domain, "taylor_start: theta0 must be > 0");
  const EvenSeries s = start_series(params);
  return {theta0, s.u_at(theta0), s.du_at(theta0)};
}

IntegrationTask ivp_task(const Params& params, const Tolerances& tol, bool stop_on_zero) {
  tol.validate();
  IntegrationTask task;
  task.eq = Equation::reduced(params.lambda());
  task.start = taylor_start(params, tol.theta0);
  task.series = start_series(params);
  task.control.rel_tol = tol.rel_tol;
  task.control.abs_tol = tol.abs_tol;
  task.control.atol_scale = std::min(1.0, params.alpha());
  task.control.event_tol = tol.event_tol;
  task.control.t_end = std::min(params.theta_end(), kHalfPi - tol.end_guard);
  task.control.stop_on_zero = stop_on_zero;
  return task;
}

Trajectory integrate_ivp(const Params& params, const Tolerances& tol, bool stop_on_zero) {
  return integrate(ivp_task(params, tol, stop_on_zero));
}

}  // namespace spike
