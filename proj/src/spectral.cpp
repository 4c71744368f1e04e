#include "spike/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "probe.hpp"
#include "roots.hpp"
#include "spike/error.hpp"
#include "spike/integrator.hpp"
#include "spike/kernels/dispatch.hpp"
#include "spike/shooting.hpp"

namespace spike {

namespace {

Rational exact_lambda(int n) { return Rational(-static_cast<long long>(n) * (n + 1)); }

// Derivative coefficients in t: d/dt sum a_j t^(n-2j), stored on t^(n-1-2j).
std::vector<double> dt_coeffs(const CosPoly& p) {
  std::vector<double> d;
  for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
    const int k = p.n - 2 * static_cast<int>(j);
    if (k > 0) d.push_back(k * p.coeffs[j]);
  }
  return d;
}

double horner_one(const std::vector<double>& c, int parity, double t) {
  double acc = 0.0;
  const double t2 = t * t;
  for (double v : c) acc = acc * t2 + v;
  return parity ? acc * t : acc;
}

}  // namespace

CosPoly ExactCosPoly::to_double() const {
  CosPoly p;
  p.n = n;
  p.coeffs.reserve(coeffs.size());
  for (const Rational& c : coeffs) p.coeffs.push_back(static_cast<double>(c));
  return p;
}

ExactCosPoly eigen_poly_exact(int n) {
  if (n < 0) throw Error(ErrorCode::Domain, "eigen_poly: n must be >= 0");
  ExactCosPoly p;
  p.n = n;
  p.coeffs.push_back(Rational(1));
  const Rational ln = exact_lambda(n);
  for (int j = 0; 2 * j + 2 <= n; ++j) {
    const int k = n - 2 * j;
    p.coeffs.push_back(-Rational(k * (k - 1)) * p.coeffs.back() / (exact_lambda(k - 2) - ln));
  }
  Rational sum(0);
  for (const Rational& c : p.coeffs) sum += c;
  for (Rational& c : p.coeffs) c /= sum;
  return p;
}

CosPoly eigen_poly(int n) { return eigen_poly_exact(n).to_double(); }

Rational eval_exact(const ExactCosPoly& p, const Rational& t) {
  Rational acc(0);
  const Rational t2 = t * t;
  for (const Rational& c : p.coeffs) acc = acc * t2 + c;
  return p.n % 2 ? acc * t : acc;
}

std::vector<Rational> apply_operator_exact(const ExactCosPoly& p, const Rational& c) {
  std::vector<Rational> out(p.coeffs.size(), Rational(0));
  for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
    const int k = p.n - 2 * static_cast<int>(j);
    out[j] += (4 * exact_lambda(k) - c) * p.coeffs[j];
    if (k >= 2) {
      if (j + 1 >= out.size()) out.emplace_back(0);
      out[j + 1] += Rational(4 * k * (k - 1)) * p.coeffs[j];
    }
  }
  return out;
}

std::vector<double> apply_operator(const CosPoly& p, double c) {
  std::vector<double> out(p.coeffs.size(), 0.0);
  for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
    const int k = p.n - 2 * static_cast<int>(j);
    out[j] += (4.0 * lambda_n(k) - c) * p.coeffs[j];
    if (k >= 2) {
      if (j + 1 >= out.size()) out.push_back(0.0);
      out[j + 1] += 4.0 * k * (k - 1) * p.coeffs[j];
    }
  }
  return out;
}

double eval_cospoly(const CosPoly& p, double theta) {
  return horner_one(p.coeffs, p.n % 2, std::cos(2.0 * theta));
}

double eval_cospoly_derivative(const CosPoly& p, double theta) {
  if (p.n == 0) return 0.0;
  const double wt = horner_one(dt_coeffs(p), (p.n - 1) % 2, std::cos(2.0 * theta));
  return -2.0 * std::sin(2.0 * theta) * wt;
}

void eval_cospoly_grid(const CosPoly& p, std::span<const double> thetas, std::span<double> out) {
  if (out.size() != thetas.size()) throw Error(ErrorCode::Domain, "eval_cospoly_grid: size mismatch");
  std::vector<double> t(thetas.size());
  std::transform(thetas.begin(), thetas.end(), t.begin(), [](double th) { return std::cos(2.0 * th); });
  kernels::horner_parity(p.coeffs, p.n % 2, t, out);
}

Trajectory solve_linearized(double lambda, const Tolerances& tol) {
  if (!(lambda < 0.0)) throw Error(ErrorCode::Domain, "solve_linearized: lambda must be < 0");
  tol.validate();
  IntegrationTask task;
  task.eq = Equation::linearized(lambda);
  task.series = even_series(1.0, 4.0 * lambda, 4.0 * lambda);
  task.start = {tol.theta0, task.series->u_at(tol.theta0), task.series->du_at(tol.theta0)};
  task.control.rel_tol = tol.rel_tol;
  task.control.abs_tol = tol.abs_tol;
  task.control.event_tol = tol.event_tol;
  task.control.t_end = kHalfPi - tol.end_guard;
  // Linear: growth near pi/2 is logarithmic, never a blowup signal.
  task.control.blowup = 1e12;
  return integrate(task);
}

StructureCounts count_structure(const Trajectory& w, double event_tol) {
  StructureCounts c;
  double last_zero = -1.0;
  double prev_t = 0.0, prev_u = 0.0;
  bool have_prev = false;
  detail::for_each_probe(w, [&](double th, const State& s) {
    if (s.u == 0.0) return;
    if (have_prev && (s.u > 0.0) != (prev_u > 0.0)) {
      const double z = detail::bracketed_root([&](double x) { return w.u(x); }, prev_t, th,
                                              prev_u, s.u, event_tol);
      if (last_zero < 0.0 || z - last_zero >= kZeroSeparation) ++c.zeros;
      last_zero = z;
    }
    prev_t = th;
    prev_u = s.u;
    have_prev = true;
  });
  for (const CriticalPoint& cp : critical_points(w, event_tol)) {
    if (cp.tau > kHalfPi - kEndCriticalMargin) continue;
    ++c.criticals;
    if (cp.tau < kQuarterPi) ++c.criticals_before_quarter;
  }
  return c;
}

StructureCounts count_structure(double lambda, const Tolerances& tol) {
  return count_structure(solve_linearized(lambda, tol), tol.event_tol);
}

}  // namespace spike
