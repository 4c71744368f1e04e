#include "spike/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spike/error.hpp"
#include "spike/spectral.hpp"

namespace spike {

int window_order(double lambda) {
  if (!(lambda < -6.0)) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " lies outside every window [-(2n+2)(2n+3), -2n(2n+1)), n >= 1";
    throw Error(ErrorCode::WindowViolation, msg.str());
  }
  int n = 1;
  while (lambda < lambda_n(2 * n + 2)) ++n;
  return n;
}

namespace {

// Shot continued to the cap (stopping only at a zero).
ShootProfile continued(double lambda, double alpha, const Tolerances& tol) {
  return shoot(Params::from_lambda(alpha, lambda), tol);
}

std::vector<CriticalPoint> interior_criticals(const ShootProfile& p) {
  std::vector<CriticalPoint> out;
  for (const CriticalPoint& c : p.criticals) {
    if (c.tau < kHalfPi - kEndCriticalMargin) out.push_back(c);
  }
  return out;
}

// tau_k - pi/4, or +1 when tau_k does not exist.
double objective(double lambda, double alpha, int k, const Tolerances& tol) {
  const ShootProfile p = continued(lambda, alpha, tol);
  const auto cps = interior_criticals(p);
  if (static_cast<int>(cps.size()) < k) return 1.0;
  return cps[k - 1].tau - kQuarterPi;
}

}  // namespace

GroundState find_ground_state(double lambda, int k, const Tolerances& tol) {
  const int n = window_order(lambda);
  if (k < 1 || k > n) {
    std::ostringstream msg;
    msg << "k = " << k << " not in [1, " << n << "] for lambda = " << lambda;
    throw Error(ErrorCode::WindowViolation, msg.str());
  }
  // Near alpha = 1, tau_k approaches the k-th critical point of the
  // linearization, which lies before pi/4 inside the window.
  double hi = 0.0, ghi = 0.0;
  for (double gap : {1e-3, 1e-4, 1e-5, 1e-6}) {
    hi = 1.0 - gap;
    ghi = objective(lambda, hi, k, tol);
    if (ghi < 0.0) break;
  }
  if (!(ghi < 0.0)) throw Error(ErrorCode::NoSignChange, "find_ground_state: tau_k >= pi/4 near alpha = 1");

  // Walk down until tau_k reaches pi/4 (or ceases to exist).
  constexpr int kSteps = 400;
  double lo = 0.0, glo = 0.0;
  bool found = false;
  std::vector<double> samples_g;
  double prev_a = hi, prev_g = ghi;
  std::vector<double> roots;
  for (int i = 1; i <= kSteps; ++i) {
    const double a = hi * (1.0 - static_cast<double>(i) / kSteps) + 1e-9;
    if (!(a > 0.0) || a >= prev_a) break;
    const double g = objective(lambda, a, k, tol);
    if (!found && g >= 0.0) {
      lo = a;
      glo = g;
      hi = prev_a;
      ghi = prev_g;
      found = true;
    } else if (found && (g >= 0.0) != (prev_g >= 0.0) && g < 1.0 && prev_g < 1.0) {
      roots.push_back(0.5 * (a + prev_a));
    }
    prev_a = a;
    prev_g = g;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "find_ground_state: no sign change of tau_" << k << " - pi/4 on (0, 1) for lambda = " << lambda;
    throw Error(ErrorCode::NoSignChange, msg.str());
  }
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (!(m > lo && m < hi)) break;
    const double g = objective(lambda, m, k, tol);
    if (g >= 0.0) {
      lo = m;
      glo = g;
    } else {
      hi = m;
      ghi = g;
    }
  }
  const double alpha0 = std::fabs(ghi) <= std::fabs(glo) ? hi : lo;

  GroundState gs;
  gs.n = n;
  gs.k = k;
  gs.alpha0 = alpha0;
  gs.lambda = lambda;
  const Params p = Params::from_lambda(alpha0, lambda);
  gs.half = integrate_ivp(p.with_theta_end(kQuarterPi), tol, true);
  const ShootProfile full = continued(lambda, alpha0, tol);
  gs.full = full.trajectory;
  for (const CriticalPoint& c : interior_criticals(full)) {
    if (c.kind == CriticalKind::Max) ++gs.maxima;
  }
  gs.du_quarter = gs.full.du(kQuarterPi);
  gs.symmetry_residual = symmetry_residual(gs.full);
  gs.other_roots = std::move(roots);
  if (std::fabs(std::min(std::fabs(ghi), std::fabs(glo))) > 1e-6) {
    std::ostringstream msg;
    msg << "find_ground_state: bracket collapsed on a jump of tau_" << k << " at alpha = " << alpha0;
    throw Error(ErrorCode::NoSignChange, msg.str());
  }
  return gs;
}

double symmetry_residual(const Trajectory& full, std::size_t grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::Domain, "symmetry_residual: grid_size must be >= 2");
  const double a = kQuarterPi;
  const double b = full.theta_end();
  if (!(b > a) || !full.covers(kHalfPi - b)) {
    throw Error(ErrorCode::Domain, "symmetry_residual: trajectory does not cover the mirror span");
  }
  double r = 0.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double th = a + (b - a) * static_cast<double>(i) / (grid_size - 1);
    r = std::max(r, std::fabs(full.u(kHalfPi - th) - full.u(th)));
  }
  return r;
}

double symmetry_residual(const GroundState& gs, std::size_t grid_size) {
  return symmetry_residual(gs.full, grid_size);
}

int critical_count(double lambda, double alpha, const Tolerances& tol) {
  return static_cast<int>(interior_criticals(continued(lambda, alpha, tol)).size());
}

AlphaStar alpha_star(double lambda, int k, const Tolerances& tol) {
  if (!(lambda < 0.0)) throw Error(ErrorCode::Domain, "alpha_star: lambda must be < 0");
  auto pred = [&](double a) { return critical_count(lambda, a, tol) >= k; };
  double top = 1.0 - 1e-6;
  if (!pred(top)) {
    std::ostringstream msg;
    msg << "alpha_star: fewer than " << k << " critical points even near alpha = 1 (lambda = " << lambda << ")";
    throw Error(ErrorCode::PredicateAlwaysFalse, msg.str());
  }
  // Downward sweep: uniform steps, then geometric below the first step.
  std::vector<double> probes;
  for (int i = 1; i < 256; ++i) probes.push_back(1.0 - static_cast<double>(i) / 256.0);
  for (double a = 1.0 / 256.0; a > 1e-40; a *= 0.25) probes.push_back(a);
  double hi = top, lo = 0.0;
  bool found = false;
  for (double a : probes) {
    if (pred(a)) {
      hi = a;
    } else {
      lo = a;
      found = true;
      break;
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "alpha_star: predicate holds down to alpha = 1e-40 (lambda = " << lambda << ", k = " << k << ")";
    throw Error(ErrorCode::PredicateAlwaysTrue, msg.str());
  }
  while (hi - lo > 1e-6 * std::max(hi, 1e-300) && hi - lo > 1e-300) {
    const double m = hi > 2.0 * lo ? std::sqrt(std::max(lo, 1e-300) * hi) : 0.5 * (lo + hi);
    if (!(m > lo && m < hi)) break;
    if (pred(m)) hi = m;
    else lo = m;
  }
  AlphaStar s;
  s.k = k;
  s.lambda = lambda;
  s.bracket = {lo, hi};
  s.value = 0.5 * (lo + hi);
  return s;
}

}  // namespace spike
