#include "spike/limit_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "probe.hpp"
#include "spike/error.hpp"
#include "spike/integrator.hpp"

namespace spike {

double z0(double s) { return kSigma / std::sqrt(std::cosh(2.0 * s)); }

double z0_prime(double s) { return -z0(s) * std::tanh(2.0 * s); }

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Oscillatory: return "Oscillatory";
    case ProfileKind::VanishesLeft: return "VanishesLeft";
    case ProfileKind::Homoclinic: return "Homoclinic";
  }
  return "Unknown";
}

namespace {

double profile_energy(double z, double dz) {
  const double z2 = z * z;
  return dz * dz / 2.0 + z2 * z2 * z2 / 6.0 - z2 / 2.0;
}

}  // namespace

ProfileClass classify_profile(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::Domain, "classify_profile: alpha must be > 0");
  }
  const bool near_sigma = std::fabs(alpha - kSigma) <= kHomoclinicTolerance;
  ProfileClass out;
  out.alpha = alpha;
  const double a2 = alpha * alpha;
  out.energy = a2 * a2 * a2 / 6.0 - a2 / 2.0;
  out.window = near_sigma ? kHomoclinicWindow : kProfileWindow;

  IntegrationTask task;
  task.eq = Equation::profile();
  task.start = {0.0, alpha, 0.0};
  task.control.rel_tol = 1e-12;
  task.control.abs_tol = 1e-13;
  task.control.event_tol = 1e-12;
  task.control.t_end = out.window;
  task.control.h_max = 0.05;
  task.control.stop_on_zero = true;
  out.run = integrate(task);

  for (const State& s : out.run.nodes()) {
    out.energy_drift = std::max(out.energy_drift, std::fabs(profile_energy(s.u, s.du) - out.energy));
  }

  if (out.run.terminal_reason() == Terminal::HitZero) {
    out.kind = ProfileKind::VanishesLeft;
    out.event_s = -out.run.theta_end();
    return out;
  }
  if (near_sigma) {
    // Shadowing the separatrix: require monotone decay over the window.
    bool monotone = true;
    for (const State& s : out.run.nodes()) {
      if (s.theta > 0.0 && !(s.du < 0.0)) monotone = false;
    }
    const double z_end = out.run.nodes().back().u;
    if (monotone && z_end < 1e-6) {
      out.kind = ProfileKind::Homoclinic;
      return out;
    }
    std::ostringstream msg;
    msg << "classify_profile: separatrix run did not decay monotonically (Z(" << -out.window
        << ") = " << z_end << ")";
    throw Error(ErrorCode::Inconclusive, msg.str());
  }
  int crossings = 0;
  double prev = 0.0;
  bool have_prev = false;
  detail::for_each_probe(out.run, [&](double th, const State& s) {
    const double d = s.u - 1.0;
    if (d == 0.0) return;
    if (have_prev && (d > 0.0) != (prev > 0.0)) {
      ++crossings;
      if (crossings == 2 && !out.event_s) out.event_s = -th;
    }
    prev = d;
    have_prev = true;
  });
  if (crossings >= 2) {
    out.kind = ProfileKind::Oscillatory;
    return out;
  }
  std::ostringstream msg;
  msg << "classify_profile: no decisive event for alpha = " << alpha << " on |s| <= " << out.window;
  throw Error(ErrorCode::Inconclusive, msg.str());
}

RescaledTrajectory rescale(const ShootProfile& profile, double t_ref, std::size_t samples,
                           double tol) {
  const Trajectory& tr = profile.trajectory;
  bool ok = false;
  for (const CriticalPoint& c : profile.criticals) {
    if (c.kind == CriticalKind::Max && std::fabs(c.tau - t_ref) <= tol) ok = true;
  }
  if (!ok && profile.criticals.empty()) {
    ok = std::all_of(tr.nodes().begin(), tr.nodes().end(), [](const State& s) { return s.du == 0.0; });
  }
  if (!ok || !tr.covers(t_ref) || !(t_ref > kQuarterPi)) {
    throw Error(ErrorCode::Domain, "rescale: t_ref is not a maximum of the profile");
  }
  if (samples < 2) throw Error(ErrorCode::Domain, "rescale: need at least 2 samples");
  const double eps = profile.params.epsilon();
  RescaledTrajectory r;
  r.epsilon = eps;
  r.t_ref = t_ref;
  const double s_lo = (kQuarterPi - t_ref) / eps;
  r.samples.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = i + 1 == samples ? 0.0 : s_lo * (1.0 - static_cast<double>(i) / (samples - 1));
    const State st = tr.eval(t_ref + eps * s);
    r.samples.push_back({s, st.u, eps * st.du});
  }
  return r;
}

double alpha_for_critical(double epsilon, int index, double t_ref, const Tolerances& tol) {
  if (index < 1) throw Error(ErrorCode::Domain, "alpha_for_critical: index must be >= 1");
  // True when the index-th critical point exists and lies before t_ref.
  auto early = [&](double a, double* tau = nullptr) {
    const ShootProfile p = shoot(Params::from_epsilon(a, epsilon), tol);
    if (static_cast<int>(p.criticals.size()) < index) return false;
    if (tau) *tau = p.criticals[index - 1].tau;
    return p.criticals[index - 1].tau < t_ref;
  };
  double hi = 1.0 - 1e-6;
  if (!early(hi)) {
    std::ostringstream msg;
    msg << "alpha_for_critical: critical point " << index << " not before " << t_ref
        << " even near alpha = 1 (eps = " << epsilon << ")";
    throw Error(ErrorCode::NoSignChange, msg.str());
  }
  double lo = 1e-2;
  while (early(lo)) {
    hi = lo;
    lo *= 1e-3;
    if (lo < 1e-280) throw Error(ErrorCode::NoSignChange, "alpha_for_critical: no lower bracket");
  }
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 200 && lhi - llo > 1e-15 * std::max(1.0, std::fabs(llo)); ++it) {
    const double mid = 0.5 * (llo + lhi);
    if (early(std::exp(mid))) lhi = mid;
    else llo = mid;
  }
  double tau = 0.0;
  early(std::exp(lhi), &tau);
  if (std::fabs(tau - t_ref) > 1e-8) {
    std::ostringstream msg;
    msg << "alpha_for_critical: transition is a jump (tau = " << tau << " vs " << t_ref << ")";
    throw Error(ErrorCode::NoSignChange, msg.str());
  }
  return std::exp(lhi);
}

ShootProfile spike_at(double epsilon, double t_ref, const Tolerances& tol) {
  return shoot(Params::from_epsilon(alpha_for_critical(epsilon, 1, t_ref, tol), epsilon), tol);
}

double convergence_error(const ShootProfile& spike, double L, double t_ref) {
  const double eps = spike.params.epsilon();
  const Trajectory& tr = spike.trajectory;
  if (!tr.covers(t_ref - eps * L)) throw Error(ErrorCode::Domain, "convergence_error: window outside span");
  constexpr int kGrid = 4000;
  double sup = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double s = -L * static_cast<double>(i) / kGrid;
    sup = std::max(sup, std::fabs(tr.u(t_ref + eps * s) - z0(s)));
  }
  return sup;
}

double convergence_error(double epsilon, double L, double t_ref, const Tolerances& tol) {
  return convergence_error(spike_at(epsilon, t_ref, tol), L, t_ref);
}

double barrier_value(const BarrierParams& p) {
  if (!(p.kappa > 0.0) || !(p.delta > 0.0) || !(p.epsilon > 0.0)) {
    throw Error(ErrorCode::Domain, "barrier_value: kappa, delta, epsilon must be > 0");
  }
  const double root = std::sqrt(p.K * p.K + p.kappa / (p.epsilon * p.epsilon));
  const double c1 = p.K + root;
  const double c2 = p.K - root;
  if (c1 == c2) throw Error(ErrorCode::Degenerate, "barrier_value: repeated characteristic root");
  // phi = A e^{c1 t} + B e^{c2 t}; with a = A e^{c1 d}, b = B e^{-c2 d} the
  // boundary system reads a + b e^{2 c2 d} = 1/2, a e^{-2 c1 d} + b = 1/2.
  const double d = p.delta;
  const double pp = std::exp(2.0 * c2 * d);
  const double qq = std::exp(-2.0 * c1 * d);
  const double det = 1.0 - pp * qq;
  const double a = 0.5 * (1.0 - pp) / det;
  const double b = 0.5 * (1.0 - qq) / det;
  return a * std::exp(-c1 * d) + b * std::exp(c2 * d);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::Domain, "linear_fit: need matching sizes >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace spike
