#include "spike/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "probe.hpp"
#include "roots.hpp"
#include "spike/error.hpp"

namespace spike {

const char* to_string(CriticalKind kind) { return kind == CriticalKind::Max ? "Max" : "Min"; }

using detail::for_each_probe;

std::optional<double> first_zero(const Trajectory& traj, double event_tol) {
  if (traj.empty()) return std::nullopt;
  if (traj.terminal_reason() == Terminal::HitZero) return traj.theta_end();
  std::optional<double> root;
  double prev_t = 0.0, prev_u = 0.0;
  bool have_prev = false;
  for_each_probe(traj, [&](double th, const State& s) {
    if (root) return;
    if (s.u <= 0.0) {
      if (!have_prev) {
        root = th;
      } else {
        root = detail::bracketed_root([&](double x) { return traj.u(x); }, prev_t, th, prev_u,
                                      s.u, event_tol);
      }
      return;
    }
    prev_t = th;
    prev_u = s.u;
    have_prev = true;
  });
  return root;
}

std::vector<CriticalPoint> critical_points(const Trajectory& traj, double event_tol) {
  std::vector<CriticalPoint> out;
  // Sign and location of the last probe with du != 0.
  double last_t = 0.0, last_du = 0.0;
  bool have_last = false;
  if (traj.series() && !traj.empty()) {
    const double c2 = traj.series()->c2;
    if (c2 != 0.0) {
      last_t = traj.nodes().front().theta;
      last_du = traj.nodes().front().du;
      have_last = last_du != 0.0;
    }
  }
  for_each_probe(traj, [&](double th, const State& s) {
    if (s.du == 0.0) return;
    if (have_last && (s.du > 0.0) != (last_du > 0.0)) {
      const double tau = detail::bracketed_root([&](double x) { return traj.du(x); }, last_t, th,
                                                last_du, s.du, event_tol);
      CriticalPoint cp;
      cp.tau = tau;
      cp.value = traj.u(tau);
      cp.kind = last_du > 0.0 ? CriticalKind::Max : CriticalKind::Min;
      cp.index = static_cast<int>(out.size()) + 1;
      if (out.empty() || tau > out.back().tau) out.push_back(cp);
    }
    last_t = th;
    last_du = s.du;
    have_last = true;
  });
  return out;
}

ShootProfile classify(const Params& params, Trajectory traj, double event_tol) {
  ShootProfile p{params, std::nullopt, {}, 0, {}, true};
  p.theta_zero = first_zero(traj, event_tol);
  p.criticals = critical_points(traj, event_tol);
  const double limit = p.theta_zero ? *p.theta_zero : traj.theta_end();
  CriticalKind expect = CriticalKind::Max;
  for (const CriticalPoint& c : p.criticals) {
    if (c.tau >= limit) break;
    if (c.kind == CriticalKind::Max) ++p.spikes;
    if (c.kind != expect) p.alternation_ok = false;
    if (c.kind == CriticalKind::Max && !(c.value > 1.0)) p.alternation_ok = false;
    if (c.kind == CriticalKind::Min && !(c.value < 1.0)) p.alternation_ok = false;
    expect = expect == CriticalKind::Max ? CriticalKind::Min : CriticalKind::Max;
  }
  p.trajectory = std::move(traj);
  return p;
}

ShootProfile shoot(const Params& params, const Tolerances& tol) {
  if (!(params.alpha() > 0.0 && params.alpha() < 1.0)) {
    std::ostringstream msg;
    msg << "shoot: alpha must lie in (0, 1), got " << params.alpha();
    throw Error(ErrorCode::Degenerate, msg.str());
  }
  return classify(params, integrate_ivp(params, tol, true), tol.event_tol);
}

double friction_integral(const Trajectory& traj, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  auto integrand = [](double th, double du) { return friction(th) * du * du; };
  double total = 0.0;
  const double first = traj.nodes().front().theta;
  if (traj.series() && a < first) {
    const EvenSeries& s = *traj.series();
    const double hi = std::min(b, first);
    total += gauss_kronrod<double, 15>::integrate(
        [&](double th) { return integrand(th, s.du_at(th)); }, a, hi, 0, 1e-15);
  }
  // Each piece is integrated on the integrator's own clock; cot(2t) has
  // period pi/2 so friction() applies unchanged to the shifted abscissa.
  for (const Segment& seg : traj.segments()) {
    if (!(std::min(b, seg.t1) > std::max(a, seg.t0))) continue;
    const double lo = a > seg.t0 ? a - seg.shift : seg.tau0;
    const double hi = b < seg.t1 ? b - seg.shift : seg.tau1;
    if (!(hi > lo)) continue;
    total += gauss_kronrod<double, 15>::integrate(
        [&](double tau) { return integrand(tau, seg.du_at_tau(tau)); }, lo, hi, 0, 1e-14);
  }
  return total;
}

EnergySplit energy_split(const ShootProfile& profile, double t_ref) {
  const Trajectory& tr = profile.trajectory;
  if (!(t_ref > kQuarterPi && t_ref < kHalfPi) || !tr.covers(t_ref)) {
    throw Error(ErrorCode::Domain, "energy_split: t_ref outside (pi/4, pi/2) or trajectory span");
  }
  const double eps2 = profile.params.epsilon() * profile.params.epsilon();
  EnergySplit e;
  e.t_ref = t_ref;
  e.j1 = -eps2 * friction_integral(tr, 0.0, kQuarterPi);
  e.j2 = -eps2 * friction_integral(tr, kQuarterPi, t_ref);
  e.f_alpha = potential_F(profile.params.alpha());
  const State s = tr.eval(t_ref);
  e.f_peak = potential_F(s.u);
  e.kinetic = eps2 * s.du * s.du / 2.0;
  return e;
}

double ne1_residual(const ShootProfile& profile) {
  if (!profile.theta_zero) throw Error(ErrorCode::Domain, "ne1_residual: profile has no zero");
  const double z = *profile.theta_zero;
  const Trajectory& tr = profile.trajectory;
  const double lam = profile.params.lambda();
  // At a truncated end the stored node is exact; re-evaluating through the
  // rounded theta loses digits when z is within ~1e-8 of pi/2.
  const bool at_end = tr.terminal_reason() == Terminal::HitZero && z == tr.theta_end();
  const double du = at_end ? tr.nodes().back().du : tr.du(z);
  const double kin = du * du / 2.0;
  const double fr = friction_integral(tr, 0.0, z);
  // Zeros close to pi/2 make both terms huge and nearly cancelling; measure
  // the residual against their size, never below |lambda|.
  const double scale = std::max(std::fabs(lam), kin + std::fabs(fr));
  return std::fabs(kin + fr + lam * potential_F(profile.params.alpha())) / scale;
}

}  // namespace spike
