#include "spike/branch_explorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "spike/error.hpp"
#include "spike/integrator.hpp"
#include "spike/kernels/dispatch.hpp"

namespace spike {

AlphaGrid AlphaGrid::uniform(std::size_t n) {
  AlphaGrid g;
  for (std::size_t i = 0; i < n; ++i) g.alphas.push_back((static_cast<double>(i) + 0.5) / n);
  return g;
}

AlphaGrid AlphaGrid::geometric(std::size_t n, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo && hi < 1.0) || n < 2) {
    throw Error(ErrorCode::Domain, "AlphaGrid::geometric: need 0 < lo < hi < 1 and n >= 2");
  }
  AlphaGrid g;
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g.alphas.push_back(std::exp(a + (b - a) * static_cast<double>(i) / (n - 1)));
  }
  return g;
}

AlphaGrid AlphaGrid::linear(std::size_t n, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo && hi < 1.0) || n < 2) {
    throw Error(ErrorCode::Domain, "AlphaGrid::linear: need 0 < lo < hi < 1 and n >= 2");
  }
  AlphaGrid g;
  for (std::size_t i = 0; i < n; ++i) g.alphas.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  return g;
}

AlphaGrid AlphaGrid::mixed(std::size_t n, double lo) {
  const std::size_t nu = n / 2;
  AlphaGrid g = uniform(nu);
  const AlphaGrid geo = geometric(n - nu, lo, 1.0 - 1.0 / static_cast<double>(n));
  g.alphas.insert(g.alphas.end(), geo.alphas.begin(), geo.alphas.end());
  std::sort(g.alphas.begin(), g.alphas.end());
  g.alphas.erase(std::unique(g.alphas.begin(), g.alphas.end()), g.alphas.end());
  return g;
}

unsigned scan_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPIKE_SHOOTER_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

// Runs the shots in contiguous chunks, one per worker, each chunk through the
// lane-batched integrator; visit(i, profile-or-error) is called from workers
// on distinct indices.
template <class Visit>
void parallel_shots(double epsilon, const std::vector<double>& alphas, const ScanOptions& opt,
                    Visit&& visit) {
  const std::size_t n = alphas.size();
  if (n == 0) return;
  std::vector<Params> params;
  std::vector<IntegrationTask> tasks;
  params.reserve(n);
  tasks.reserve(n);
  for (double a : alphas) {
    params.push_back(Params::from_epsilon(a, epsilon));
    tasks.push_back(ivp_task(params.back(), opt.tol, true));
  }
  const std::size_t workers =
      std::min<std::size_t>(scan_threads(opt.threads), (n + kernels::kLanes - 1) / kernels::kLanes);
  auto run = [&](std::size_t begin, std::size_t end) {
    auto results = integrate_batch(std::span<const IntegrationTask>(tasks).subspan(begin, end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      IntegrationResult& r = results[i - begin];
      if (r.error) {
        visit(i, nullptr, *r.error);
      } else {
        ShootProfile p = classify(params[i], std::move(r.trajectory), opt.tol.event_tol);
        visit(i, &p, std::string());
      }
    }
  };
  if (workers <= 1) {
    run(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(run, b, e);
  }
  for (auto& t : pool) t.join();
}

bool vanishes_with(const ThetaSample& s, int k) { return s.theta_zero && s.spikes == k; }

// Transition key: non-vanishing (and failed) samples share one key.
int key_of(const ThetaSample& s) { return s.theta_zero ? s.spikes : -1; }

double midpoint(double a, double b) { return b > 2.0 * a ? std::sqrt(a * b) : 0.5 * (a + b); }

ThetaSample sample_at(double epsilon, double alpha, const Tolerances& tol) {
  ThetaSample s;
  s.alpha = alpha;
  try {
    const ShootProfile p = shoot(Params::from_epsilon(alpha, epsilon), tol);
    s.theta_zero = p.theta_zero;
    s.spikes = p.spikes;
  } catch (const Error& e) {
    s.error = e.what();
  }
  return s;
}

}  // namespace

std::vector<ThetaSample> shoot_many(double epsilon, const std::vector<double>& alphas,
                                    const ScanOptions& opt) {
  std::vector<ThetaSample> out(alphas.size());
  parallel_shots(epsilon, alphas, opt, [&](std::size_t i, const ShootProfile* p, const std::string& err) {
    out[i].alpha = alphas[i];
    if (p) {
      out[i].theta_zero = p->theta_zero;
      out[i].spikes = p->spikes;
    } else {
      out[i].error = err;
    }
  });
  return out;
}

ThetaCurve scan(double epsilon, const AlphaGrid& grid, const ScanOptions& opt) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::Domain, "scan: epsilon must be > 0");
  if (grid.alphas.size() < 16) throw Error(ErrorCode::Domain, "scan: grid needs at least 16 points");
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    const double a = grid.alphas[i];
    if (!(a > 0.0 && a < 1.0) || (i > 0 && !(a > grid.alphas[i - 1]))) {
      throw Error(ErrorCode::Domain, "scan: grid must be strictly increasing in (0, 1)");
    }
  }
  ThetaCurve curve;
  curve.epsilon = epsilon;
  curve.samples = shoot_many(epsilon, grid.alphas, opt);
  if (!opt.refine) return curve;

  for (int round = 0; round < 400; ++round) {
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
      const ThetaSample& a = curve.samples[i];
      const ThetaSample& b = curve.samples[i + 1];
      if (key_of(a) == key_of(b)) continue;
      if (b.alpha - a.alpha <= opt.alpha_floor * b.alpha) continue;
      const double m = midpoint(a.alpha, b.alpha);
      if (m > a.alpha && m < b.alpha) mids.push_back(m);
    }
    if (mids.empty()) break;
    std::vector<ThetaSample> fresh = shoot_many(epsilon, mids, opt);
    std::vector<ThetaSample> merged;
    merged.reserve(curve.samples.size() + fresh.size());
    std::merge(curve.samples.begin(), curve.samples.end(), fresh.begin(), fresh.end(),
               std::back_inserter(merged),
               [](const ThetaSample& x, const ThetaSample& y) { return x.alpha < y.alpha; });
    curve.samples = std::move(merged);
  }
  return curve;
}

std::vector<Branch> components(const ThetaCurve& curve, const ScanOptions& opt) {
  std::vector<Branch> out;
  const auto& s = curve.samples;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!s[i].theta_zero) {
      ++i;
      continue;
    }
    const int k = s[i].spikes;
    std::size_t j = i;
    while (j + 1 < s.size() && vanishes_with(s[j + 1], k)) ++j;

    Branch b;
    b.k = k;
    b.alpha_lo = i > 0 ? s[i - 1].alpha : 0.0;
    b.alpha_hi = j + 1 < s.size() ? s[j + 1].alpha : 1.0;
    b.first_member = s[i].alpha;
    b.last_member = s[j].alpha;
    b.members = j - i + 1;
    b.narrow = b.members < 3;
    std::size_t m = i;
    for (std::size_t q = i; q <= j; ++q) {
      if (*s[q].theta_zero < *s[m].theta_zero) m = q;
    }
    b.theta_min = *s[m].theta_zero;
    b.alpha_at_min = s[m].alpha;

    // Golden-section refinement in log alpha on the neighbours of the sampled minimum.
    if (b.members >= 2) {
      auto theta = [&](double la) {
        const ThetaSample t = sample_at(curve.epsilon, std::exp(la), opt.tol);
        return vanishes_with(t, k) ? *t.theta_zero : std::numeric_limits<double>::infinity();
      };
      double lo = std::log(s[m > i ? m - 1 : m].alpha);
      double hi = std::log(s[m < j ? m + 1 : m].alpha);
      constexpr double g = 0.6180339887498949;
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = theta(x1), f2 = theta(x2);
      for (int it = 0; it < 100 && hi - lo > 1e-9 * std::max(1.0, std::fabs(lo)); ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = theta(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = theta(x2);
        }
      }
      const double best_x = f1 < f2 ? x1 : x2;
      const double best_f = std::min(f1, f2);
      if (best_f < b.theta_min) {
        b.theta_min = best_f;
        b.alpha_at_min = std::exp(best_x);
      }
    }
    out.push_back(b);
    i = j + 1;
  }
  return out;
}

namespace {

// f(alpha) = Theta - theta1 with Theta := cap when the shot is not a k-spike
// vanishing solution.
struct DirichletObjective {
  double epsilon;
  double theta1;
  int k;
  Tolerances tol;

  double operator()(double alpha) const {
    const ThetaSample t = sample_at(epsilon, alpha, tol);
    return (vanishes_with(t, k) ? *t.theta_zero : kHalfPi) - theta1;
  }
};

// Root of f between a (f > 0) and b (f < 0), by bisection down to machine
// resolution in alpha; returns the end with the smaller |f|.
std::pair<double, double> bisect_root(const DirichletObjective& f, double a, double fa, double b, double fb) {
  for (int it = 0; it < 400; ++it) {
    const double m = std::max(a, b) > 2.0 * std::min(a, b) ? std::sqrt(a * b) : 0.5 * (a + b);
    if (!(m != a && m != b)) break;
    const double fm = f(m);
    if (fm == 0.0) return {m, 0.0};
    if (fm > 0.0) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return std::fabs(fa) < std::fabs(fb) ? std::pair{a, fa} : std::pair{b, fb};
}

}  // namespace

std::vector<DirichletSolution> solve_dirichlet(const std::vector<Branch>& branches, double epsilon,
                                               double theta1, int k, const ScanOptions& opt) {
  std::vector<DirichletSolution> out;
  const DirichletObjective f{epsilon, theta1, k, opt.tol};
  const Tolerances tight = opt.tol.tightened(1e-2);
  for (const Branch& b : branches) {
    if (b.k != k || !(b.theta_min < theta1)) continue;
    const double fmin = b.theta_min - theta1;
    auto side = [&](double member, double outer) {
      double fm = f(member);
      double start = member;
      if (!(fm > 0.0)) {
        // Steep edge: the crossing lies between the last member and the outer neighbour.
        start = outer > 0.0 && outer < 1.0 ? outer : member;
        fm = kHalfPi - theta1;
      }
      return bisect_root(f, start, fm, b.alpha_at_min, fmin);
    };
    for (auto [alpha, fr] : {side(b.first_member, b.alpha_lo), side(b.last_member, b.alpha_hi)}) {
      if (fr >= kHalfPi - theta1) continue;
      DirichletSolution s;
      s.alpha = alpha;
      s.theta1 = theta1;
      s.k = k;
      s.residual = std::fabs(fr);
      const ShootProfile re = shoot(Params::from_epsilon(alpha, epsilon), tight);
      s.reshoot_spikes = re.spikes;
      s.reshoot_residual = re.theta_zero ? std::fabs(*re.theta_zero - theta1) : kHalfPi;
      const bool dup = std::any_of(out.begin(), out.end(), [&](const DirichletSolution& o) {
        return std::fabs(o.alpha - alpha) <= 1e-14 * alpha;
      });
      if (!dup) out.push_back(s);
    }
  }
  if (out.empty()) {
    std::ostringstream msg;
    msg << "solve_dirichlet: no " << k << "-spike branch with theta_min < " << theta1
        << " at eps = " << epsilon;
    throw Error(ErrorCode::NotReachable, msg.str());
  }
  return out;
}

std::vector<DirichletSolution> solve_dirichlet(double epsilon, double theta1, int k,
                                               const DirichletOptions& opt) {
  if (!(theta1 > 0.0 && theta1 < kHalfPi)) throw Error(ErrorCode::Domain, "solve_dirichlet: theta1 outside (0, pi/2)");
  const ThetaCurve curve = scan(epsilon, AlphaGrid::mixed(opt.grid), opt.scan);
  return solve_dirichlet(components(curve, opt.scan), epsilon, theta1, k, opt.scan);
}

double theta_min(const std::vector<Branch>& branches, int k) {
  std::optional<double> best;
  for (const Branch& b : branches) {
    if (b.k == k && (!best || b.theta_min < *best)) best = b.theta_min;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "theta_min: no " << k << "-spike branch";
    throw Error(ErrorCode::NoBranch, msg.str());
  }
  return *best;
}

double theta_min(double epsilon, int k, const DirichletOptions& opt) {
  const ThetaCurve curve = scan(epsilon, AlphaGrid::mixed(opt.grid), opt.scan);
  return theta_min(components(curve, opt.scan), k);
}

NonexistenceReport verify_nonexistence(double epsilon, double theta1, const AlphaGrid& grid,
                                       const ScanOptions& opt, double residual_limit) {
  if (!(theta1 > 0.0 && theta1 <= kQuarterPi + 1e-6)) {
    throw Error(ErrorCode::Domain, "verify_nonexistence: theta1 must lie in (0, pi/4]");
  }
  NonexistenceReport r;
  r.epsilon = epsilon;
  r.theta1 = theta1;
  r.samples = grid.alphas.size();
  std::vector<std::optional<double>> zero(grid.alphas.size());
  std::vector<double> resid(grid.alphas.size(), 0.0);
  std::vector<char> failed(grid.alphas.size(), 0);
  parallel_shots(epsilon, grid.alphas, opt, [&](std::size_t i, const ShootProfile* p, const std::string&) {
    if (!p) {
      failed[i] = 1;
      return;
    }
    zero[i] = p->theta_zero;
    if (p->theta_zero) resid[i] = ne1_residual(*p);
  });
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    if (failed[i]) {
      ++r.failures;
      continue;
    }
    if (!zero[i]) continue;
    ++r.zeros;
    if (!r.earliest_zero || *zero[i] < *r.earliest_zero) r.earliest_zero = zero[i];
    if (*zero[i] <= theta1) r.counterexamples.push_back(grid.alphas[i]);
    r.max_identity_residual = std::max(r.max_identity_residual, resid[i]);
  }
  r.pass = r.counterexamples.empty() && r.failures == 0 && r.max_identity_residual < residual_limit;
  return r;
}

EndpointDivergence endpoint_divergence(double epsilon, const Branch& b, const ScanOptions& opt, int probes) {
  EndpointDivergence d;
  auto approach = [&](double edge, std::vector<EndpointProbe>& out) {
    const double l0 = std::log(b.alpha_at_min), l1 = std::log(edge);
    std::vector<double> alphas;
    for (int j = 1; j <= probes; ++j) {
      const double frac = 1.0 - std::pow(0.5, j);
      alphas.push_back(std::exp(l0 + (l1 - l0) * frac));
      if (std::fabs(alphas.back() - edge) <= opt.alpha_floor * edge) break;
    }
    alphas.push_back(edge);
    double prev = b.theta_min;
    bool mono = true;
    for (double a : alphas) {
      const ThetaSample t = sample_at(epsilon, a, opt.tol);
      out.push_back({a, t.theta_zero, t.spikes});
      if (!vanishes_with(t, b.k) || !(*t.theta_zero > prev)) mono = false;
      if (t.theta_zero) prev = *t.theta_zero;
    }
    return mono;
  };
  d.left_monotone = b.first_member < b.alpha_at_min ? approach(b.first_member, d.left) : false;
  d.right_monotone = b.last_member > b.alpha_at_min ? approach(b.last_member, d.right) : false;
  return d;
}

}  // namespace spike
