#pragma once

// alpha -> Theta(alpha, eps) at fixed eps: sampling, component extraction and
// Dirichlet solutions Theta(alpha, eps) = theta1.

#include <optional>
#include <string>
#include <vector>

#include "spike/shooting.hpp"

namespace spike {

struct AlphaGrid {
  std::vector<double> alphas;  // strictly increasing in (0, 1)

  /// Midpoints (i + 1/2) / n.
  static AlphaGrid uniform(std::size_t n);
  /// n points log-spaced in [lo, hi].
  static AlphaGrid geometric(std::size_t n, double lo, double hi);
  /// Union of uniform(n/2) and geometric(n - n/2, lo, 1 - 1/n); resolves
  /// branches living at exponentially small alpha.
  static AlphaGrid mixed(std::size_t n, double lo = 1e-40);
  /// n uniform points on [lo, hi].
  static AlphaGrid linear(std::size_t n, double lo, double hi);
};

struct ThetaSample {
  double alpha = 0.0;
  std::optional<double> theta_zero;
  int spikes = 0;
  /// Set when the shot failed; theta_zero is then absent.
  std::optional<std::string> error;
};

struct ThetaCurve {
  double epsilon = 0.0;
  std::vector<ThetaSample> samples;  // sorted by alpha
};

struct ScanOptions {
  Tolerances tol;
  /// Relative alpha resolution: transitions are refined until
  /// hi - lo <= alpha_floor * hi.
  double alpha_floor = 1e-6;
  bool refine = true;
  /// Worker count; 0 reads SPIKE_SHOOTER_THREADS, else hardware parallelism.
  unsigned threads = 0;
};

/// Worker count resolved from ScanOptions::threads and the environment.
unsigned scan_threads(unsigned requested);

/// Parallel batch of shots; order of results matches alphas.
std::vector<ThetaSample> shoot_many(double epsilon, const std::vector<double>& alphas,
                                    const ScanOptions& opt);

/// Needs at least 16 grid points in (0, 1) and eps > 0 (Error{Domain}).
ThetaCurve scan(double epsilon, const AlphaGrid& grid, const ScanOptions& opt = {});

struct Branch {
  int k = 0;
  /// Outer bounds: neighbouring non-member samples (0 or 1 at the grid ends).
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  /// First and last member samples.
  double first_member = 0.0;
  double last_member = 0.0;
  double theta_min = 0.0;
  double alpha_at_min = 0.0;
  std::size_t members = 0;
  /// Fewer than 3 member samples.
  bool narrow = false;
};

/// Maximal runs of vanishing samples with equal spike count; theta_min is
/// refined by golden-section search in log alpha.
std::vector<Branch> components(const ThetaCurve& curve, const ScanOptions& opt = {});

struct DirichletSolution {
  double alpha = 0.0;
  double theta1 = 0.0;
  int k = 0;
  double residual = 0.0;
  /// |Theta - theta1| of an independent shot at tightened tolerances.
  double reshoot_residual = 0.0;
  int reshoot_spikes = 0;
};

struct DirichletOptions {
  ScanOptions scan;
  std::size_t grid = 512;
};

/// Two roots of Theta(alpha) - theta1 per qualifying k-spike branch. Throws
/// Error{NotReachable} when no k-spike branch dips below theta1.
std::vector<DirichletSolution> solve_dirichlet(double epsilon, double theta1, int k,
                                               const DirichletOptions& opt = {});
std::vector<DirichletSolution> solve_dirichlet(const std::vector<Branch>& branches, double epsilon,
                                               double theta1, int k, const ScanOptions& opt = {});

/// min over k-spike branches of theta_min; Error{NoBranch} if none.
double theta_min(double epsilon, int k, const DirichletOptions& opt = {});
double theta_min(const std::vector<Branch>& branches, int k);

struct NonexistenceReport {
  double epsilon = 0.0;
  double theta1 = 0.0;
  std::size_t samples = 0;
  std::size_t zeros = 0;
  std::size_t failures = 0;
  std::vector<double> counterexamples;
  std::optional<double> earliest_zero;
  double max_identity_residual = 0.0;
  bool pass = false;
};

/// Checks that no shot on the grid vanishes at or before theta1 and evaluates
/// the identity residual (ne1_residual) at every zero found. theta1 must not
/// exceed pi/4 + 1e-6 (Error{Domain}).
NonexistenceReport verify_nonexistence(double epsilon, double theta1, const AlphaGrid& grid,
                                       const ScanOptions& opt = {}, double residual_limit = 1e-8);

struct EndpointProbe {
  double alpha = 0.0;
  std::optional<double> theta_zero;
  int spikes = 0;
};

struct EndpointDivergence {
  /// Probes ordered from alpha_at_min outward, per side.
  std::vector<EndpointProbe> left;
  std::vector<EndpointProbe> right;
  bool left_monotone = false;
  bool right_monotone = false;
  bool ok() const { return left_monotone && right_monotone; }
};

/// Shoots geometric approaches from alpha_at_min toward both branch ends,
/// down to the resolution floor, and checks Theta increases monotonically and
/// exceeds theta_min.
EndpointDivergence endpoint_divergence(double epsilon, const Branch& b, const ScanOptions& opt = {},
                                       int probes = 12);

}  // namespace spike
