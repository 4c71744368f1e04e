#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace spike {

/// One point (theta, u, u') of a solution.
struct State {
  double theta = 0.0;
  double u = 0.0;
  double du = 0.0;
};

enum class Terminal { ReachedEnd, HitZero, Blowup };

const char* to_string(Terminal reason);

/// Dense-output piece covering [t0, t1] with t1 <= t0 + h. Both components are
/// quartic polynomials in s = (theta - t0) / h, stored in monomial form.
///
/// tau0 / tau1 are the same ends in the integrator's clock tau = theta - shift.
/// Past pi/4 the integrator runs on tau = theta - pi/2, where abscissae near
/// pi/2 keep full relative precision; theta values are then rounded copies.
struct Segment {
  double t0 = 0.0;
  double h = 0.0;
  double t1 = 0.0;
  double tau0 = 0.0;
  double tau1 = 0.0;
  double shift = 0.0;
  std::array<double, 5> u{};
  std::array<double, 5> du{};

  double u_at_tau(double tau) const;
  double du_at_tau(double tau) const;

  double s_of(double theta) const { return (theta - t0) / h; }
  double u_at(double theta) const;
  double du_at(double theta) const;
  /// d/dtheta of the u polynomial (used for Hermite-consistency checks).
  double u_slope_at(double theta) const;
  State at(double theta) const;
};

/// u(theta) = c0 + c2 theta^2 + c4 theta^4 near the regular-singular origin.
struct EvenSeries {
  double c0 = 0.0;
  double c2 = 0.0;
  double c4 = 0.0;

  double u_at(double theta) const;
  double du_at(double theta) const;
};

/// Dense numerical solution on [series origin or first node, last node].
/// Immutable once built; all queries are const and thread-safe.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<State> nodes, std::vector<Segment> segments,
             Terminal reason, std::optional<EvenSeries> series = std::nullopt);

  std::span<const State> nodes() const { return nodes_; }
  std::span<const Segment> segments() const { return segments_; }
  Terminal terminal_reason() const { return reason_; }
  const std::optional<EvenSeries>& series() const { return series_; }
  bool empty() const { return nodes_.empty(); }

  /// Lower end of the covered span: 0 when a start series is attached.
  double theta_begin() const;
  double theta_end() const;
  bool covers(double theta) const;

  /// Dense evaluation; throws Error{Domain} outside the covered span.
  State eval(double theta) const;
  double u(double theta) const { return eval(theta).u; }
  double du(double theta) const { return eval(theta).du; }

  /// Index of the segment containing theta (theta must lie in the node span).
  std::size_t segment_index(double theta) const;

  struct Derivatives {
    double u, du, ddu;
  };
  /// Builds a trajectory from an analytic function sampled at the given
  /// strictly increasing abscissae, using cubic Hermite pieces per component.
  static Trajectory from_function(std::span<const double> thetas,
                                  const std::function<Derivatives(double)>& f,
                                  Terminal reason = Terminal::ReachedEnd);

  /// Mirror image v(theta) = u(pi/2 - theta) of a trajectory covering
  /// [a, b] with b <= pi/2; the result covers [pi/2 - b, pi/2 - a].
  Trajectory mirrored() const;

 private:
  std::vector<State> nodes_;
  std::vector<Segment> segments_;
  Terminal reason_ = Terminal::ReachedEnd;
  std::optional<EvenSeries> series_;
};

/// Concatenates b after a; b must start where a ends.
Trajectory concatenate(const Trajectory& a, const Trajectory& b);

}  // namespace spike
