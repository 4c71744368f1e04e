#include "spike/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spike/constants.hpp"
#include "spike/error.hpp"

namespace spike {

namespace {

double horner(const std::array<double, 5>& c, double s) {
  return (((c[4] * s + c[3]) * s + c[2]) * s + c[1]) * s + c[0];
}

double horner_slope(const std::array<double, 5>& c, double s) {
  return ((4.0 * c[4] * s + 3.0 * c[3]) * s + 2.0 * c[2]) * s + c[1];
}

// Coefficients of p(alpha + beta s).
std::array<double, 5> compose_affine(const std::array<double, 5>& c, double alpha, double beta) {
  std::array<double, 5> out{};
  // Horner over polynomials: q <- q * (alpha + beta s) + c_i.
  for (int i = 4; i >= 0; --i) {
    std::array<double, 5> next{};
    for (int j = 0; j < 5; ++j) {
      next[j] += out[j] * alpha;
      if (j + 1 < 5) next[j + 1] += out[j] * beta;
    }
    next[0] += c[i];
    out = next;
  }
  return out;
}

std::array<double, 5> hermite(double y0, double y1, double d0, double d1, double h) {
  return {y0, h * d0, 3.0 * (y1 - y0) - h * (2.0 * d0 + d1), 2.0 * (y0 - y1) + h * (d0 + d1), 0.0};
}

}  // namespace

const char* to_string(Terminal reason) {
  switch (reason) {
    case Terminal::ReachedEnd: return "ReachedEnd";
    case Terminal::HitZero: return "HitZero";
    case Terminal::Blowup: return "Blowup";
  }
  return "Unknown";
}

double Segment::u_at(double theta) const { return horner(u, s_of(theta)); }
double Segment::du_at(double theta) const { return horner(du, s_of(theta)); }
double Segment::u_at_tau(double tau) const { return horner(u, (tau - tau0) / h); }
double Segment::du_at_tau(double tau) const { return horner(du, (tau - tau0) / h); }
double Segment::u_slope_at(double theta) const { return horner_slope(u, s_of(theta)) / h; }
State Segment::at(double theta) const {
  const double s = s_of(theta);
  return {theta, horner(u, s), horner(du, s)};
}

double EvenSeries::u_at(double theta) const {
  const double t2 = theta * theta;
  return c0 + t2 * (c2 + t2 * c4);
}

double EvenSeries::du_at(double theta) const {
  const double t2 = theta * theta;
  return theta * (2.0 * c2 + 4.0 * c4 * t2);
}

Trajectory::Trajectory(std::vector<State> nodes, std::vector<Segment> segments,
                       Terminal reason, std::optional<EvenSeries> series)
    : nodes_(std::move(nodes)),
      segments_(std::move(segments)),
      reason_(reason),
      series_(series) {
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i].theta > nodes_[i - 1].theta)) {
      throw Error(ErrorCode::Domain, "trajectory nodes must be strictly increasing");
    }
  }
}

double Trajectory::theta_begin() const {
  if (series_) return 0.0;
  return nodes_.empty() ? 0.0 : nodes_.front().theta;
}

double Trajectory::theta_end() const { return nodes_.empty() ? 0.0 : nodes_.back().theta; }

bool Trajectory::covers(double theta) const {
  return !nodes_.empty() && theta >= theta_begin() && theta <= theta_end();
}

std::size_t Trajectory::segment_index(double theta) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), theta,
                             [](double x, const Segment& s) { return x < s.t0; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

State Trajectory::eval(double theta) const {
  if (!covers(theta)) {
    std::ostringstream msg;
    msg << "theta " << theta << " outside trajectory span [" << theta_begin() << ", "
        << theta_end() << "]";
    throw Error(ErrorCode::Domain, msg.str());
  }
  if (theta < nodes_.front().theta) return {theta, series_->u_at(theta), series_->du_at(theta)};
  if (segments_.empty()) return nodes_.front();
  return segments_[segment_index(theta)].at(theta);
}

Trajectory Trajectory::from_function(std::span<const double> thetas,
                                     const std::function<Derivatives(double)>& f,
                                     Terminal reason) {
  std::vector<State> nodes;
  std::vector<Segment> segs;
  nodes.reserve(thetas.size());
  Derivatives prev{};
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const Derivatives d = f(thetas[i]);
    nodes.push_back({thetas[i], d.u, d.du});
    if (i > 0) {
      Segment s;
      s.t0 = thetas[i - 1];
      s.t1 = thetas[i];
      s.h = s.t1 - s.t0;
      s.tau0 = s.t0;
      s.tau1 = s.t1;
      s.u = hermite(prev.u, d.u, prev.du, d.du, s.h);
      s.du = hermite(prev.du, d.du, prev.ddu, d.ddu, s.h);
      segs.push_back(s);
    }
    prev = d;
  }
  return Trajectory(std::move(nodes), std::move(segs), reason);
}

Trajectory Trajectory::mirrored() const {
  std::vector<State> nodes;
  nodes.reserve(nodes_.size());
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    nodes.push_back({kHalfPi - it->theta, it->u, -it->du});
  }
  std::vector<Segment> segs;
  segs.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    const double len = it->t1 - it->t0;
    const double sigma = len / it->h;
    Segment m;
    m.t0 = kHalfPi - it->t1;
    m.h = len;
    m.t1 = kHalfPi - it->t0;
    m.tau0 = m.t0;
    m.tau1 = m.t1;
    m.u = compose_affine(it->u, sigma, -sigma);
    m.du = compose_affine(it->du, sigma, -sigma);
    for (double& c : m.du) c = -c;
    segs.push_back(m);
  }
  // Re-pin node abscissae to segment ends so lookups agree exactly.
  for (std::size_t i = 0; i < segs.size(); ++i) {
    nodes[i].theta = segs[i].t0;
    nodes[i + 1].theta = segs[i].t1;
  }
  return Trajectory(std::move(nodes), std::move(segs), reason_);
}

Trajectory concatenate(const Trajectory& a, const Trajectory& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (std::fabs(a.theta_end() - b.nodes().front().theta) > 1e-12) {
    throw Error(ErrorCode::Domain, "concatenate: trajectories do not meet");
  }
  std::vector<State> nodes(a.nodes().begin(), a.nodes().end());
  nodes.insert(nodes.end(), b.nodes().begin() + 1, b.nodes().end());
  std::vector<Segment> segs(a.segments().begin(), a.segments().end());
  segs.insert(segs.end(), b.segments().begin(), b.segments().end());
  return Trajectory(std::move(nodes), std::move(segs), b.terminal_reason(), a.series());
}

}  // namespace spike
