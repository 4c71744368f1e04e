#include "spike/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kernels/dopri_tableau.hpp"
#include "roots.hpp"
#include "spike/error.hpp"
#include "spike/kernels/dispatch.hpp"

namespace spike {

double Equation::accel(double t, double y, double dy) const {
  return kernels::lane_accel(t, y, dy, c5, c1, cot_friction ? 1.0 : 0.0);
}

namespace {

using kernels::DopriBatch;
using kernels::kLanes;

constexpr long kMaxSteps = 2'000'000;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr double kSafety = 0.9;

// Per-shot step-size controller. Identical code drives the scalar and the
// batched paths; only the trial-step kernel differs.
class Lane {
 public:
  explicit Lane(const IntegrationTask& task) : task_(&task) {
    const StepControl& c = task.control;
    t_ = task.start.theta;
    u_ = task.start.u;
    du_ = task.start.du;
    fric_ = task.eq.cot_friction ? 1.0 : 0.0;
    ku1_ = du_;
    kv1_ = kernels::lane_accel(t_, u_, du_, task.eq.c5, task.eq.c1, fric_);
    end_ = c.t_end;
    h_ = std::min({c.h_init, c.h_max, c.t_end - t_});
    nodes_.push_back(task.start);
    maybe_shift();
    if (!(t_ < c.t_end)) finish(Terminal::ReachedEnd);
    if (!std::isfinite(u_) || !std::isfinite(du_)) finish(Terminal::Blowup);
  }

  bool done() const { return done_; }

  void load(DopriBatch& b, std::size_t l) {
    const StepControl& c = task_->control;
    const double remaining = end_ - t_;
    final_ = h_ * 1.01 >= remaining;
    h_try_ = final_ ? remaining : h_;
    b.t[l] = t_;
    b.h[l] = h_try_;
    b.u[l] = u_;
    b.du[l] = du_;
    b.c5[l] = task_->eq.c5;
    b.c1[l] = task_->eq.c1;
    b.fric[l] = fric_;
    b.rtol[l] = c.rel_tol;
    b.atol[l] = c.abs_tol * c.atol_scale;
    b.ku[0][l] = ku1_;
    b.kdu[0][l] = kv1_;
  }

  void consume(const DopriBatch& b, std::size_t l) {
    const double err = b.err[l];
    const bool finite = std::isfinite(err) && std::isfinite(b.u5[l]) &&
                        std::isfinite(b.du5[l]) && std::isfinite(b.kdu[6][l]);
    if (++steps_ > kMaxSteps) {
      fail("step budget exhausted");
      return;
    }
    if (finite && err <= 1.0) {
      accept(b, l, err);
      return;
    }
    ++rejected_;
    const double fac = finite ? std::max(kFacMin, kSafety * std::pow(err, -0.2)) : kFacMin;
    h_ = h_try_ * std::min(fac, 1.0);
    last_rejected_ = true;
    if (h_ < 1e-15 * std::max(1.0, std::fabs(t_))) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t_;
      fail(msg.str());
    }
  }

  IntegrationResult take() {
    IntegrationResult r;
    r.accepted = accepted_;
    r.rejected = rejected_;
    if (error_) {
      r.error = error_;
    } else {
      r.trajectory = Trajectory(std::move(nodes_), std::move(segs_), reason_, task_->series);
    }
    return r;
  }

 private:
  void accept(const DopriBatch& b, std::size_t l, double err) {
    using namespace kernels::dp;
    const StepControl& c = task_->control;
    ++accepted_;
    const double h = h_try_;
    const double t_new = final_ ? end_ : t_ + h;

    Segment seg;
    seg.t0 = t_ + shift_;
    seg.h = h;
    seg.t1 = t_new + shift_;
    seg.tau0 = t_;
    seg.tau1 = t_new;
    seg.shift = shift_;
    auto coeffs = [&](double y0, double y1, const double (&k)[7][kLanes]) {
      const double r2 = y1 - y0;
      const double r3 = h * k[0][l] - r2;
      const double r4 = r2 - h * k[6][l] - r3;
      const double r5 = h * (d1 * k[0][l] + d3 * k[2][l] + d4 * k[3][l] + d5 * k[4][l] +
                             d6 * k[5][l] + d7 * k[6][l]);
      return std::array<double, 5>{y0, r2 + r3, -r3 + r4 + r5, -r4 - 2.0 * r5, r5};
    };
    seg.u = coeffs(u_, b.u5[l], b.ku);
    seg.du = coeffs(du_, b.du5[l], b.kdu);

    if (c.stop_on_zero && locate_zero(seg)) return;

    segs_.push_back(seg);
    nodes_.push_back({seg.t1, b.u5[l], b.du5[l]});
    t_ = t_new;
    u_ = b.u5[l];
    du_ = b.du5[l];
    ku1_ = b.ku[6][l];
    kv1_ = b.kdu[6][l];

    if (std::fabs(u_) > c.blowup) {
      finish(Terminal::Blowup);
      return;
    }
    if (final_ || t_ >= end_) {
      finish(Terminal::ReachedEnd);
      return;
    }
    maybe_shift();
    double fac = err == 0.0 ? kFacMax : kSafety * std::pow(err, -0.2);
    fac = std::clamp(fac, kFacMin, kFacMax);
    if (last_rejected_) fac = std::min(fac, 1.0);
    last_rejected_ = false;
    h_ = std::min(h * fac, c.h_max);
  }

  // Checks the accepted piece for a first zero of u; on success truncates the
  // segment there and finishes the lane.
  bool locate_zero(Segment& seg) {
    constexpr int kProbes = 4;
    double s_prev = 0.0;
    double f_prev = seg.u[0];
    for (int i = 1; i <= kProbes; ++i) {
      const double tau = i == kProbes ? seg.tau1 : seg.tau0 + seg.h * (static_cast<double>(i) / kProbes);
      const double f = seg.u_at_tau(tau);
      if (f <= 0.0) {
        const double a = seg.tau0 + seg.h * s_prev;
        const double root = detail::bracketed_root(
            [&](double x) { return seg.u_at_tau(x); }, a, tau, f_prev, f, task_->control.event_tol);
        if (root <= seg.tau0 || root + shift_ <= seg.t0) {
          finish(Terminal::HitZero);
          return true;
        }
        seg.tau1 = root;
        seg.t1 = root + shift_;
        segs_.push_back(seg);
        nodes_.push_back({seg.t1, seg.u_at_tau(root), seg.du_at_tau(root)});
        finish(Terminal::HitZero);
        return true;
      }
      s_prev = static_cast<double>(i) / kProbes;
      f_prev = f;
    }
    return false;
  }

  // Moves the clock to tau = theta - pi/2 once past pi/4 (the subtraction is
  // exact there). The friction coefficient has period pi/2, so the kernel
  // sees the same equation.
  void maybe_shift() {
    if (shift_ != 0.0 || !task_->eq.cot_friction || t_ < kernels::dp::kQuarterPi) return;
    shift_ = kernels::dp::kHalfPiHi;
    t_ -= shift_;
    end_ -= shift_;
  }

  void finish(Terminal reason) {
    done_ = true;
    reason_ = reason;
  }

  void fail(std::string msg) {
    done_ = true;
    error_ = std::move(msg);
  }

  const IntegrationTask* task_;
  double t_ = 0.0, u_ = 0.0, du_ = 0.0, h_ = 0.0, h_try_ = 0.0;
  double ku1_ = 0.0, kv1_ = 0.0, fric_ = 1.0;
  double shift_ = 0.0, end_ = 0.0;
  bool final_ = false;
  bool last_rejected_ = false;
  bool done_ = false;
  long steps_ = 0, accepted_ = 0, rejected_ = 0;
  Terminal reason_ = Terminal::ReachedEnd;
  std::optional<std::string> error_;
  std::vector<State> nodes_;
  std::vector<Segment> segs_;
};

}  // namespace

Trajectory integrate(const IntegrationTask& task) {
  Lane lane(task);
  DopriBatch b;
  for (std::size_t l = 1; l < kLanes; ++l) b.idle(l);
  while (!lane.done()) {
    lane.load(b, 0);
    kernels::dopri_step_scalar(b);
    lane.consume(b, 0);
  }
  IntegrationResult r = lane.take();
  if (r.error) throw Error(ErrorCode::StepUnderflow, *r.error);
  return std::move(r.trajectory);
}

std::vector<IntegrationResult> integrate_batch(std::span<const IntegrationTask> tasks) {
  std::vector<IntegrationResult> out(tasks.size());
  std::vector<std::optional<Lane>> lanes(kLanes);
  std::vector<std::size_t> owner(kLanes, 0);
  std::size_t next = 0;
  auto refill = [&](std::size_t l) {
    while (next < tasks.size()) {
      lanes[l].emplace(tasks[next]);
      owner[l] = next++;
      if (!lanes[l]->done()) return;
      out[owner[l]] = lanes[l]->take();
    }
    lanes[l].reset();
  };
  for (std::size_t l = 0; l < kLanes; ++l) refill(l);

  DopriBatch b;
  for (;;) {
    bool any = false;
    for (std::size_t l = 0; l < kLanes; ++l) {
      if (lanes[l]) {
        lanes[l]->load(b, l);
        any = true;
      } else {
        b.idle(l);
      }
    }
    if (!any) break;
    kernels::dopri_step(b);
    for (std::size_t l = 0; l < kLanes; ++l) {
      if (!lanes[l]) continue;
      lanes[l]->consume(b, l);
      if (lanes[l]->done()) {
        out[owner[l]] = lanes[l]->take();
        refill(l);
      }
    }
  }
  return out;
}

}  // namespace spike
