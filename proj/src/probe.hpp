#pragma once

#include "spike/trajectory.hpp"

namespace spike::detail {

inline constexpr int kProbes = 4;

// Visits probe abscissae of the dense output in increasing order: the first
// node, then kProbes points per segment ending at the segment end.
template <class Visit>
void for_each_probe(const Trajectory& traj, Visit&& visit) {
  if (traj.empty()) return;
  const auto segs = traj.segments();
  if (segs.empty()) {
    visit(traj.nodes().front().theta, traj.nodes().front());
    return;
  }
  visit(segs.front().t0, segs.front().at(segs.front().t0));
  for (const Segment& seg : segs) {
    const double len = seg.t1 - seg.t0;
    for (int i = 1; i <= kProbes; ++i) {
      const double th = i == kProbes ? seg.t1 : seg.t0 + len * (static_cast<double>(i) / kProbes);
      visit(th, seg.at(th));
    }
  }
}

}  // namespace spike::detail
